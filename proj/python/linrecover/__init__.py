"""Variable selection and recovery-of-linear-components autoencoding."""

from ._linrecover import *  # noqa: F401,F403
from ._linrecover import __doc__  # noqa: F401

__version__ = "0.1.0"
