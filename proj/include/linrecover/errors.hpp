#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace linrecover {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape or argument precondition violated by the caller.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A computation produced or received a non-finite value.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Training loss became non-finite.
class TrainingDivergence : public NumericError {
public:
    TrainingDivergence(std::size_t epoch, const std::string& what)
        : NumericError("training diverged at epoch " + std::to_string(epoch) + ": " + what),
          epoch_(epoch) {}

    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

/// File input/output failure or malformed file contents.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace linrecover
