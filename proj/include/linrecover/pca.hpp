#pragma once

#include "linrecover/matrix_core.hpp"

namespace linrecover {

/// Principal components of a centered sample matrix.
struct PcaModel {
    Matrix loadings;             // v x r, orthonormal columns ordered by variance
    Vector component_variances;  // length r, nonincreasing, s_i^2 / (m - 1)
    Vector cumulative_vex;       // length r, percent explained by the first i+1 components

    Index rank() const { return loadings.cols(); }
};

/// PCA via thin SVD of the centered matrix.
///
/// Components whose singular value falls below v * sigma_max * 1e-12 are
/// dropped. Each loading is sign-fixed so that its largest-magnitude entry is
/// positive (first such entry on ties).
PcaModel fit_pca(const Matrix& xc);

/// Xc * P_k. Throws InvalidArgument unless 1 <= k <= rank.
Matrix pca_scores(const PcaModel& model, const Matrix& xc, Index k);

/// T_k * P_k^T, in centered coordinates.
Matrix pca_reconstruct(const PcaModel& model, const Matrix& scores);

/// Smallest k with cumulative_vex[k-1] >= tau, or rank() if never reached.
Index components_for_threshold(const PcaModel& model, double tau);

} // namespace linrecover
