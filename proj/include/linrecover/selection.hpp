#pragma once

// Unsupervised variable selection under the variance-explained criterion:
// greedy forward selection (FSCA) and backward refinement passes.

#include "linrecover/matrix_core.hpp"

#include <cstddef>
#include <vector>

namespace linrecover {

struct SelectionModel {
    std::vector<Index> indices;      // selected columns, in selection order
    std::vector<double> vex_profile; // V_EX after each prefix of `indices`
    Matrix coefficients;             // k x v least-squares decoder for the final subset
    std::size_t refinement_passes = 0;

    Index k() const { return static_cast<Index>(indices.size()); }
    double vex() const { return vex_profile.empty() ? 0.0 : vex_profile.back(); }
};

/// Greedy forward selection of k columns of the centered matrix.
///
/// Each step adds the column whose inclusion maximizes the least-squares V_EX
/// of the whole matrix; ties go to the lowest index. Zero-variance columns are
/// only taken when nothing else is left.
SelectionModel fsca_select(const Matrix& xc, Index k);

/// One backward pass: each position, in order, is replaced by the candidate
/// (itself included) giving the best V_EX with the other k-1 fixed.
SelectionModel spbr_refine(const Matrix& xc, const SelectionModel& model);

/// SPBR passes until a pass leaves the subset unchanged or max_passes is hit.
SelectionModel mpbr_refine(const Matrix& xc, const SelectionModel& model,
                           std::size_t max_passes = 100);

/// Least-squares V_EX of X reconstructed from the listed columns (direct solve).
double subset_variance_explained(const Matrix& xc, const std::vector<Index>& indices);

/// Fraction of runs selecting each of the v variables.
std::vector<double> selection_frequency(const std::vector<SelectionModel>& runs, Index v);

} // namespace linrecover
