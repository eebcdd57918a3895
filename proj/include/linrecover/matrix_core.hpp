#pragma once

// Dense sample matrices (row = sample, column = variable), centering, and
// reconstruction-quality metrics.

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace linrecover {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;

/// Column means removed by center_columns().
struct ColumnStats {
    RowVector means;
};

struct ReconstructionMetrics {
    double v_ex = 0.0;  // percent variance explained
    double m_se = 0.0;  // mean squared error
    double alpha = 0.0; // ||X||_F^2 / (100 m v), so that m_se = alpha (100 - v_ex)
};

/// Throws NumericError if any entry is NaN or infinite.
void require_finite(const Matrix& x, const char* what);

/// Returns (X - 1 mean^T, mean).
std::pair<Matrix, ColumnStats> center_columns(const Matrix& x);

/// Subtracts previously computed means (e.g. training means from test rows).
Matrix apply_centering(const Matrix& x, const ColumnStats& stats);
Matrix undo_centering(const Matrix& xc, const ColumnStats& stats);

double frobenius_sq(const Matrix& x);

struct LeastSquaresFit {
    Matrix coefficients; // k x v
    Matrix reconstruction; // m x v
};

/// Minimum-norm least-squares B minimizing ||X - T B||_F, and T B.
///
/// Singular values of T below max(m, k) * sigma_max * eps are treated as zero,
/// so collinear or zero columns in T are handled without failure.
LeastSquaresFit least_squares_reconstruct(const Matrix& t, const Matrix& x);

/// Pseudo-inverse with the same singular-value cutoff as above.
Matrix pseudo_inverse(const Matrix& a);

/// 100 (1 - ||X - Xhat||^2 / ||X||^2). Throws if ||X|| = 0.
double variance_explained(const Matrix& x, const Matrix& xhat);

/// ||X - Xhat||^2 / (m v).
double mse(const Matrix& x, const Matrix& xhat);

ReconstructionMetrics reconstruction_metrics(const Matrix& x, const Matrix& xhat);

/// Copies the listed rows / columns, in order.
Matrix select_rows(const Matrix& x, std::span<const Index> rows);
Matrix select_columns(const Matrix& x, std::span<const Index> cols);

} // namespace linrecover
