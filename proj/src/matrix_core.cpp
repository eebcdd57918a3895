#include "linrecover/matrix_core.hpp"

#include "linrecover/errors.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace linrecover {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InvalidArgument(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) +
                              "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                              "x" + std::to_string(b.cols()));
    }
}

} // namespace

void require_finite(const Matrix& x, const char* what) {
    if (!x.allFinite()) {
        throw NumericError(std::string(what) + ": non-finite entry");
    }
}

std::pair<Matrix, ColumnStats> center_columns(const Matrix& x) {
    require_finite(x, "center_columns");
    ColumnStats stats;
    if (x.rows() == 0) {
        stats.means = RowVector::Zero(x.cols());
        return {x, stats};
    }
    stats.means = x.colwise().mean();
    Matrix centered = x.rowwise() - stats.means;
    // A second pass removes the rounding left by the first mean.
    const RowVector correction = centered.colwise().mean();
    centered.rowwise() -= correction;
    stats.means += correction;
    return {std::move(centered), std::move(stats)};
}

Matrix apply_centering(const Matrix& x, const ColumnStats& stats) {
    if (x.cols() != stats.means.size()) {
        throw InvalidArgument("apply_centering: width does not match stored means");
    }
    return x.rowwise() - stats.means;
}

Matrix undo_centering(const Matrix& xc, const ColumnStats& stats) {
    if (xc.cols() != stats.means.size()) {
        throw InvalidArgument("undo_centering: width does not match stored means");
    }
    return xc.rowwise() + stats.means;
}

double frobenius_sq(const Matrix& x) {
    return x.squaredNorm();
}

Matrix pseudo_inverse(const Matrix& a) {
    if (a.size() == 0) {
        return Matrix::Zero(a.cols(), a.rows());
    }
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const double cutoff = static_cast<double>(std::max(a.rows(), a.cols())) *
                          (s.size() > 0 ? s(0) : 0.0) *
                          std::numeric_limits<double>::epsilon();
    Vector inv = Vector::Zero(s.size());
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > cutoff) {
            inv(i) = 1.0 / s(i);
        }
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

LeastSquaresFit least_squares_reconstruct(const Matrix& t, const Matrix& x) {
    if (t.rows() != x.rows()) {
        throw InvalidArgument("least_squares_reconstruct: T has " + std::to_string(t.rows()) +
                              " rows, X has " + std::to_string(x.rows()));
    }
    LeastSquaresFit fit;
    fit.coefficients = pseudo_inverse(t) * x;
    fit.reconstruction = t * fit.coefficients;
    return fit;
}

double variance_explained(const Matrix& x, const Matrix& xhat) {
    require_same_shape(x, xhat, "variance_explained");
    const double total = frobenius_sq(x);
    if (!(total > 0.0)) {
        throw InvalidArgument("variance_explained: X has zero norm");
    }
    return 100.0 * (1.0 - (x - xhat).squaredNorm() / total);
}

double mse(const Matrix& x, const Matrix& xhat) {
    require_same_shape(x, xhat, "mse");
    if (x.size() == 0) {
        throw InvalidArgument("mse: empty matrix");
    }
    return (x - xhat).squaredNorm() / static_cast<double>(x.size());
}

ReconstructionMetrics reconstruction_metrics(const Matrix& x, const Matrix& xhat) {
    ReconstructionMetrics r;
    r.v_ex = variance_explained(x, xhat);
    r.m_se = mse(x, xhat);
    r.alpha = frobenius_sq(x) / (100.0 * static_cast<double>(x.size()));
    return r;
}

Matrix select_rows(const Matrix& x, std::span<const Index> rows) {
    Matrix out(static_cast<Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Index>(i)) = x.row(rows[i]);
    }
    return out;
}

Matrix select_columns(const Matrix& x, std::span<const Index> cols) {
    Matrix out(x.rows(), static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        out.col(static_cast<Index>(j)) = x.col(cols[j]);
    }
    return out;
}

} // namespace linrecover
