#include "linrecover/pca.hpp"

#include "linrecover/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace linrecover {

PcaModel fit_pca(const Matrix& xc) {
    require_finite(xc, "fit_pca");
    PcaModel model;
    const Index v = xc.cols();
    if (xc.size() == 0) {
        model.loadings = Matrix::Zero(v, 0);
        model.component_variances = Vector::Zero(0);
        model.cumulative_vex = Vector::Zero(0);
        return model;
    }

    Eigen::BDCSVD<Matrix> svd(xc, Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const double cutoff = static_cast<double>(v) * (s.size() > 0 ? s(0) : 0.0) * 1e-12;
    Index r = 0;
    while (r < s.size() && s(r) > cutoff) {
        ++r;
    }

    model.loadings = svd.matrixV().leftCols(r);
    for (Index j = 0; j < r; ++j) {
        Index arg = 0;
        double best = -1.0;
        for (Index i = 0; i < v; ++i) {
            const double a = std::abs(model.loadings(i, j));
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (model.loadings(arg, j) < 0.0) {
            model.loadings.col(j) *= -1.0;
        }
    }

    const double denom = xc.rows() > 1 ? static_cast<double>(xc.rows() - 1) : 1.0;
    model.component_variances = s.head(r).array().square() / denom;

    const double total = frobenius_sq(xc);
    model.cumulative_vex.resize(r);
    double acc = 0.0;
    for (Index j = 0; j < r; ++j) {
        acc += s(j) * s(j);
        model.cumulative_vex(j) = std::min(100.0, 100.0 * (1.0 - (total - acc) / total));
    }
    return model;
}

Matrix pca_scores(const PcaModel& model, const Matrix& xc, Index k) {
    if (k < 1 || k > model.rank()) {
        throw InvalidArgument("pca_scores: k=" + std::to_string(k) + " outside [1, " +
                              std::to_string(model.rank()) + "]");
    }
    if (xc.cols() != model.loadings.rows()) {
        throw InvalidArgument("pca_scores: data width does not match loadings");
    }
    return xc * model.loadings.leftCols(k);
}

Matrix pca_reconstruct(const PcaModel& model, const Matrix& scores) {
    if (scores.cols() > model.rank()) {
        throw InvalidArgument("pca_reconstruct: score width " + std::to_string(scores.cols()) +
                              " exceeds rank " + std::to_string(model.rank()));
    }
    return scores * model.loadings.leftCols(scores.cols()).transpose();
}

Index components_for_threshold(const PcaModel& model, double tau) {
    for (Index k = 0; k < model.rank(); ++k) {
        if (model.cumulative_vex(k) >= tau) {
            return k + 1;
        }
    }
    return model.rank();
}

} // namespace linrecover
