#include "linrecover/selection.hpp"

#include "linrecover/errors.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace linrecover {

namespace {

// Columns whose residual norm falls below this fraction of their original norm
// are treated as lying in the span of the current subset.
constexpr double kSpanTolerance = 1e-10;

// Orthonormal basis of a column subset plus the residual X - Q Q^T X.
class SubsetBasis {
public:
    explicit SubsetBasis(const Matrix& x)
        : x_(x), total_(x.squaredNorm()), basis_(x.rows(), 0), residual_(x),
          column_norm_sq_(x.colwise().squaredNorm().transpose()) {
        const double floor = total_ * std::numeric_limits<double>::epsilon() *
                             std::numeric_limits<double>::epsilon();
        zero_variance_.resize(x.cols());
        for (Index c = 0; c < x.cols(); ++c) {
            zero_variance_[static_cast<std::size_t>(c)] = column_norm_sq_(c) <= floor;
        }
    }

    double total() const { return total_; }
    double vex() const { return 100.0 * (1.0 - residual_.squaredNorm() / total_); }
    bool zero_variance(Index c) const { return zero_variance_[static_cast<std::size_t>(c)]; }

    // Drop in ||X - Q Q^T X||^2 if column c were added next.
    Vector gains() const {
        const Matrix gram = residual_.transpose() * residual_;
        Vector g = Vector::Zero(x_.cols());
        for (Index c = 0; c < x_.cols(); ++c) {
            const double d = gram(c, c);
            if (d > kSpanTolerance * kSpanTolerance * column_norm_sq_(c) && d > 0.0) {
                g(c) = gram.col(c).squaredNorm() / d;
            }
        }
        return g;
    }

    void add(Index c) {
        Vector q = residual_.col(c);
        const double d = q.squaredNorm();
        if (!(d > kSpanTolerance * kSpanTolerance * column_norm_sq_(c)) || d == 0.0) {
            return; // already spanned, contributes nothing
        }
        if (basis_.cols() > 0) {
            q -= basis_ * (basis_.transpose() * q);
        }
        q.normalize();
        basis_.conservativeResize(Eigen::NoChange, basis_.cols() + 1);
        basis_.col(basis_.cols() - 1) = q;
        residual_.noalias() -= q * (q.transpose() * residual_);
    }

private:
    const Matrix& x_;
    double total_;
    Matrix basis_;
    Matrix residual_;
    Vector column_norm_sq_;
    std::vector<bool> zero_variance_;
};

// Best candidate among columns with allowed[c]: nonzero-variance columns first,
// then largest gain, then lowest index.
Index pick_candidate(const SubsetBasis& basis, const Vector& gains,
                     const std::vector<bool>& allowed) {
    Index best = -1;
    bool best_zero = true;
    for (Index c = 0; c < gains.size(); ++c) {
        if (!allowed[static_cast<std::size_t>(c)]) {
            continue;
        }
        const bool zero = basis.zero_variance(c);
        if (best < 0 || (best_zero && !zero) || (zero == best_zero && gains(c) > gains(best))) {
            best = c;
            best_zero = zero;
        }
    }
    return best;
}

void check_input(const Matrix& xc, const char* what) {
    require_finite(xc, what);
    if (xc.rows() < 1 || xc.cols() < 1) {
        throw InvalidArgument(std::string(what) + ": empty data matrix");
    }
    if (!(xc.squaredNorm() > 0.0)) {
        throw InvalidArgument(std::string(what) + ": data matrix has zero norm");
    }
}

void finalize(const Matrix& xc, SelectionModel& model) {
    SubsetBasis basis(xc);
    model.vex_profile.clear();
    for (Index c : model.indices) {
        basis.add(c);
        model.vex_profile.push_back(basis.vex());
    }
    model.coefficients =
        least_squares_reconstruct(select_columns(xc, model.indices), xc).coefficients;
}

// Replaces each position once; returns true if any position changed.
bool backward_pass(const Matrix& xc, std::vector<Index>& indices) {
    const Index v = xc.cols();
    bool changed = false;
    for (std::size_t pos = 0; pos < indices.size(); ++pos) {
        SubsetBasis basis(xc);
        std::vector<bool> allowed(static_cast<std::size_t>(v), true);
        for (std::size_t other = 0; other < indices.size(); ++other) {
            if (other != pos) {
                basis.add(indices[other]);
                allowed[static_cast<std::size_t>(indices[other])] = false;
            }
        }
        const Vector gains = basis.gains();
        const Index current = indices[pos];
        const Index best = pick_candidate(basis, gains, allowed);
        const double margin = 1e-12 * basis.total();
        const bool better_class = basis.zero_variance(current) && !basis.zero_variance(best);
        if (best != current && (better_class || gains(best) > gains(current) + margin)) {
            indices[pos] = best;
            changed = true;
        }
    }
    return changed;
}

void check_model(const Matrix& xc, const SelectionModel& model, const char* what) {
    std::vector<bool> seen(static_cast<std::size_t>(xc.cols()), false);
    for (Index c : model.indices) {
        if (c < 0 || c >= xc.cols() || seen[static_cast<std::size_t>(c)]) {
            throw InvalidArgument(std::string(what) + ": invalid or repeated index " +
                                  std::to_string(c));
        }
        seen[static_cast<std::size_t>(c)] = true;
    }
}

} // namespace

SelectionModel fsca_select(const Matrix& xc, Index k) {
    check_input(xc, "fsca_select");
    const Index v = xc.cols();
    if (k < 1 || k > v) {
        throw InvalidArgument("fsca_select: k=" + std::to_string(k) + " outside [1, " +
                              std::to_string(v) + "]");
    }
    SelectionModel model;
    SubsetBasis basis(xc);
    std::vector<bool> allowed(static_cast<std::size_t>(v), true);
    for (Index step = 0; step < k; ++step) {
        const Index best = pick_candidate(basis, basis.gains(), allowed);
        allowed[static_cast<std::size_t>(best)] = false;
        model.indices.push_back(best);
        basis.add(best);
        model.vex_profile.push_back(basis.vex());
    }
    model.coefficients =
        least_squares_reconstruct(select_columns(xc, model.indices), xc).coefficients;
    return model;
}

SelectionModel spbr_refine(const Matrix& xc, const SelectionModel& model) {
    check_input(xc, "spbr_refine");
    check_model(xc, model, "spbr_refine");
    SelectionModel out;
    out.indices = model.indices;
    backward_pass(xc, out.indices);
    out.refinement_passes = 1;
    finalize(xc, out);
    return out;
}

SelectionModel mpbr_refine(const Matrix& xc, const SelectionModel& model,
                           std::size_t max_passes) {
    check_input(xc, "mpbr_refine");
    check_model(xc, model, "mpbr_refine");
    if (max_passes < 1) {
        throw InvalidArgument("mpbr_refine: max_passes must be >= 1");
    }
    SelectionModel out;
    out.indices = model.indices;
    std::size_t passes = 0;
    while (passes < max_passes) {
        ++passes;
        if (!backward_pass(xc, out.indices)) {
            break;
        }
    }
    out.refinement_passes = passes;
    finalize(xc, out);
    return out;
}

double subset_variance_explained(const Matrix& xc, const std::vector<Index>& indices) {
    const Matrix xhat = least_squares_reconstruct(select_columns(xc, indices), xc).reconstruction;
    return variance_explained(xc, xhat);
}

std::vector<double> selection_frequency(const std::vector<SelectionModel>& runs, Index v) {
    std::vector<double> freq(static_cast<std::size_t>(v), 0.0);
    if (runs.empty()) {
        return freq;
    }
    for (const auto& run : runs) {
        for (Index c : run.indices) {
            if (c < 0 || c >= v) {
                throw InvalidArgument("selection_frequency: index " + std::to_string(c) +
                                      " outside [0, " + std::to_string(v) + ")");
            }
            freq[static_cast<std::size_t>(c)] += 1.0;
        }
    }
    for (double& f : freq) {
        f /= static_cast<double>(runs.size());
    }
    return freq;
}

} // namespace linrecover
