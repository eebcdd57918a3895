#include "linrecover/synthgen.hpp"

#include "linrecover/errors.hpp"
#include "linrecover/random.hpp"

#include <cmath>

namespace linrecover {

namespace {

double sign(double x) {
    return static_cast<double>((x > 0.0) - (x < 0.0));
}

} // namespace

void SynthConfig::validate() const {
    if (m < 1) throw InvalidArgument("SynthConfig: m must be >= 1");
    if (v < 10) throw InvalidArgument("SynthConfig: v must be >= 10");
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
        throw InvalidArgument("SynthConfig: sigma2 must be finite and >= 0");
    }
}

double tansig(double x) {
    return 2.0 / (1.0 + std::exp(-2.0 * x)) - 1.0;
}

Matrix generate_xsynthetic(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    const double sd = std::sqrt(cfg.sigma2);
    const Index m = cfg.m;

    Matrix g(m, 3);
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < 3; ++j) {
            g(i, j) = rng.normal();
        }
    }
    Matrix n(m, 10);
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < 10; ++j) {
            n(i, j) = sd * rng.normal();
        }
    }

    Matrix x(m, cfg.v);
    for (Index i = 0; i < m; ++i) {
        const double g1 = g(i, 0);
        const double g2 = g(i, 1);
        const double g3 = g(i, 2);
        const double x1 = std::sin(g1) + n(i, 0);
        const double x2 = std::cos(g1) + n(i, 1);
        const double x3 = std::pow(x1, 7) + n(i, 2);
        const double x4 = sign(g1) * tansig(g1) + n(i, 3);
        const double x5 = std::sqrt(std::abs(x3) + std::abs(x1)) / 2.0 + n(i, 4);
        const double x6 = g1 * x1 * x1 * std::pow(x2, 3) + n(i, 5);
        const double x7 = std::pow(std::cos(10.0 * g2), 3) + n(i, 6);
        const double x8 = (std::abs(g2 / 3125.0) - std::exp(g2)) / 70.0 + n(i, 7);
        const double x9 = 1.0 / (2.0 + std::abs(g1) + std::exp(g2)) + n(i, 8);
        const double c3 = std::cos(g3);
        const double x10 = std::pow(g1, 3) * (g2 / 8.0) * (g3 / 8.0) *
                               std::exp(sign(g1) * g3) * c3 * c3 * (std::sin(g3) / 44.0) +
                           n(i, 9);
        x(i, 0) = x1;
        x(i, 1) = x2;
        x(i, 2) = x3;
        x(i, 3) = x4;
        x(i, 4) = x5;
        x(i, 5) = x6;
        x(i, 6) = x7;
        x(i, 7) = x8;
        x(i, 8) = x9;
        x(i, 9) = x10;
    }

    const Index linear = cfg.v - 10;
    if (linear > 0) {
        Matrix psi(10, linear);
        for (Index i = 0; i < 10; ++i) {
            for (Index j = 0; j < linear; ++j) {
                psi(i, j) = rng.normal();
            }
        }
        Matrix noise(m, linear);
        for (Index i = 0; i < m; ++i) {
            for (Index j = 0; j < linear; ++j) {
                noise(i, j) = sd * rng.normal();
            }
        }
        x.rightCols(linear) = x.leftCols(10) * psi + noise;
    }
    x.array() += kSynthOffset;
    require_finite(x, "generate_xsynthetic");
    return x;
}

bool group_recovery_check(const SelectionModel& selection) {
    bool first = false;
    bool second = false;
    bool third = false;
    for (Index c : selection.indices) {
        first = first || (c >= 0 && c <= 5);
        second = second || (c >= 6 && c <= 8);
        third = third || c == 9;
    }
    return first && second && third;
}

} // namespace linrecover
