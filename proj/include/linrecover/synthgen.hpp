#pragma once

// Synthetic benchmark data: ten nonlinearly related variables driven by three
// Gaussian generators, plus v-10 noisy linear mixtures of them, offset by 70.

#include "linrecover/matrix_core.hpp"
#include "linrecover/selection.hpp"

#include <cstdint>

namespace linrecover {

struct SynthConfig {
    Index m = 500;
    Index v = 50;
    double sigma2 = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

inline constexpr double kSynthOffset = 70.0;

/// 2 / (1 + exp(-2x)) - 1.
double tansig(double x);

/// Random draws come from one stream in this order: all generators (row-major
/// g1, g2, g3), all ten noise columns (row-major), the mixing map Psi
/// (row-major, 10 x (v-10)), then the noise matrix N (row-major).
Matrix generate_xsynthetic(const SynthConfig& cfg);

/// True iff the selection hits each variable group {0..5}, {6..8} and {9}.
bool group_recovery_check(const SelectionModel& selection);

} // namespace linrecover
