#pragma once

#include "linrecover/matrix_core.hpp"

#include <cstdint>
#include <vector>

namespace linrecover {

struct RowSplit {
    std::vector<Index> train;
    std::vector<Index> val;
    std::vector<Index> test;
};

/// Seeded shuffle of 0..m-1 into train/val/test.
///
/// The fit portion is floor(m * train_fraction / 100) rows (train + val); val
/// is floor(fit * val_fraction_of_train / 100) rows carved from it; the rest
/// of the rows are test. Throws InvalidArgument if train or test would be
/// empty, or if a positive val fraction rounds to zero rows.
RowSplit split_rows(Index m, double train_fraction, double val_fraction_of_train,
                    std::uint64_t seed);

/// Train/val carve of m rows with no test portion.
RowSplit carve_validation(Index m, double val_fraction, std::uint64_t seed);

} // namespace linrecover
