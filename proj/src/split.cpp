#include "linrecover/split.hpp"

#include "linrecover/errors.hpp"
#include "linrecover/random.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace linrecover {

namespace {

Index floor_percent(Index n, double percent) {
    // The small bias keeps exact products such as 10 * 70 / 100 from rounding down.
    return static_cast<Index>(std::floor(static_cast<double>(n) * percent / 100.0 + 1e-9));
}

std::vector<Index> shuffled(Index m, std::uint64_t seed) {
    std::vector<Index> rows(static_cast<std::size_t>(m));
    std::iota(rows.begin(), rows.end(), Index{0});
    Rng rng(seed);
    rng.shuffle(std::span<Index>(rows));
    return rows;
}

} // namespace

RowSplit split_rows(Index m, double train_fraction, double val_fraction_of_train,
                    std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 100.0)) {
        throw InvalidArgument("split_rows: train_fraction must lie in (0, 100), got " +
                              std::to_string(train_fraction));
    }
    if (!(val_fraction_of_train >= 0.0 && val_fraction_of_train < 100.0)) {
        throw InvalidArgument("split_rows: val_fraction_of_train must lie in [0, 100)");
    }
    const Index fit = floor_percent(m, train_fraction);
    const Index val = floor_percent(fit, val_fraction_of_train);
    const Index train = fit - val;
    const Index test = m - fit;
    if (train < 1 || test < 1 || (val_fraction_of_train > 0.0 && val < 1)) {
        throw InvalidArgument("split_rows: empty partition (train=" + std::to_string(train) +
                              ", val=" + std::to_string(val) + ", test=" + std::to_string(test) +
                              ")");
    }
    const std::vector<Index> rows = shuffled(m, seed);
    RowSplit s;
    s.train.assign(rows.begin(), rows.begin() + train);
    s.val.assign(rows.begin() + train, rows.begin() + fit);
    s.test.assign(rows.begin() + fit, rows.end());
    return s;
}

RowSplit carve_validation(Index m, double val_fraction, std::uint64_t seed) {
    if (!(val_fraction >= 0.0 && val_fraction < 100.0)) {
        throw InvalidArgument("carve_validation: val_fraction must lie in [0, 100)");
    }
    const Index val = floor_percent(m, val_fraction);
    if (m - val < 1) {
        throw InvalidArgument("carve_validation: no training rows left");
    }
    const std::vector<Index> rows = shuffled(m, seed);
    RowSplit s;
    s.train.assign(rows.begin(), rows.begin() + (m - val));
    s.val.assign(rows.begin() + (m - val), rows.end());
    return s;
}

} // namespace linrecover
