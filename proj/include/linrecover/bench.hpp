#pragma once

// Monte Carlo benchmark harness: repeated random splits, every method fitted
// at every k on the fit rows, V_EX measured on held-out rows.

#include "linrecover/matrix_core.hpp"
#include "linrecover/neuralnet.hpp"
#include "linrecover/split.hpp"
#include "linrecover/synthgen.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace linrecover {

/// Rectangular numeric CSV, one sample per line. A first line that does not
/// parse as numbers is taken as a header. Errors carry line/column context.
Matrix load_csv(const std::filesystem::path& path);
Matrix parse_csv(const std::string& text, const std::string& source = "<string>");

/// Full-precision (17 significant digit) CSV with no header.
void write_csv(const std::filesystem::path& path, const Matrix& x);

inline const std::vector<std::string> kKnownMethods{"fsca",    "spbr",    "mpbr",    "fsca-rlc",
                                                   "pca-rlc", "fsca-sde", "pca"};

struct ExperimentConfig {
    std::string dataset;                      // label used in reports
    std::optional<std::string> csv_path;      // either a CSV file...
    std::optional<SynthConfig> synthetic;     // ...or the synthetic generator
    bool regenerate_synthetic = true;         // fresh synthetic draw per run
    std::vector<std::string> methods{"fsca"};
    std::vector<Index> k_values{1};
    std::size_t mc_runs = 1;
    double train_fraction = 70.0;
    double val_fraction_of_train = 20.0;
    double tau = 99.0;
    Index rlc_hidden = 6;
    std::vector<Index> sde_hidden_sizes{11, 21};
    std::size_t mpbr_max_passes = 100;
    TrainConfig train_cfg;
    std::uint64_t master_seed = 0;
    bool record_timing = true;                // false writes zero times (byte-stable reports)

    void validate() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);

struct RunRow {
    std::string method;
    Index k = 0;
    std::size_t run = 0;
    double vex_train = 0.0;
    double vex_test = 0.0;
    double fit_ms = 0.0;
    double fsca_ms = 0.0; // FSCA baseline time on the same run and k
    std::vector<Index> selected;
};

struct RunFailure {
    std::string method;
    Index k = 0;
    std::size_t run = 0;
    std::string message;
};

struct MethodStats {
    std::string method;
    Index k = 0;
    std::size_t runs_ok = 0;
    std::size_t failures = 0;
    double vex_mean = 0.0;
    double vex_std = 0.0;
    double vex_train_mean = 0.0;
    double vex_train_std = 0.0;
    double train_time_mean = 0.0;
    double train_time_std = 0.0;
    double time_ratio_vs_fsca = 0.0;      // ratio of mean times
    double time_ratio_per_run_mean = 0.0; // mean of per-run ratios
    std::vector<double> selection_frequency; // empty for non-selecting methods
};

struct RunReport {
    std::string dataset;
    Index v = 0;
    std::size_t mc_runs = 0;
    std::vector<RunRow> rows;          // ordered by run, then k, then method
    std::vector<RunFailure> failures;
    std::vector<MethodStats> stats;    // ordered by method (config order), then k

    const MethodStats* find(const std::string& method, Index k) const;
};

/// Runs every MC repetition (in parallel when threads > 1); the report does
/// not depend on thread count or scheduling except for wall times.
RunReport run_experiment(const ExperimentConfig& cfg, std::size_t threads = 1);

/// Recomputes per-(method, k) aggregates from the raw rows.
void aggregate(RunReport& report, const std::vector<std::string>& methods,
               const std::vector<Index>& k_values);

enum class ReportFormat { raw, aggregate, curves, frequency };

/// Writes raw_runs.csv, aggregate.json, curves.csv, selection_frequency.csv
/// and timing_ratios.csv (the last with raw). Floats use 9 significant digits.
void emit_report(const RunReport& report, const std::filesystem::path& out_dir,
                 const std::vector<ReportFormat>& formats = {ReportFormat::raw,
                                                             ReportFormat::aggregate,
                                                             ReportFormat::curves,
                                                             ReportFormat::frequency});

/// Aggregate document as written to aggregate.json.
nlohmann::ordered_json aggregate_to_json(const RunReport& report);

/// Default worker count: LINRECOVER_THREADS if set, else hardware concurrency.
std::size_t default_thread_count();

} // namespace linrecover
