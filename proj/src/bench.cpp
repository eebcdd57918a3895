#include "linrecover/bench.hpp"

#include "linrecover/errors.hpp"
#include "linrecover/pca.hpp"
#include "linrecover/random.hpp"
#include "linrecover/rlc.hpp"
#include "linrecover/selection.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

namespace linrecover {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

bool is_selection_method(const std::string& m) {
    return m == "fsca" || m == "spbr" || m == "mpbr" || m == "fsca-rlc" || m == "fsca-sde";
}

std::string fmt9(double x) {
    if (!std::isfinite(x)) {
        return "nan";
    }
    return fmt::format("{:.9g}", x);
}

ordered_json json9(double x) {
    if (!std::isfinite(x)) {
        return nullptr;
    }
    return std::stod(fmt::format("{:.9g}", x));
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') {
            out += '"';
        }
    }
    return out + "\"";
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
    if (xs.empty()) {
        return {std::nan(""), std::nan("")};
    }
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

void audit_split(const RowSplit& split, Index m) {
    std::vector<int> owner(static_cast<std::size_t>(m), 0);
    for (const auto* part : {&split.train, &split.val, &split.test}) {
        for (Index r : *part) {
            if (r < 0 || r >= m || owner[static_cast<std::size_t>(r)]++ != 0) {
                throw std::logic_error("audit: split rows overlap or fall outside the data");
            }
        }
    }
    if (split.test.empty()) {
        throw std::logic_error("audit: no held-out rows");
    }
}

struct RunOutcome {
    std::vector<RunRow> rows;
    std::vector<RunFailure> failures;
};

struct Evaluated {
    Matrix fit_hat;  // centered reconstruction of the fit rows
    Matrix test_hat; // centered reconstruction of the test rows
    std::vector<Index> selected;
};

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Evaluated linear_selection(const Matrix& xc_fit, const Matrix& xc_test, const SelectionModel& sel) {
    return {select_columns(xc_fit, sel.indices) * sel.coefficients,
            select_columns(xc_test, sel.indices) * sel.coefficients, sel.indices};
}

RunOutcome run_once(const ExperimentConfig& cfg, const Matrix* shared_data, std::size_t run) {
    RunOutcome outcome;
    const std::uint64_t run_seed = derive_seed(cfg.master_seed, run);
    auto fail_all = [&](const std::string& msg) {
        for (Index k : cfg.k_values) {
            for (const auto& method : cfg.methods) {
                outcome.failures.push_back({method, k, run, msg});
            }
        }
    };

    Matrix x;
    RowSplit split;
    try {
        if (cfg.synthetic && (cfg.regenerate_synthetic || shared_data == nullptr)) {
            SynthConfig synth = *cfg.synthetic;
            if (cfg.regenerate_synthetic) {
                synth.seed = derive_seed(run_seed, 1);
            }
            x = generate_xsynthetic(synth);
        } else {
            x = *shared_data;
        }
        split = split_rows(x.rows(), cfg.train_fraction, cfg.val_fraction_of_train,
                           derive_seed(run_seed, 2));
        audit_split(split, x.rows());
    } catch (const std::exception& e) {
        fail_all(e.what());
        return outcome;
    }

    std::vector<Index> fit_rows = split.train;
    fit_rows.insert(fit_rows.end(), split.val.begin(), split.val.end());
    const Matrix x_fit = select_rows(x, fit_rows);
    const Matrix x_test = select_rows(x, split.test);
    RowSplit local;
    for (Index i = 0; i < x_fit.rows(); ++i) {
        (i < static_cast<Index>(split.train.size()) ? local.train : local.val).push_back(i);
    }
    if (x_fit.rows() != static_cast<Index>(split.train.size() + split.val.size())) {
        throw std::logic_error("audit: fit matrix contains rows outside train and val");
    }

    const auto [xc_fit, stats] = center_columns(x_fit);
    const Matrix xc_test = apply_centering(x_test, stats);

    for (Index k : cfg.k_values) {
        double fsca_ms = 0.0;
        std::optional<SelectionModel> fsca;
        try {
            const auto t0 = Clock::now();
            fsca = fsca_select(xc_fit, k);
            fsca_ms = elapsed_ms(t0);
        } catch (const std::exception&) {
            // reported per method below
        }

        for (const auto& method : cfg.methods) {
            const std::uint64_t fit_seed = derive_seed(run_seed, 1000 + static_cast<std::uint64_t>(k));
            try {
                Evaluated ev;
                double ms = 0.0;
                const auto t0 = Clock::now();
                if (method == "fsca") {
                    const SelectionModel sel = fsca ? *fsca : fsca_select(xc_fit, k);
                    ms = fsca_ms;
                    ev = linear_selection(xc_fit, xc_test, sel);
                } else if (method == "spbr") {
                    const SelectionModel sel = spbr_refine(xc_fit, fsca_select(xc_fit, k));
                    ms = elapsed_ms(t0);
                    ev = linear_selection(xc_fit, xc_test, sel);
                } else if (method == "mpbr") {
                    const SelectionModel sel =
                        mpbr_refine(xc_fit, fsca_select(xc_fit, k), cfg.mpbr_max_passes);
                    ms = elapsed_ms(t0);
                    ev = linear_selection(xc_fit, xc_test, sel);
                } else if (method == "pca") {
                    const PcaModel pca = fit_pca(xc_fit);
                    const Matrix scores = pca_scores(pca, xc_fit, k);
                    ms = elapsed_ms(t0);
                    ev.fit_hat = pca_reconstruct(pca, scores);
                    ev.test_hat = pca_reconstruct(pca, pca_scores(pca, xc_test, k));
                } else if (method == "fsca-rlc" || method == "pca-rlc") {
                    RlcConfig rc;
                    rc.k = k;
                    rc.tau = cfg.tau;
                    rc.hidden = cfg.rlc_hidden;
                    rc.train = cfg.train_cfg;
                    rc.train.seed = fit_seed;
                    const RlcModel model = method == "fsca-rlc" ? fit_fsca_rlc(x_fit, rc, local)
                                                                : fit_pca_rlc(x_fit, rc, local);
                    ms = elapsed_ms(t0);
                    ev.fit_hat = apply_centering(rlc_reconstruct(model, x_fit), stats);
                    ev.test_hat = apply_centering(rlc_reconstruct(model, x_test), stats);
                    if (model.encoder == EncoderKind::selection) {
                        ev.selected = model.selection.indices;
                    }
                } else if (method == "fsca-sde") {
                    SdeConfig sc;
                    sc.k = k;
                    sc.hidden_sizes = cfg.sde_hidden_sizes;
                    sc.train = cfg.train_cfg;
                    sc.train.seed = fit_seed;
                    const SdeModel model = fit_fsca_sde(x_fit, sc, local);
                    ms = elapsed_ms(t0);
                    ev.fit_hat = apply_centering(sde_reconstruct(model, x_fit), stats);
                    ev.test_hat = apply_centering(sde_reconstruct(model, x_test), stats);
                    ev.selected = model.selection.indices;
                } else {
                    throw InvalidArgument("unknown method '" + method + "'");
                }
                if (!fsca) {
                    throw InvalidArgument("FSCA baseline failed for k=" + std::to_string(k));
                }
                RunRow row;
                row.method = method;
                row.k = k;
                row.run = run;
                row.vex_train = variance_explained(xc_fit, ev.fit_hat);
                row.vex_test = variance_explained(xc_test, ev.test_hat);
                row.fit_ms = cfg.record_timing ? ms : 0.0;
                row.fsca_ms = cfg.record_timing ? fsca_ms : 0.0;
                row.selected = std::move(ev.selected);
                outcome.rows.push_back(std::move(row));
            } catch (const std::exception& e) {
                outcome.failures.push_back({method, k, run, e.what()});
            }
        }
    }
    return outcome;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

} // namespace

void ExperimentConfig::validate() const {
    if (csv_path.has_value() == synthetic.has_value()) {
        throw InvalidArgument("experiment: exactly one data source (csv or synthetic) is required");
    }
    if (synthetic) {
        synthetic->validate();
    }
    if (methods.empty()) {
        throw InvalidArgument("experiment: methods must not be empty");
    }
    std::set<std::string> seen;
    for (const auto& m : methods) {
        if (std::find(kKnownMethods.begin(), kKnownMethods.end(), m) == kKnownMethods.end()) {
            throw InvalidArgument("experiment: unknown method '" + m + "'");
        }
        if (!seen.insert(m).second) {
            throw InvalidArgument("experiment: duplicate method '" + m + "'");
        }
    }
    if (k_values.empty()) {
        throw InvalidArgument("experiment: k_values must not be empty");
    }
    for (std::size_t i = 0; i < k_values.size(); ++i) {
        if (k_values[i] < 1 || (i > 0 && k_values[i] <= k_values[i - 1])) {
            throw InvalidArgument("experiment: k_values must be positive and strictly ascending");
        }
    }
    if (synthetic && k_values.back() > synthetic->v) {
        throw InvalidArgument("experiment: k_values exceed the number of variables");
    }
    if (mc_runs < 1) {
        throw InvalidArgument("experiment: mc_runs must be >= 1");
    }
    if (!(train_fraction > 0.0 && train_fraction < 100.0)) {
        throw InvalidArgument("experiment: train_fraction must lie in (0, 100)");
    }
    if (!(val_fraction_of_train >= 0.0 && val_fraction_of_train < 100.0)) {
        throw InvalidArgument("experiment: val_fraction_of_train must lie in [0, 100)");
    }
    if (!(tau > 0.0 && tau <= 100.0)) {
        throw InvalidArgument("experiment: tau must lie in (0, 100]");
    }
    if (rlc_hidden < 1) {
        throw InvalidArgument("experiment: rlc_hidden must be >= 1");
    }
    if (sde_hidden_sizes.empty()) {
        throw InvalidArgument("experiment: sde_hidden_sizes must not be empty");
    }
    if (mpbr_max_passes < 1) {
        throw InvalidArgument("experiment: mpbr_max_passes must be >= 1");
    }
    train_cfg.validate();
}

ExperimentConfig experiment_config_from_json(const json& j) {
    static const std::set<std::string> known{
        "dataset",    "data_source",   "regenerate_synthetic", "methods",
        "k_values",   "mc_runs",       "train_fraction",       "val_fraction_of_train",
        "tau",        "rlc_hidden",    "sde_hidden_sizes",     "mpbr_max_passes",
        "train_cfg",  "master_seed",   "record_timing"};
    try {
        if (!j.is_object()) {
            throw InvalidArgument("experiment config must be a JSON object");
        }
        for (const auto& [key, value] : j.items()) {
            if (!known.contains(key)) {
                throw InvalidArgument("experiment config: unknown field '" + key + "'");
            }
        }
        ExperimentConfig cfg;
        const json& src = j.at("data_source");
        const auto type = src.at("type").get<std::string>();
        if (type == "csv") {
            cfg.csv_path = src.at("path").get<std::string>();
        } else if (type == "synthetic") {
            SynthConfig s;
            s.m = get_or<Index>(src, "m", s.m);
            s.v = get_or<Index>(src, "v", s.v);
            s.sigma2 = get_or<double>(src, "sigma2", s.sigma2);
            s.seed = get_or<std::uint64_t>(src, "seed", s.seed);
            cfg.synthetic = s;
        } else {
            throw InvalidArgument("experiment config: data_source.type must be csv or synthetic");
        }
        cfg.dataset = get_or<std::string>(j, "dataset", type == "csv" ? std::filesystem::path(*cfg.csv_path).stem().string()
                                                                      : std::string("xsynthetic"));
        cfg.regenerate_synthetic = get_or<bool>(j, "regenerate_synthetic", cfg.regenerate_synthetic);
        cfg.methods = get_or<std::vector<std::string>>(j, "methods", cfg.methods);
        cfg.k_values = get_or<std::vector<Index>>(j, "k_values", cfg.k_values);
        cfg.mc_runs = get_or<std::size_t>(j, "mc_runs", cfg.mc_runs);
        cfg.train_fraction = get_or<double>(j, "train_fraction", cfg.train_fraction);
        cfg.val_fraction_of_train = get_or<double>(j, "val_fraction_of_train", cfg.val_fraction_of_train);
        cfg.tau = get_or<double>(j, "tau", cfg.tau);
        cfg.rlc_hidden = get_or<Index>(j, "rlc_hidden", cfg.rlc_hidden);
        cfg.sde_hidden_sizes = get_or<std::vector<Index>>(j, "sde_hidden_sizes", cfg.sde_hidden_sizes);
        cfg.mpbr_max_passes = get_or<std::size_t>(j, "mpbr_max_passes", cfg.mpbr_max_passes);
        cfg.master_seed = get_or<std::uint64_t>(j, "master_seed", cfg.master_seed);
        cfg.record_timing = get_or<bool>(j, "record_timing", cfg.record_timing);
        if (j.contains("train_cfg")) {
            const json& t = j.at("train_cfg");
            TrainConfig& tc = cfg.train_cfg;
            tc.max_epochs = get_or<std::size_t>(t, "max_epochs", tc.max_epochs);
            tc.learning_rate = get_or<double>(t, "learning_rate", tc.learning_rate);
            tc.batch_size = get_or<std::size_t>(t, "batch_size", tc.batch_size);
            tc.patience = get_or<std::size_t>(t, "patience", tc.patience);
            tc.lambda_l2 = get_or<double>(t, "lambda_l2", tc.lambda_l2);
            tc.gamma_sparsity = get_or<double>(t, "gamma_sparsity", tc.gamma_sparsity);
            tc.rho_target = get_or<double>(t, "rho_target", tc.rho_target);
            tc.seed = get_or<std::uint64_t>(t, "seed", tc.seed);
        }
        cfg.validate();
        return cfg;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("experiment config: ") + e.what());
    }
}

json experiment_config_to_json(const ExperimentConfig& cfg) {
    json src;
    if (cfg.csv_path) {
        src = {{"type", "csv"}, {"path", *cfg.csv_path}};
    } else if (cfg.synthetic) {
        src = {{"type", "synthetic"},
               {"m", cfg.synthetic->m},
               {"v", cfg.synthetic->v},
               {"sigma2", cfg.synthetic->sigma2},
               {"seed", cfg.synthetic->seed}};
    }
    const TrainConfig& t = cfg.train_cfg;
    return {{"dataset", cfg.dataset},
            {"data_source", src},
            {"regenerate_synthetic", cfg.regenerate_synthetic},
            {"methods", cfg.methods},
            {"k_values", cfg.k_values},
            {"mc_runs", cfg.mc_runs},
            {"train_fraction", cfg.train_fraction},
            {"val_fraction_of_train", cfg.val_fraction_of_train},
            {"tau", cfg.tau},
            {"rlc_hidden", cfg.rlc_hidden},
            {"sde_hidden_sizes", cfg.sde_hidden_sizes},
            {"mpbr_max_passes", cfg.mpbr_max_passes},
            {"master_seed", cfg.master_seed},
            {"record_timing", cfg.record_timing},
            {"train_cfg",
             {{"max_epochs", t.max_epochs},
              {"learning_rate", t.learning_rate},
              {"batch_size", t.batch_size},
              {"patience", t.patience},
              {"lambda_l2", t.lambda_l2},
              {"gamma_sparsity", t.gamma_sparsity},
              {"rho_target", t.rho_target},
              {"seed", t.seed}}}};
}

const MethodStats* RunReport::find(const std::string& method, Index k) const {
    for (const auto& s : stats) {
        if (s.method == method && s.k == k) {
            return &s;
        }
    }
    return nullptr;
}

void aggregate(RunReport& report, const std::vector<std::string>& methods,
               const std::vector<Index>& k_values) {
    report.stats.clear();
    for (const auto& method : methods) {
        for (Index k : k_values) {
            MethodStats s;
            s.method = method;
            s.k = k;
            std::vector<double> vex, vex_train, times, ratios;
            double fsca_time_sum = 0.0;
            std::vector<SelectionModel> selections;
            for (const auto& row : report.rows) {
                if (row.method != method || row.k != k) {
                    continue;
                }
                vex.push_back(row.vex_test);
                vex_train.push_back(row.vex_train);
                times.push_back(row.fit_ms);
                fsca_time_sum += row.fsca_ms;
                ratios.push_back(method == "fsca" ? 1.0
                                 : row.fsca_ms > 0.0 ? row.fit_ms / row.fsca_ms
                                                     : std::nan(""));
                if (!row.selected.empty()) {
                    SelectionModel sel;
                    sel.indices = row.selected;
                    selections.push_back(std::move(sel));
                }
            }
            for (const auto& f : report.failures) {
                s.failures += (f.method == method && f.k == k) ? 1 : 0;
            }
            s.runs_ok = vex.size();
            std::tie(s.vex_mean, s.vex_std) = mean_std(vex);
            std::tie(s.vex_train_mean, s.vex_train_std) = mean_std(vex_train);
            std::tie(s.train_time_mean, s.train_time_std) = mean_std(times);
            if (method == "fsca") {
                s.time_ratio_vs_fsca = 1.0;
            } else if (fsca_time_sum > 0.0 && !times.empty()) {
                s.time_ratio_vs_fsca =
                    s.train_time_mean / (fsca_time_sum / static_cast<double>(times.size()));
            } else {
                s.time_ratio_vs_fsca = std::nan("");
            }
            s.time_ratio_per_run_mean = mean_std(ratios).first;
            if (is_selection_method(method) && !selections.empty()) {
                s.selection_frequency = selection_frequency(selections, report.v);
            }
            report.stats.push_back(std::move(s));
        }
    }
}

RunReport run_experiment(const ExperimentConfig& cfg, std::size_t threads) {
    cfg.validate();
    RunReport report;
    report.dataset = cfg.dataset;
    report.mc_runs = cfg.mc_runs;

    std::optional<Matrix> shared;
    if (cfg.csv_path) {
        shared = load_csv(*cfg.csv_path);
        report.v = shared->cols();
        if (cfg.k_values.back() > report.v) {
            throw InvalidArgument("experiment: k_values exceed the " + std::to_string(report.v) +
                                  " columns of " + *cfg.csv_path);
        }
    } else {
        report.v = cfg.synthetic->v;
        if (!cfg.regenerate_synthetic) {
            shared = generate_xsynthetic(*cfg.synthetic);
        }
    }

    std::vector<RunOutcome> outcomes(cfg.mc_runs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < cfg.mc_runs; r = next++) {
            try {
                outcomes[r] = run_once(cfg, shared ? &*shared : nullptr, r);
            } catch (const std::exception& e) {
                outcomes[r] = {};
                for (Index k : cfg.k_values) {
                    for (const auto& method : cfg.methods) {
                        outcomes[r].failures.push_back({method, k, r, e.what()});
                    }
                }
            }
        }
    };
    const std::size_t n_threads = std::clamp<std::size_t>(threads, 1, cfg.mc_runs);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    for (auto& o : outcomes) {
        for (auto& row : o.rows) report.rows.push_back(std::move(row));
        for (auto& f : o.failures) report.failures.push_back(std::move(f));
    }
    aggregate(report, cfg.methods, cfg.k_values);
    return report;
}

ordered_json aggregate_to_json(const RunReport& report) {
    ordered_json methods = ordered_json::object();
    for (const auto& s : report.stats) {
        ordered_json entry = {{"runs_ok", s.runs_ok},
                              {"failures", s.failures},
                              {"vex_mean", json9(s.vex_mean)},
                              {"vex_std", json9(s.vex_std)},
                              {"vex_train_mean", json9(s.vex_train_mean)},
                              {"vex_train_std", json9(s.vex_train_std)},
                              {"train_time_mean_ms", json9(s.train_time_mean)},
                              {"train_time_std_ms", json9(s.train_time_std)},
                              {"time_ratio_vs_fsca", json9(s.time_ratio_vs_fsca)},
                              {"time_ratio_per_run_mean", json9(s.time_ratio_per_run_mean)}};
        if (!s.selection_frequency.empty()) {
            ordered_json freq = ordered_json::array();
            for (double f : s.selection_frequency) freq.push_back(json9(f));
            entry["selection_frequency"] = std::move(freq);
        }
        methods[s.method][std::to_string(s.k)] = std::move(entry);
    }
    ordered_json failures = ordered_json::array();
    for (const auto& f : report.failures) {
        failures.push_back({{"method", f.method}, {"k", f.k}, {"run", f.run}, {"message", f.message}});
    }
    return {{"format_version", 1},
            {"dataset", report.dataset},
            {"v", report.v},
            {"mc_runs", report.mc_runs},
            {"failure_count", report.failures.size()},
            {"methods", std::move(methods)},
            {"failures", std::move(failures)}};
}

void emit_report(const RunReport& report, const std::filesystem::path& out_dir,
                 const std::vector<ReportFormat>& formats) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    }
    auto open = [&](const char* name) {
        const auto path = out_dir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw IoError("cannot write " + path.string());
        }
        return out;
    };
    auto close = [&](std::ofstream& out, const char* name) {
        out.close();
        if (!out) {
            throw IoError("write failed for " + (out_dir / name).string());
        }
    };
    auto wants = [&](ReportFormat f) {
        return std::find(formats.begin(), formats.end(), f) != formats.end();
    };
    const std::string ds = csv_field(report.dataset);

    if (wants(ReportFormat::raw)) {
        auto out = open("raw_runs.csv");
        out << "dataset,method,k,run,vex_train,vex_test,fit_ms\n";
        for (const auto& r : report.rows) {
            out << fmt::format("{},{},{},{},{},{},{}\n", ds, r.method, r.k, r.run,
                               fmt9(r.vex_train), fmt9(r.vex_test), fmt9(r.fit_ms));
        }
        close(out, "raw_runs.csv");

        auto ratios = open("timing_ratios.csv");
        ratios << "dataset,method,k,run,fit_ms,fsca_ms,ratio_vs_fsca\n";
        for (const auto& r : report.rows) {
            const double ratio = r.method == "fsca"  ? 1.0
                                 : r.fsca_ms > 0.0   ? r.fit_ms / r.fsca_ms
                                                     : std::nan("");
            ratios << fmt::format("{},{},{},{},{},{},{}\n", ds, r.method, r.k, r.run,
                                  fmt9(r.fit_ms), fmt9(r.fsca_ms), fmt9(ratio));
        }
        close(ratios, "timing_ratios.csv");
    }
    if (wants(ReportFormat::aggregate)) {
        auto out = open("aggregate.json");
        out << aggregate_to_json(report).dump(2) << '\n';
        close(out, "aggregate.json");
    }
    if (wants(ReportFormat::curves)) {
        auto out = open("curves.csv");
        out << "dataset,method,k,runs_ok,failures,vex_mean,vex_std,vex_train_mean,vex_train_std,"
               "time_mean_ms,time_std_ms,time_ratio_vs_fsca\n";
        for (const auto& s : report.stats) {
            out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", ds, s.method, s.k,
                               s.runs_ok, s.failures, fmt9(s.vex_mean), fmt9(s.vex_std),
                               fmt9(s.vex_train_mean), fmt9(s.vex_train_std),
                               fmt9(s.train_time_mean), fmt9(s.train_time_std),
                               fmt9(s.time_ratio_vs_fsca));
        }
        close(out, "curves.csv");
    }
    if (wants(ReportFormat::frequency)) {
        auto out = open("selection_frequency.csv");
        out << "dataset,method,k,variable,frequency\n";
        for (const auto& s : report.stats) {
            for (std::size_t c = 0; c < s.selection_frequency.size(); ++c) {
                out << fmt::format("{},{},{},{},{}\n", ds, s.method, s.k, c,
                                   fmt9(s.selection_frequency[c]));
            }
        }
        close(out, "selection_frequency.csv");
    }
}

std::size_t default_thread_count() {
    if (const char* env = std::getenv("LINRECOVER_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0) {
            return static_cast<std::size_t>(n);
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

} // namespace linrecover
