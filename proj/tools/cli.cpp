#include "cli.hpp"

#include "linrecover/bench.hpp"
#include "linrecover/errors.hpp"
#include "linrecover/rlc.hpp"
#include "linrecover/random.hpp"
#include "linrecover/selection.hpp"
#include "linrecover/serialize.hpp"
#include "linrecover/split.hpp"
#include "linrecover/synthgen.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <ostream>
#include <sstream>

namespace linrecover::cli {

namespace {

struct GenArgs {
    Index m = 500;
    Index v = 50;
    double sigma2 = 0.0;
    std::uint64_t seed = 0;
    std::string out;
};

struct SelectArgs {
    std::string in;
    std::string method = "fsca";
    Index k = 1;
    std::size_t max_passes = 100;
    std::string out;
};

struct FitArgs {
    std::string in;
    std::string model = "fsca-rlc";
    Index k = 3;
    double tau = 99.0;
    std::string hidden;
    std::size_t epochs = 1000;
    std::uint64_t seed = 0;
    double train_fraction = 70.0;
    double val_fraction = 20.0;
    double learning_rate = TrainConfig{}.learning_rate;
    std::size_t batch_size = TrainConfig{}.batch_size;
    std::size_t patience = TrainConfig{}.patience;
    double gamma = TrainConfig{}.gamma_sparsity;
    std::string out;
};

struct BenchArgs {
    std::string config;
    std::string out_dir;
    std::size_t threads = 0;
};

struct ReportArgs {
    std::string in_dir;
};

std::vector<Index> parse_sizes(const std::string& text) {
    std::vector<Index> sizes;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const long long n = std::stoll(item, &used);
            if (used != item.size() || n < 1) {
                throw std::invalid_argument(item);
            }
            sizes.push_back(static_cast<Index>(n));
        } catch (const std::logic_error&) {
            throw InvalidArgument("--hidden expects positive integers separated by commas, got '" +
                                  text + "'");
        }
    }
    if (sizes.empty()) {
        throw InvalidArgument("--hidden must not be empty");
    }
    return sizes;
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
    SynthConfig cfg{a.m, a.v, a.sigma2, a.seed};
    const Matrix x = generate_xsynthetic(cfg);
    write_csv(a.out, x);
    out << fmt::format("wrote {}x{} synthetic matrix (sigma2={}, seed={}) to {}\n", x.rows(),
                       x.cols(), a.sigma2, a.seed, a.out);
    return kOk;
}

int cmd_select(const SelectArgs& a, std::ostream& out) {
    const Matrix x = load_csv(a.in);
    const auto [xc, stats] = center_columns(x);
    SelectionModel sel = fsca_select(xc, a.k);
    if (a.method == "spbr") {
        sel = spbr_refine(xc, sel);
    } else if (a.method == "mpbr") {
        sel = mpbr_refine(xc, sel, a.max_passes);
    }
    nlohmann::json doc = selection_to_json(sel);
    doc["method"] = a.method;
    doc["k"] = a.k;
    doc["column_means"] = std::vector<double>(stats.means.data(),
                                              stats.means.data() + stats.means.size());
    write_json_file(a.out, doc);
    std::string idx;
    for (Index c : sel.indices) {
        idx += (idx.empty() ? "" : " ") + std::to_string(c);
    }
    out << fmt::format("{} k={} indices=[{}] vex={:.6f}\n", a.method, a.k, idx, sel.vex());
    return kOk;
}

int cmd_fit(const FitArgs& a, std::ostream& out) {
    if (a.epochs == 0 && a.model == "fsca-sde") {
        throw InvalidArgument("--epochs 0 is only supported for RLC models");
    }
    const Matrix x = load_csv(a.in);
    const RowSplit split = split_rows(x.rows(), a.train_fraction, a.val_fraction, a.seed);
    std::vector<Index> fit_rows = split.train;
    fit_rows.insert(fit_rows.end(), split.val.begin(), split.val.end());
    const Matrix x_fit = select_rows(x, fit_rows);
    const Matrix x_test = select_rows(x, split.test);
    RowSplit local;
    for (Index i = 0; i < x_fit.rows(); ++i) {
        (i < static_cast<Index>(split.train.size()) ? local.train : local.val).push_back(i);
    }

    TrainConfig tc;
    tc.max_epochs = std::max<std::size_t>(a.epochs, 1);
    tc.learning_rate = a.learning_rate;
    tc.batch_size = a.batch_size;
    tc.patience = a.patience;
    tc.gamma_sparsity = a.gamma;
    tc.seed = derive_seed(a.seed, 1);

    nlohmann::json doc;
    Matrix fit_hat;
    Matrix test_hat;
    ColumnStats means;
    if (a.model == "fsca-rlc" || a.model == "pca-rlc") {
        RlcConfig rc;
        rc.k = a.k;
        rc.tau = a.tau;
        rc.hidden = a.hidden.empty() ? 6 : parse_sizes(a.hidden).front();
        rc.train = tc;
        rc.train_network = a.epochs > 0;
        const RlcModel model = a.model == "fsca-rlc" ? fit_fsca_rlc(x_fit, rc, local)
                                                     : fit_pca_rlc(x_fit, rc, local);
        fit_hat = rlc_reconstruct(model, x_fit);
        test_hat = rlc_reconstruct(model, x_test);
        means = model.column_means;
        doc = rlc_to_json(model);
        out << fmt::format("{}: k={} k_lin={} k_bar={} epochs={}\n", a.model, model.k,
                           model.k_lin, model.k_bar, model.report.epochs_run);
    } else if (a.model == "fsca-sde") {
        SdeConfig sc;
        sc.k = a.k;
        sc.hidden_sizes = a.hidden.empty() ? std::vector<Index>{11, 21} : parse_sizes(a.hidden);
        sc.train = tc;
        const SdeModel model = fit_fsca_sde(x_fit, sc, local);
        fit_hat = sde_reconstruct(model, x_fit);
        test_hat = sde_reconstruct(model, x_test);
        means = model.column_means;
        doc = sde_to_json(model);
        out << fmt::format("{}: k={} epochs={}\n", a.model, a.k, model.report.epochs_run);
    } else {
        throw InvalidArgument("unknown model '" + a.model + "'");
    }
    const double vex_train =
        variance_explained(apply_centering(x_fit, means), apply_centering(fit_hat, means));
    const double vex_test =
        variance_explained(apply_centering(x_test, means), apply_centering(test_hat, means));
    doc["metrics"] = {{"vex_train", vex_train}, {"vex_test", vex_test},
                      {"train_rows", split.train.size()}, {"val_rows", split.val.size()},
                      {"test_rows", split.test.size()}};
    write_json_file(a.out, doc);
    out << fmt::format("vex_train={:.6f} vex_test={:.6f}\n", vex_train, vex_test);
    return kOk;
}

void print_table(const nlohmann::json& agg, std::ostream& out) {
    out << fmt::format("dataset={} v={} mc_runs={} failures={}\n", agg.at("dataset").get<std::string>(),
                       agg.at("v").get<long long>(), agg.at("mc_runs").get<long long>(),
                       agg.at("failure_count").get<long long>());
    out << fmt::format("{:<10} {:>4} {:>12} {:>10} {:>12}\n", "method", "k", "vex_mean", "vex_std",
                       "time/fsca");
    auto num = [](const nlohmann::json& v) {
        return v.is_null() ? std::string("nan") : fmt::format("{:.4f}", v.get<double>());
    };
    for (const auto& [method, per_k] : agg.at("methods").items()) {
        for (const auto& [k, s] : per_k.items()) {
            out << fmt::format("{:<10} {:>4} {:>12} {:>10} {:>12}\n", method, k, num(s.at("vex_mean")),
                               num(s.at("vex_std")), num(s.at("time_ratio_vs_fsca")));
        }
    }
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
    const nlohmann::json raw = read_json_file(a.config);
    ExperimentConfig cfg = experiment_config_from_json(raw);
    if (cfg.csv_path && std::filesystem::path(*cfg.csv_path).is_relative()) {
        cfg.csv_path = (std::filesystem::path(a.config).parent_path() / *cfg.csv_path).string();
    }
    const std::size_t threads = a.threads > 0 ? a.threads : default_thread_count();
    const RunReport report = run_experiment(cfg, threads);
    emit_report(report, a.out_dir);
    print_table(nlohmann::json::parse(aggregate_to_json(report).dump()), out);
    out << "reports written to " << a.out_dir << '\n';
    return kOk;
}

int cmd_report(const ReportArgs& a, std::ostream& out) {
    const nlohmann::json agg = read_json_file(std::filesystem::path(a.in_dir) / "aggregate.json");
    print_table(agg, out);
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Unsupervised variable selection and recovery-of-linear-components autoencoding",
                 "linrecover"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Generate the synthetic benchmark dataset as CSV");
    g->add_option("--m", gen.m, "Number of samples")->capture_default_str();
    g->add_option("--v", gen.v, "Number of variables (>= 10)")->capture_default_str();
    g->add_option("--sigma2", gen.sigma2, "Noise variance")->capture_default_str();
    g->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    g->add_option("--out", gen.out, "Output CSV path")->required();

    SelectArgs sel;
    auto* s = app.add_subcommand("select", "Select k variables from a CSV matrix");
    s->add_option("--in", sel.in, "Input CSV")->required();
    s->add_option("--method", sel.method, "fsca, spbr or mpbr")
        ->check(CLI::IsMember({"fsca", "spbr", "mpbr"}))
        ->capture_default_str();
    s->add_option("--k", sel.k, "Number of variables")->required();
    s->add_option("--max-passes", sel.max_passes, "MPBR pass limit")->capture_default_str();
    s->add_option("--out", sel.out, "Output JSON path")->required();

    FitArgs fit;
    auto* f = app.add_subcommand("fit", "Fit an RLC or stacked-decoder model");
    f->add_option("--in", fit.in, "Input CSV")->required();
    f->add_option("--model", fit.model, "fsca-rlc, pca-rlc or fsca-sde")
        ->check(CLI::IsMember({"fsca-rlc", "pca-rlc", "fsca-sde"}))
        ->capture_default_str();
    f->add_option("--k", fit.k, "Code width")->capture_default_str();
    f->add_option("--tau", fit.tau, "Variance threshold (percent) for k_lin")->capture_default_str();
    f->add_option("--hidden", fit.hidden,
                  "Hidden width h for RLC, or comma-separated sizes for fsca-sde");
    f->add_option("--epochs", fit.epochs, "Epoch limit (0 = no network training, RLC only)")
        ->capture_default_str();
    f->add_option("--seed", fit.seed, "Random seed")->capture_default_str();
    f->add_option("--train-fraction", fit.train_fraction, "Percent of rows used for fitting")
        ->capture_default_str();
    f->add_option("--val-fraction", fit.val_fraction, "Percent of fit rows held for early stopping")
        ->capture_default_str();
    f->add_option("--lr", fit.learning_rate, "Learning rate")->capture_default_str();
    f->add_option("--batch-size", fit.batch_size, "Minibatch size")->capture_default_str();
    f->add_option("--patience", fit.patience, "Early-stopping patience")->capture_default_str();
    f->add_option("--gamma", fit.gamma, "Sparsity weight for SDE pre-training")->capture_default_str();
    f->add_option("--out", fit.out, "Output model JSON path")->required();

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "Run a Monte Carlo benchmark from a JSON config");
    b->add_option("--config", bench.config, "Experiment config JSON")->required();
    b->add_option("--out-dir", bench.out_dir, "Directory for report files")->required();
    b->add_option("--threads", bench.threads,
                  "Worker threads (default: LINRECOVER_THREADS or hardware concurrency)");

    ReportArgs rep;
    auto* r = app.add_subcommand("report", "Print the aggregate table of a bench output directory");
    r->add_option("--in-dir", rep.in_dir, "Directory written by bench")->required();

    std::vector<std::string> argv_rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(argv_rest);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        if (g->parsed()) return cmd_gen(gen, out);
        if (s->parsed()) return cmd_select(sel, out);
        if (f->parsed()) return cmd_fit(fit, out);
        if (b->parsed()) return cmd_bench(bench, out);
        if (r->parsed()) return cmd_report(rep, out);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const NumericError& e) {
        err << "error: " << e.what() << '\n';
        return kNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    }
    return kUsage;
}

} // namespace linrecover::cli
