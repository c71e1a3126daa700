// gfa: simulate -> fit -> activity -> evaluate -> report

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gfa/activity.hpp"
#include "gfa/error.hpp"
#include "gfa/evaluation.hpp"
#include "gfa/inference.hpp"
#include "gfa/io.hpp"
#include "gfa/synthetic.hpp"
#include "gfa/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

using Clock = std::chrono::steady_clock;

void write_run_manifest(const fs::path& path, const std::string& command, const json& config,
                        const json& inputs, const json& outputs, std::uint64_t seed,
                        Clock::time_point started) {
    const double seconds = std::chrono::duration<double>(Clock::now() - started).count();
    gfa::write_json(path, {{"command", command},
                           {"config", config},
                           {"inputs", inputs},
                           {"outputs", outputs},
                           {"seed", seed},
                           {"wall_clock_seconds", seconds},
                           {"version", gfa::kVersion}});
}

fs::path sibling(const fs::path& file, const std::string& suffix) {
    return file.parent_path() / (file.stem().string() + suffix);
}

/// Re-applies a model's preprocessing to raw data.
gfa::DataCollection preprocess_like(const gfa::DataCollection& raw, const gfa::ModelFile& model) {
    if (!(raw.partition() == model.partition))
        throw gfa::UsageError("data views do not match the model's views");
    if (!model.centered && !model.preprocess.scaled()) return raw;
    gfa::Matrix data = raw.data();
    if (model.centered) data.rowwise() -= model.preprocess.means.transpose();
    if (model.preprocess.scaled()) data.array().rowwise() /= model.preprocess.scales.transpose().array();
    return gfa::DataCollection(raw.partition(), std::move(data));
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
    gfa::Index views = 0;
    std::vector<gfa::Index> dims;
    gfa::Index dim = 0;
    gfa::Index n = 100;
    gfa::Index k = 0;
    std::string dist = "sec4-preset";
    double exponent = 1.0;
    std::uint64_t seed = 0;
    std::string out;
};

int run_simulate(const SimulateOptions& o) {
    const auto started = Clock::now();
    const auto dist = gfa::distribution_from_string(o.dist);
    std::vector<gfa::Index> dims = o.dims;
    if (dims.empty() && o.dim > 0) dims.push_back(o.dim);
    gfa::Index k = o.k;
    if (k == 0 && dist == gfa::FactorDistribution::uniform_cardinality) k = o.views;
    if (dist != gfa::FactorDistribution::sec4_preset) {
        if (o.views < 1) throw gfa::UsageError("--views is required for " + o.dist);
        if (dims.empty()) throw gfa::UsageError("--dims or --dim is required for " + o.dist);
        if (k < 1) throw gfa::UsageError("--k is required for " + o.dist);
    }
    const auto truth = gfa::generate_truth(o.views, dims, k, dist, o.seed, o.exponent);
    const auto data = gfa::sample_collection(truth, o.n, o.seed);

    const fs::path out(o.out);
    gfa::save_collection(data, out);
    gfa::write_json(out / "truth.json", gfa::to_json(truth));

    json outputs = {"manifest.json", "truth.json"};
    for (const auto& name : data.partition().names()) outputs.push_back(name + ".csv");
    outputs.push_back("run.json");
    const json config = {{"views", truth.partition.view_count()}, {"dims", truth.partition.dims()},
                         {"n", o.n}, {"k", truth.factors()}, {"dist", gfa::to_string(dist)},
                         {"exponent", o.exponent}};
    write_run_manifest(out / "run.json", "simulate", config, json::array(), outputs, o.seed, started);
    std::cout << "wrote " << data.view_count() << " views (" << data.partition().total_dim() << " columns, "
              << data.n_samples() << " samples, " << truth.factors() << " true factors) to " << out.string()
              << '\n';
    return 0;
}

// --------------------------------------------------------------------- fit

struct FitOptions {
    std::string data;
    gfa::Index k = 10;
    int max_iter = 1000;
    double tol = 1e-6;
    std::string prior = "gfa";
    bool no_rotation = false;
    int rotation_period = 1;
    int rotation_start = 30;
    int precision_warmup = 5;
    std::uint64_t seed = 0;
    std::string out;
    bool no_center = false;
    bool scale = false;
    double epsilon = gfa::kDefaultEpsilon;
    bool quiet = false;
};

int run_fit(const FitOptions& o) {
    const auto started = Clock::now();
    gfa::FitConfig config;
    config.K = o.k;
    config.max_iter = o.max_iter;
    config.elbo_rel_tol = o.tol;
    config.rotation_enabled = !o.no_rotation;
    config.rotation_period = o.rotation_period;
    config.rotation_start = o.rotation_start;
    config.precision_warmup = o.precision_warmup;
    config.seed = o.seed;
    config.epsilon = o.epsilon;
    config.hyper.prior_mode = gfa::prior_mode_from_string(o.prior);
    config.validate();

    const auto raw = gfa::load_collection(o.data);
    gfa::ModelFile model;
    model.config = config;
    model.centered = !o.no_center;
    model.partition = raw.partition();
    model.n_samples = raw.n_samples();
    gfa::DataCollection data = raw;
    if (model.centered || o.scale) {
        auto [processed, record] = gfa::center(raw, o.scale);
        if (!model.centered) {
            // Scaling without centering: undo the mean shift.
            gfa::Matrix values = raw.data();
            if (record.scaled()) values.array().rowwise() /= record.scales.transpose().array();
            processed = gfa::DataCollection(raw.partition(), std::move(values));
            record.means.setZero();
        }
        data = std::move(processed);
        model.preprocess = std::move(record);
    } else {
        model.preprocess.means = gfa::Vector::Zero(raw.partition().total_dim());
    }

    model.result = gfa::fit(data, config);
    for (const auto& w : model.result.warnings) std::cerr << "warning: " << w << '\n';

    const fs::path out(o.out);
    gfa::write_json(out, gfa::to_json(model));
    const fs::path run = sibling(out, ".run.json");
    write_run_manifest(run, "fit", gfa::to_json(config), json::array({o.data}),
                       json::array({out.string(), run.string()}), o.seed, started);
    if (!o.quiet) {
        std::cout << "final ELBO " << gfa::format_double(model.result.elbo_trace.back()) << '\n'
                  << "iterations " << model.result.n_iter << (model.result.converged ? " (converged)" : "")
                  << '\n'
                  << "empty factors " << model.result.empty_factor_count << " of " << config.K << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------- activity

struct ActivityOptions {
    std::string model;
    std::string data;
    double epsilon = gfa::kDefaultEpsilon;
    std::string sort = "cardinality";
    std::string out = "activity.json";
};

std::vector<gfa::Index> factor_order(const std::string& key, const gfa::ActivityMatrix& activity,
                                     const gfa::Posterior& q, const gfa::ViewPartition& partition,
                                     json& extra) {
    if (key == "cardinality") return gfa::default_factor_order(activity, q);
    const auto colon = key.find(':');
    const std::string kind = key.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : key.substr(colon + 1);
    if (kind == "norm" && !arg.empty()) {
        const auto& names = partition.names();
        auto it = std::find(names.begin(), names.end(), arg);
        gfa::Index view = -1;
        if (it != names.end()) {
            view = it - names.begin();
        } else {
            try {
                std::size_t used = 0;
                view = std::stoll(arg, &used);
                if (used != arg.size()) view = -1;
            } catch (const std::exception&) {
                view = -1;
            }
        }
        if (view < 0 || view >= partition.view_count()) throw gfa::UsageError("unknown view '" + arg + "'");
        return gfa::rank_by_norm(q, view);
    }
    if (kind == "isc" && !arg.empty()) {
        gfa::Index segments = 0;
        try {
            segments = std::stoll(arg);
        } catch (const std::exception&) {
            throw gfa::UsageError("isc:S needs an integer segment count");
        }
        const auto isc = gfa::isc_scores(q.z_mean, segments);
        extra["isc"] = std::vector<double>(isc.score.data(), isc.score.data() + isc.score.size());
        extra["isc_degenerate_pairs"] = isc.degenerate_pairs;
        return isc.order();
    }
    throw gfa::UsageError("unknown sort key '" + key + "' (cardinality, norm:VIEW or isc:S)");
}

int run_activity(const ActivityOptions& o) {
    const auto model = gfa::model_from_json(gfa::read_json(o.model));
    const auto data = preprocess_like(gfa::load_collection(o.data), model);
    const auto& q = model.result.posterior;
    const auto stats = gfa::view_variance_stats(data, q);
    const auto activity = gfa::activity_matrix(q, stats, o.epsilon);
    json extra;
    const auto order = factor_order(o.sort, activity, q, model.partition, extra);

    json j = gfa::to_json(activity, order);
    j["sort"] = o.sort;
    j["views"] = model.partition.names();
    j["total_variance"] = std::vector<double>(stats.total_variance.data(),
                                              stats.total_variance.data() + stats.total_variance.size());
    j["noise_variance"] = std::vector<double>(stats.noise_variance.data(),
                                              stats.noise_variance.data() + stats.noise_variance.size());
    if (!extra.is_null()) j.update(extra);
    const fs::path out(o.out);
    gfa::write_json(out, j);
    const std::string grid = gfa::format_grid(activity, order);
    std::ofstream txt(sibling(out, ".txt"));
    if (!txt) throw gfa::IoError("cannot write " + sibling(out, ".txt").string());
    txt << grid;
    std::cout << grid;
    return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
    std::string model;
    std::string truth;
    std::string data;
    std::string out = "metrics.json";
    double epsilon = gfa::kDefaultEpsilon;
};

int run_evaluate(const EvaluateOptions& o) {
    const auto model = gfa::model_from_json(gfa::read_json(o.model));
    const auto truth = gfa::truth_from_json(gfa::read_json(o.truth));
    if (!(truth.partition == model.partition))
        throw gfa::UsageError("truth has " + std::to_string(truth.partition.view_count()) + " views of widths " +
                              "different from the model's");
    const auto data = preprocess_like(gfa::load_collection(o.data), model);
    const auto& q = model.result.posterior;
    const auto activity = gfa::activity_matrix(q, gfa::view_variance_stats(data, q), o.epsilon);

    gfa::Matrix w_est = q.loadings();
    if (model.preprocess.scaled()) w_est.array().colwise() *= model.preprocess.scales.array();
    const auto matching = gfa::match_factors(w_est, truth.W);
    const double f_err = gfa::f_error(activity.F, truth.F, matching);
    const auto est_curve = gfa::cardinality_curve(activity.F);
    const auto true_curve = gfa::cardinality_curve(truth.F);
    const auto matched = gfa::matched_cardinalities(activity.F, truth.F, matching);

    json matched_json = json::array();
    for (const auto& [t, e] : matched) matched_json.push_back({t, e});
    const json metrics = {
        {"model", o.model},
        {"truth", o.truth},
        {"M", model.partition.view_count()},
        {"D", model.partition.total_dim()},
        {"N", model.n_samples},
        {"K", model.config.K},
        {"K_true", truth.factors()},
        {"prior", gfa::to_string(model.config.hyper.prior_mode)},
        {"seed", model.config.seed},
        {"epsilon", o.epsilon},
        {"w_mse", matching.w_mse},
        {"f_error", f_err},
        {"empty_factor_count", activity.empty_count()},
        {"converged", model.result.converged},
        {"n_iter", model.result.n_iter},
        {"cardinality_estimated", est_curve},
        {"cardinality_true", true_curve},
        {"cardinality_matched", matched_json},
        {"est_to_true", matching.est_to_true},
        {"signs", matching.signs},
    };
    const fs::path out(o.out);
    gfa::write_json(out, metrics);

    const fs::path csv = sibling(out, "_cardinality.csv");
    std::ofstream c(csv);
    if (!c) throw gfa::IoError("cannot write " + csv.string());
    c << "position,true,matched_estimate,estimated_sorted\n";
    const std::size_t rows = std::max(matched.size(), est_curve.size());
    for (std::size_t i = 0; i < rows; ++i) {
        c << i << ',';
        if (i < matched.size()) c << matched[i].first << ',' << matched[i].second;
        else c << ',';
        c << ',';
        if (i < est_curve.size()) c << est_curve[i];
        c << '\n';
    }
    std::cout << "w_mse " << gfa::format_double(matching.w_mse) << "\nf_error " << gfa::format_double(f_err)
              << '\n';
    return 0;
}

// ------------------------------------------------------------------ report

struct ReportOptions {
    std::vector<std::string> inputs;
    std::string format = "md";
    std::string out;
};

struct Summary {
    double median = 0, min = 0, max = 0;
};

Summary summarize(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    const double median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    return {median, v.front(), v.back()};
}

int run_report(const ReportOptions& o) {
    if (o.inputs.empty()) throw gfa::UsageError("report needs at least one metrics file");
    if (o.format != "md" && o.format != "csv") throw gfa::UsageError("--format must be md or csv");
    using Key = std::tuple<long long, std::string, long long, long long>;  // M, prior, N, K
    std::map<Key, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& path : o.inputs) {
        const auto m = gfa::read_json(path);
        try {
            Key key{m.at("M").get<long long>(), m.at("prior").get<std::string>(), m.at("N").get<long long>(),
                    m.at("K").get<long long>()};
            groups[key].first.push_back(m.at("w_mse").get<double>());
            groups[key].second.push_back(m.at("f_error").get<double>());
        } catch (const json::exception& e) {
            throw gfa::IoError(path + ": not a metrics file (" + e.what() + ")");
        }
    }
    std::ostringstream table;
    const bool md = o.format == "md";
    const std::vector<std::string> header = {"M",          "prior",      "N",          "K",           "runs",
                                             "w_mse_median", "w_mse_min", "w_mse_max", "f_error_median",
                                             "f_error_min",  "f_error_max"};
    auto emit_row = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (md) table << "| " << cells[i] << ' ';
            else table << (i ? "," : "") << cells[i];
        }
        table << (md ? "|\n" : "\n");
    };
    emit_row(header);
    if (md) emit_row(std::vector<std::string>(header.size(), "---"));
    for (const auto& [key, values] : groups) {
        const auto w = summarize(values.first);
        const auto f = summarize(values.second);
        emit_row({std::to_string(std::get<0>(key)), std::get<1>(key), std::to_string(std::get<2>(key)),
                  std::to_string(std::get<3>(key)), std::to_string(values.first.size()),
                  gfa::format_double(w.median), gfa::format_double(w.min), gfa::format_double(w.max),
                  gfa::format_double(f.median), gfa::format_double(f.min), gfa::format_double(f.max)});
    }
    if (o.out.empty()) {
        std::cout << table.str();
    } else {
        std::ofstream out(o.out);
        if (!out) throw gfa::IoError("cannot write " + o.out);
        out << table.str();
    }
    return 0;
}

void apply_thread_cap() {
    if (const char* env = std::getenv("GFA_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) Eigen::setNbThreads(n);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Group factor analysis: simulate, fit, inspect and evaluate multi-view factor models"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(gfa::kVersion));

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Sample a synthetic collection and its ground truth");
    simulate->add_option("--views", sim.views, "Number of views M");
    simulate->add_option("--dims", sim.dims, "Per-view widths")->delimiter(',');
    simulate->add_option("--dim", sim.dim, "Width shared by all views");
    simulate->add_option("--n", sim.n, "Number of samples")->check(CLI::PositiveNumber);
    simulate->add_option("--k", sim.k, "Number of true factors");
    simulate->add_option("--dist", sim.dist, "uniform-cardinality | power-law | uniform-subsets | sec4-preset")
        ->check(CLI::IsMember({"uniform-cardinality", "power-law", "uniform-subsets", "sec4-preset"}));
    simulate->add_option("--exponent", sim.exponent, "Power-law exponent");
    simulate->add_option("--seed", sim.seed, "Random seed");
    simulate->add_option("--out", sim.out, "Output directory")->required();

    FitOptions fo;
    auto* fit = app.add_subcommand("fit", "Fit the model by variational inference");
    fit->add_option("--data", fo.data, "Collection directory or manifest")->required();
    fit->add_option("--k", fo.k, "Number of factors")->check(CLI::PositiveNumber);
    fit->add_option("--max-iter", fo.max_iter, "Maximum iterations")->check(CLI::PositiveNumber);
    fit->add_option("--tol", fo.tol, "Relative bound change for convergence")->check(CLI::PositiveNumber);
    fit->add_option("--prior", fo.prior, "gfa | bfa | fa")->check(CLI::IsMember({"gfa", "bfa", "fa"}));
    fit->add_flag("--no-rotation", fo.no_rotation, "Disable the rotation step");
    fit->add_option("--rotation-period", fo.rotation_period, "Iterations between rotations")
        ->check(CLI::PositiveNumber);
    fit->add_option("--rotation-start", fo.rotation_start, "First iteration with rotation")
        ->check(CLI::PositiveNumber);
    fit->add_option("--precision-warmup", fo.precision_warmup, "Iterations before alpha and tau are updated")
        ->check(CLI::NonNegativeNumber);
    fit->add_option("--seed", fo.seed, "Random seed");
    fit->add_option("--out", fo.out, "Model JSON path")->required();
    fit->add_flag("--center,!--no-center", [&](std::int64_t count) { fo.no_center = count < 0; },
                  "Subtract column means (default on)");
    fit->add_flag("--scale", fo.scale, "Scale columns to unit variance");
    fit->add_option("--epsilon", fo.epsilon, "Activity threshold for the empty-factor count")
        ->check(CLI::PositiveNumber);
    fit->add_flag("--quiet", fo.quiet, "Suppress the summary");

    ActivityOptions ao;
    auto* activity = app.add_subcommand("activity", "Extract the factor activity matrix");
    activity->add_option("--model", ao.model, "Model JSON")->required();
    activity->add_option("--data", ao.data, "Collection the model was fit on")->required();
    activity->add_option("--epsilon", ao.epsilon, "Threshold constant")->check(CLI::PositiveNumber);
    activity->add_option("--sort", ao.sort, "cardinality | norm:VIEW | isc:S");
    activity->add_option("--out", ao.out, "Activity JSON path (grid goes next to it as .txt)");

    EvaluateOptions eo;
    auto* evaluate = app.add_subcommand("evaluate", "Score a model against ground truth");
    evaluate->add_option("--model", eo.model, "Model JSON")->required();
    evaluate->add_option("--truth", eo.truth, "truth.json")->required();
    evaluate->add_option("--data", eo.data, "Collection the model was fit on")->required();
    evaluate->add_option("--out", eo.out, "Metrics JSON path");
    evaluate->add_option("--epsilon", eo.epsilon, "Threshold constant")->check(CLI::PositiveNumber);

    ReportOptions ro;
    auto* report = app.add_subcommand("report", "Aggregate metrics files into summary tables");
    report->add_option("inputs", ro.inputs, "metrics.json files");
    report->add_option("--format", ro.format, "md | csv");
    report->add_option("--out", ro.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    apply_thread_cap();
    try {
        if (*simulate) return run_simulate(sim);
        if (*fit) return run_fit(fo);
        if (*activity) return run_activity(ao);
        if (*evaluate) return run_evaluate(eo);
        if (*report) return run_report(ro);
    } catch (const gfa::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const gfa::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const gfa::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitUsage;
}
