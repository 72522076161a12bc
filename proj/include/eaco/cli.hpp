#pragma once

// Command-line front end: run, sweep, report and quartiles subcommands.
// Kept in a header so the test suite can drive it in-process.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eaco/engine.hpp"
#include "eaco/report.hpp"
#include "eaco/tsplib.hpp"

#ifndef EACO_DATA_DIR
#define EACO_DATA_DIR "data"
#endif

namespace eaco::cli {

namespace fs = std::filesystem;

/// Invalid flag combination; reported with usage and exit status 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string instance;
    std::string variant = "dea";
    std::string classifier;
    std::vector<double> alpha{1.0};
    std::vector<double> beta{2.0};
    std::vector<double> rho{0.9};
    double q = 100.0;
    double qstar = 10.0;
    std::size_t ants = 0; // 0: per-instance default
    std::size_t iters = 5000;
    std::size_t seeds = 1;
    std::uint64_t seed_base = 1;
    std::optional<std::size_t> sigma;
    bool stop_at_optimum = false;
    std::string out;
    std::string format = "csv";
    std::string trace;
    std::string boundary = "strict";
    std::string median = "lower";
    std::string elite_target = "own";
    std::string punish_scope = "all";
    double lambda = 0.05;
    double delta = 0.5;
    std::string registry = std::string(EACO_DATA_DIR) + "/optima.txt";
    std::string grid;
    std::size_t threads = 0;
    std::vector<std::string> traces;
};

struct LoadedInstance {
    std::shared_ptr<const Instance> instance;
    std::optional<length_t> optimum;
};

inline std::string resolve_instance_path(const std::string &where) {
    const fs::path p(where);
    if (fs::exists(p)) {
        return p.string();
    }
    const fs::path data = fs::path(EACO_DATA_DIR) / "tsplib";
    for (const fs::path &cand : {data / p, data / p.filename(), data / (p.filename().string() + ".tsp")}) {
        if (fs::exists(cand)) {
            return cand.string();
        }
    }
    throw std::runtime_error("instance '" + where + "' not found (also looked in " + data.string() + ")");
}

inline std::optional<length_t> lookup_optimum(const Options &o, const std::string &name, const std::string &path) {
    if (o.registry.empty() || !fs::exists(o.registry)) {
        return std::nullopt;
    }
    const auto reg = OptimumRegistry::load(o.registry);
    if (auto v = reg.find(name)) {
        return v;
    }
    return reg.find(fs::path(path).stem().string());
}

inline LoadedInstance load(const Options &o, const std::string &where) {
    const std::string path = resolve_instance_path(where);
    auto inst = std::make_shared<Instance>(load_instance(path));
    const auto opt = lookup_optimum(o, inst->name(), path);
    inst->set_optimum(opt);
    return {std::move(inst), opt};
}

inline Boundary parse_boundary(const std::string &s) {
    if (s == "strict") return Boundary::strict;
    if (s == "inclusive") return Boundary::inclusive;
    throw UsageError("--boundary must be strict or inclusive");
}

inline MedianConvention parse_median(const std::string &s) {
    if (s == "lower") return MedianConvention::lower_middle;
    if (s == "average") return MedianConvention::average;
    throw UsageError("--median must be lower or average");
}

/// Static variants reject a classifier; dynamic ones require it.
inline std::optional<ThresholdKind> checked_classifier(Variant v, const std::string &classifier) {
    if (!is_dynamic(v)) {
        if (!classifier.empty()) {
            throw UsageError("--classifier requires a dynamic variant (dea, dra, dea-pun, dra-pun)");
        }
        return std::nullopt;
    }
    if (classifier.empty()) {
        throw UsageError("variant '" + std::string(to_string(v)) + "' needs --classifier {mrts,mts,mets}");
    }
    try {
        return parse_threshold_kind(classifier);
    } catch (const ConfigError &e) {
        throw UsageError(e.what());
    }
}

inline RunConfig base_config(const Options &o, const LoadedInstance &li, Variant v,
                             std::optional<ThresholdKind> classifier) {
    RunConfig c;
    c.instance = li.instance;
    c.optimum = li.optimum;
    c.stop_at_optimum = o.stop_at_optimum;
    c.params.q_deposit = o.q;
    c.params.q_punish = o.qstar;
    c.params.num_ants = o.ants ? o.ants : default_ant_count(li.instance->name(), li.instance->dimension());
    c.params.max_iterations = o.iters;
    c.params.alpha = o.alpha.front();
    c.params.beta = o.beta.front();
    c.params.rho = o.rho.front();
    c.plan.variant = v;
    c.plan.classifier = classifier;
    const std::size_t sigma = o.sigma.value_or(std::min<std::size_t>(6, c.params.num_ants));
    c.params.sigma_fixed = o.sigma;
    c.plan.sigma = sigma;
    c.plan.e_static = sigma;
    c.plan.boundary = parse_boundary(o.boundary);
    c.plan.median_convention = parse_median(o.median);
    if (o.elite_target == "own") {
        c.plan.elite_target = EliteDepositTarget::own_tour;
    } else if (o.elite_target == "best") {
        c.plan.elite_target = EliteDepositTarget::best_so_far;
    } else {
        throw UsageError("--elite-target must be own or best");
    }
    if (o.punish_scope == "all") {
        c.plan.punish_scope = PunishRankScope::all_ants;
    } else if (o.punish_scope == "non-elite") {
        c.plan.punish_scope = PunishRankScope::non_elite;
    } else {
        throw UsageError("--punish-scope must be all or non-elite");
    }
    c.plan.mmas.lambda = o.lambda;
    c.plan.mmas.smoothing_delta = o.delta;
    return c;
}

/// A block of `seeds` runs that share everything but the seed.
struct Group {
    std::string dataset;
    std::string label;
    std::size_t m = 0;
    std::optional<length_t> optimum;
    std::vector<RunConfig> runs;
};

inline std::string format_param(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

inline std::vector<Group> build_groups(const Options &o, const std::vector<std::string> &instances,
                                       const std::vector<std::string> &variants,
                                       const std::vector<std::string> &classifiers) {
    const bool multi_point = o.alpha.size() * o.beta.size() * o.rho.size() > 1;
    std::vector<Group> groups;
    for (const auto &where : instances) {
        const LoadedInstance li = load(o, where);
        for (const auto &vname : variants) {
            Variant v{};
            try {
                v = parse_variant(vname);
            } catch (const ConfigError &e) {
                throw UsageError(e.what());
            }
            std::vector<std::string> kinds = is_dynamic(v) ? classifiers : std::vector<std::string>{""};
            if (is_dynamic(v) && kinds.empty()) {
                kinds.push_back("");
            }
            for (const auto &kind : kinds) {
                const auto cls = checked_classifier(v, kind);
                const RunConfig base = base_config(o, li, v, cls);
                for (const auto &point : param_grid(base, o.alpha, o.beta, o.rho)) {
                    Group g;
                    g.dataset = li.instance->name();
                    g.label = algorithm_label(v, cls);
                    if (multi_point) {
                        g.label += "/a" + format_param(point.params.alpha) + "/b" + format_param(point.params.beta) +
                                   "/r" + format_param(point.params.rho);
                    }
                    g.m = point.params.num_ants;
                    g.optimum = li.optimum;
                    for (std::size_t s = 0; s < o.seeds; ++s) {
                        g.runs.push_back(point);
                    }
                    groups.push_back(std::move(g));
                }
            }
        }
    }
    return groups;
}

inline std::string trace_file_name(const Group &g, std::uint64_t seed) {
    std::string label = g.label;
    for (char &c : label) {
        if (c == '/' || c == '+') c = '_';
    }
    return g.dataset + "_" + label + "_seed" + std::to_string(seed) + ".jsonl";
}

inline void write_text(const std::string &path, const std::string &text, std::ostream &fallback) {
    if (path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
}

inline void write_trace_file(const std::string &path, const std::vector<IterationStats> &trace) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write trace '" + path + "'");
    }
    write_trace(f, trace);
}

inline std::string render_rows(const Options &o, const std::vector<SummaryRow> &rows) {
    return o.format == "json" ? to_json(rows) : to_csv(rows);
}

/// Executes all groups (seeds assigned seed_base + global run index), writes
/// traces when asked, and returns one summary row per group.
inline std::vector<SummaryRow> execute(const Options &o, std::vector<Group> &groups, bool trace_is_dir,
                                       std::ostream &err, std::vector<std::vector<RunResult>> *results = nullptr) {
    std::vector<RunConfig> all;
    for (const auto &g : groups) {
        all.insert(all.end(), g.runs.begin(), g.runs.end());
    }
    const auto outcomes = sweep(all, o.seed_base, o.threads);
    if (!o.trace.empty() && trace_is_dir) {
        fs::create_directories(o.trace);
    }
    std::vector<SummaryRow> rows;
    std::size_t idx = 0;
    bool failed = false;
    for (const auto &g : groups) {
        std::vector<RunResult> ok;
        for (std::size_t k = 0; k < g.runs.size(); ++k, ++idx) {
            const auto &res = outcomes[idx];
            if (!res.ok()) {
                err << "run " << idx << " (" << g.dataset << ", " << g.label << ", seed " << o.seed_base + idx
                    << ") failed: " << res.error << '\n';
                failed = true;
                continue;
            }
            if (!o.trace.empty()) {
                const std::string path =
                    trace_is_dir ? (fs::path(o.trace) / trace_file_name(g, res.result->config.seed)).string() : o.trace;
                write_trace_file(path, res.result->trace);
            }
            ok.push_back(*res.result);
        }
        if (!ok.empty()) {
            std::vector<std::vector<IterationStats>> traces;
            for (const auto &r : ok) {
                traces.push_back(r.trace);
            }
            rows.push_back(summarize_traces(g.dataset, g.label, g.m, traces, g.optimum));
        }
        if (results) {
            results->push_back(std::move(ok));
        }
    }
    if (rows.empty()) {
        throw std::runtime_error("every run failed");
    }
    if (failed) {
        err << "warning: some runs failed; rows summarize the successful runs only\n";
    }
    return rows;
}

inline void check_common(const Options &o) {
    if (o.format != "csv" && o.format != "json") {
        throw UsageError("--format must be csv or json");
    }
    if (o.seeds < 1) {
        throw UsageError("--seeds must be at least 1");
    }
}

/// The --variant/--classifier pair given on the command line must agree.
inline void check_flag_pair(const Options &o) {
    Variant v{};
    try {
        v = parse_variant(o.variant);
    } catch (const ConfigError &e) {
        throw UsageError(e.what());
    }
    checked_classifier(v, o.classifier);
}

inline int cmd_run(const Options &o, std::ostream &out, std::ostream &err) {
    check_common(o);
    check_flag_pair(o);
    if (o.instance.empty()) {
        throw UsageError("run needs --instance");
    }
    if (o.alpha.size() != 1 || o.beta.size() != 1 || o.rho.size() != 1) {
        throw UsageError("run takes a single value for --alpha, --beta and --rho (use sweep for grids)");
    }
    auto groups = build_groups(o, {o.instance}, {o.variant}, {o.classifier});
    const auto rows = execute(o, groups, o.seeds > 1, err);
    write_text(o.out, render_rows(o, rows), out);
    return 0;
}

inline int cmd_sweep(Options o, std::ostream &out, std::ostream &err) {
    std::vector<std::string> instances{o.instance};
    std::vector<std::string> variants{o.variant};
    std::vector<std::string> classifiers{o.classifier};
    if (!o.grid.empty()) {
        std::ifstream f(o.grid);
        if (!f) {
            throw std::runtime_error("cannot open grid file '" + o.grid + "'");
        }
        nlohmann::json g;
        try {
            g = nlohmann::json::parse(f);
        } catch (const nlohmann::json::exception &e) {
            throw UsageError("grid file: " + std::string(e.what()));
        }
        auto strings = [&](const char *key, std::vector<std::string> &dst) {
            if (g.contains(key)) dst = g.at(key).get<std::vector<std::string>>();
        };
        strings("instances", instances);
        strings("variants", variants);
        strings("classifiers", classifiers);
        if (g.contains("alpha")) o.alpha = g.at("alpha").get<std::vector<double>>();
        if (g.contains("beta")) o.beta = g.at("beta").get<std::vector<double>>();
        if (g.contains("rho")) o.rho = g.at("rho").get<std::vector<double>>();
        if (g.contains("seeds")) o.seeds = g.at("seeds").get<std::size_t>();
        if (g.contains("seed_base")) o.seed_base = g.at("seed_base").get<std::uint64_t>();
        if (g.contains("iters")) o.iters = g.at("iters").get<std::size_t>();
        if (g.contains("ants")) o.ants = g.at("ants").get<std::size_t>();
        if (g.contains("q")) o.q = g.at("q").get<double>();
        if (g.contains("qstar")) o.qstar = g.at("qstar").get<double>();
    }
    check_common(o);
    if (o.grid.empty()) {
        check_flag_pair(o);
    }
    if (instances.empty() || instances.front().empty()) {
        throw UsageError("sweep needs --instance or a grid file listing instances");
    }
    auto groups = build_groups(o, instances, variants, classifiers);
    const auto rows = execute(o, groups, true, err);
    write_text(o.out, render_rows(o, rows), out);
    return 0;
}

inline std::vector<std::vector<IterationStats>> read_traces(const std::vector<std::string> &paths) {
    std::vector<std::vector<IterationStats>> traces;
    for (const auto &p : paths) {
        std::ifstream f(p, std::ios::binary);
        if (!f) {
            throw std::runtime_error("cannot open trace '" + p + "'");
        }
        try {
            traces.push_back(read_trace(f));
        } catch (const std::exception &e) {
            throw std::runtime_error(p + ": " + e.what());
        }
    }
    return traces;
}

/// Dataset, label, m and optimum for trace-based subcommands.
struct Labels {
    std::string dataset;
    std::string algorithm;
    std::size_t m = 0;
    std::optional<length_t> optimum;
};

inline Labels labels_for(const Options &o) {
    if (o.instance.empty()) {
        throw UsageError("--instance is needed to label traces");
    }
    Variant v{};
    try {
        v = parse_variant(o.variant);
    } catch (const ConfigError &e) {
        throw UsageError(e.what());
    }
    const auto cls = checked_classifier(v, o.classifier);
    const LoadedInstance li = load(o, o.instance);
    return {li.instance->name(), algorithm_label(v, cls),
            o.ants ? o.ants : default_ant_count(li.instance->name(), li.instance->dimension()), li.optimum};
}

inline int cmd_report(const Options &o, std::ostream &out) {
    check_common(o);
    if (o.traces.empty()) {
        throw UsageError("report needs one or more trace files");
    }
    const Labels l = labels_for(o);
    const auto traces = read_traces(o.traces);
    const auto row = summarize_traces(l.dataset, l.algorithm, l.m, traces, l.optimum);
    write_text(o.out, render_rows(o, {row}), out);
    return 0;
}

inline int cmd_quartiles(const Options &o, std::ostream &out, std::ostream &err) {
    check_common(o);
    std::string text = "# elite counts per iteration; q1/q3 are Tukey hinges (medians of the lower/upper halves)\n";
    text += std::string(quartile_header) + "\n";
    if (!o.traces.empty()) {
        const Labels l = labels_for(o);
        const auto traces = read_traces(o.traces);
        std::vector<std::vector<std::size_t>> counts;
        for (const auto &t : traces) {
            counts.push_back(elite_counts(t));
        }
        text += quartile_csv_line(l.dataset, l.algorithm, l.m, elite_count_summary(counts), traces.size());
    } else {
        if (o.instance.empty()) {
            throw UsageError("quartiles needs trace files or --instance to run");
        }
        check_flag_pair(o);
        auto groups = build_groups(o, {o.instance}, {o.variant}, {o.classifier});
        std::vector<std::vector<RunResult>> results;
        Options quiet = o;
        execute(quiet, groups, o.seeds > 1, err, &results);
        for (std::size_t g = 0; g < groups.size(); ++g) {
            std::vector<std::vector<std::size_t>> counts;
            for (const auto &r : results[g]) {
                counts.push_back(elite_counts(r.trace));
            }
            if (!counts.empty()) {
                text += quartile_csv_line(groups[g].dataset, groups[g].label, groups[g].m,
                                          elite_count_summary(counts), counts.size());
            }
        }
    }
    write_text(o.out, text, out);
    return 0;
}

inline void add_run_options(CLI::App &app, Options &o, bool grid_values) {
    app.add_option("--instance", o.instance, "TSPLIB file or bundled instance name");
    app.add_option("--variant", o.variant, "as|ea|ra|mmas|dea|dra|dea-pun|dra-pun")->capture_default_str();
    app.add_option("--classifier", o.classifier, "mrts|mts|mets (dynamic variants only)");
    if (grid_values) {
        app.add_option("--alpha", o.alpha, "pheromone exponent(s)")->capture_default_str();
        app.add_option("--beta", o.beta, "visibility exponent(s)")->capture_default_str();
        app.add_option("--rho", o.rho, "trail persistence value(s)")->capture_default_str();
    } else {
        app.add_option("--alpha", o.alpha, "pheromone exponent")->expected(1)->capture_default_str();
        app.add_option("--beta", o.beta, "visibility exponent")->expected(1)->capture_default_str();
        app.add_option("--rho", o.rho, "trail persistence")->expected(1)->capture_default_str();
    }
    app.add_option("--q", o.q, "deposit constant Q")->capture_default_str();
    app.add_option("--qstar", o.qstar, "punishment constant Q*")->capture_default_str();
    app.add_option("--ants", o.ants, "number of ants (0: instance default)")->capture_default_str();
    app.add_option("--iters", o.iters, "iteration budget per run")->capture_default_str();
    app.add_option("--seeds", o.seeds, "independent runs per configuration")->capture_default_str();
    app.add_option("--seed-base", o.seed_base, "seed of the first run")->capture_default_str();
    app.add_option("--sigma", o.sigma, "static EA/RA elite count (default min(6, m))");
    app.add_flag("--stop-at-optimum", o.stop_at_optimum, "stop once the registry optimum is reached");
    app.add_option("--out", o.out, "output file (default: standard output)");
    app.add_option("--format", o.format, "csv|json")->capture_default_str();
    app.add_option("--trace", o.trace, "trace file (single run) or directory (several runs)");
    app.add_option("--boundary", o.boundary, "strict|inclusive elite boundary")->capture_default_str();
    app.add_option("--median", o.median, "lower|average even-size median")->capture_default_str();
    app.add_option("--elite-target", o.elite_target, "own|best tour for the dynamic elitist bonus")
        ->capture_default_str();
    app.add_option("--punish-scope", o.punish_scope, "all|non-elite rank counting for DRA punishment")
        ->capture_default_str();
    app.add_option("--lambda", o.lambda, "MMAS branching-factor cut")->capture_default_str();
    app.add_option("--delta", o.delta, "MMAS trail smoothing fraction")->capture_default_str();
    app.add_option("--registry", o.registry, "optimum registry file")->capture_default_str();
    app.add_option("--threads", o.threads, "worker threads (0: hardware concurrency)")->capture_default_str();
}

/// Entry point; returns the process exit status.
inline int run_cli(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
    CLI::App app{"Ant colony optimisation for the TSP with statistically selected elite ants"};
    app.require_subcommand(1);
    Options run_o, sweep_o, report_o, quart_o;

    auto *run_cmd = app.add_subcommand("run", "run one configuration over --seeds seeds and print its summary row");
    add_run_options(*run_cmd, run_o, false);

    auto *sweep_cmd = app.add_subcommand("sweep", "run a parameter grid and print one row per grid point");
    add_run_options(*sweep_cmd, sweep_o, true);
    sweep_cmd->add_option("--grid", sweep_o.grid, "JSON grid file");

    auto *report_cmd = app.add_subcommand("report", "recompute a summary row from saved trace files");
    add_run_options(*report_cmd, report_o, false);
    report_cmd->add_option("traces", report_o.traces, "trace files (.jsonl)");

    auto *quart_cmd = app.add_subcommand("quartiles", "five-number summaries of per-iteration elite counts");
    add_run_options(*quart_cmd, quart_o, false);
    quart_cmd->add_option("traces", quart_o.traces, "trace files (.jsonl); runs the configuration if omitted");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err);
    }

    try {
        if (*run_cmd) return cmd_run(run_o, out, err);
        if (*sweep_cmd) return cmd_sweep(sweep_o, out, err);
        if (*report_cmd) return cmd_report(report_o, out);
        if (*quart_cmd) return cmd_quartiles(quart_o, out, err);
    } catch (const UsageError &e) {
        err << "usage error: " << e.what() << "\n" << app.get_subcommands().front()->help();
        return 2;
    } catch (const ConfigError &e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

} // namespace eaco::cli
