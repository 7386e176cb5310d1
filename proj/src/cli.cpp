#include "corrsel/cli.hpp"

#include "corrsel/autospearman.hpp"
#include "corrsel/dataset.hpp"
#include "corrsel/errors.hpp"
#include "corrsel/harness.hpp"
#include "corrsel/report.hpp"
#include "corrsel/selectors.hpp"
#include "corrsel/stats.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iomanip>
#include <sstream>

namespace corrsel {

namespace {

using nlohmann::json;

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

CloneGroup parse_clone(const std::string& text) {
    // source:count:sd
    CloneGroup g;
    std::size_t source = 0, count = 0;
    double sd = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> source >> c1 >> count >> c2 >> sd) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof())
        throw ConfigError("--clone expects source:count:sd, got '" + text + "'");
    g.source = source;
    g.count = count;
    g.noise_sd = sd;
    return g;
}

std::string render(double v) {
    if (std::isinf(v)) return "inf";
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << v;
    return s.str();
}

struct SelectArgs {
    std::string dataset, outcome, selector = "AutoSpearman";
    double sp_t = kDefaultSpearmanThreshold, vif_t = kDefaultVifThreshold;
    std::uint64_t seed = kDefaultSeed;
    bool json = false;
};

int cmd_select(const SelectArgs& a, std::ostream& out) {
    const SelectorId id = parse_selector(a.selector);
    SelectorConfig config;
    config.autospearman.sp_t = a.sp_t;
    config.autospearman.vif_t = a.vif_t;
    validate(config);
    const Dataset d = load_csv(a.dataset, a.outcome);

    if (id == SelectorId::AutoSpearman) {
        const EliminationResult r = auto_spearman(d, config.autospearman);
        if (a.json) {
            out << json{{"selector", to_string(id)}, {"subset", r.subset}, {"trace", trace_to_json(r.trace)}}.dump(2)
                << '\n';
            return kExitOk;
        }
        for (const auto& m : r.subset) out << m << '\n';
        out << "# trace\n";
        for (const auto& step : r.trace) {
            out << "# " << to_string(step.phase) << " removed " << step.removed;
            if (!step.kept.empty()) out << " kept " << step.kept;
            out << " statistic " << render(step.statistic) << '\n';
        }
        return kExitOk;
    }
    const MetricSubset subset = select(id, d, config, a.seed);
    if (a.json) {
        out << json{{"selector", to_string(id)}, {"subset", subset}}.dump(2) << '\n';
        return kExitOk;
    }
    for (const auto& m : subset) out << m << '\n';
    return kExitOk;
}

struct DiagnoseArgs {
    std::string dataset, outcome, metrics;
    double sp_t = kDefaultSpearmanThreshold, vif_t = kDefaultVifThreshold;
    bool json = false;
};

int cmd_diagnose(const DiagnoseArgs& a, std::ostream& out) {
    const Dataset d = load_csv(a.dataset, a.outcome);
    MetricSubset subset = a.metrics.empty() ? d.metric_names() : split_list(a.metrics);
    if (subset.empty()) throw ConfigError("--metrics names no metric");
    const Dataset projected = d.project(subset);
    const CorrelationMatrix s = spearman_matrix(projected);
    const VifReport vif = vif_scores(projected, subset);
    const CorrelationFlags flags = correlation_flags(subset, d, a.sp_t, a.vif_t, true);

    if (a.json) {
        json vj = json::object();
        for (const auto& [name, score] : vif.scores)
            vj[name] = score.is_unbounded() ? json("inf") : json(score.value());
        json matrix = json::array();
        for (std::size_t i = 0; i < subset.size(); ++i) {
            json row = json::array();
            for (std::size_t j = 0; j < subset.size(); ++j) row.push_back(s.at(i, j));
            matrix.push_back(row);
        }
        out << json{{"metrics", subset},
                    {"spearman", matrix},
                    {"vif", vj},
                    {"has_collinearity", flags.has_collinearity},
                    {"has_multicollinearity", flags.has_multicollinearity}}
                   .dump(2)
            << '\n';
        return kExitOk;
    }

    out << "spearman";
    for (const auto& m : subset) out << '\t' << m;
    out << '\n';
    for (std::size_t i = 0; i < subset.size(); ++i) {
        out << subset[i];
        for (std::size_t j = 0; j < subset.size(); ++j) out << '\t' << render(s.at(i, j));
        out << '\n';
    }
    out << "\nmetric\tvif\n";
    for (const auto& [name, score] : vif.scores) out << name << '\t' << render(score.value()) << '\n';
    out << "\nhas_collinearity\t" << (flags.has_collinearity ? "true" : "false") << '\n';
    out << "has_multicollinearity\t" << (flags.has_multicollinearity ? "true" : "false") << '\n';
    return kExitOk;
}

int cmd_experiment(const std::string& path, const std::string& output, std::ostream& out) {
    ExperimentConfig config = load_experiment_config(path);
    if (!output.empty()) config.output = output;
    const ExperimentReport report = run_experiment(config);
    if (config.output) out << "report\t" << config.output->string() << '\n';
    if (config.csv_output) out << "cells\t" << config.csv_output->string() << '\n';

    const json& p = report.payload;
    out << "selector\tconsistency_pct";
    for (auto k : config.classifiers) out << '\t' << to_string(k) << "_auc_delta_median";
    out << '\n';
    for (auto id : config.selectors) {
        const std::string name = to_string(id);
        out << name << '\t' << render(p["consistency_across_samples"][name]["percentage"].get<double>());
        for (auto k : config.classifiers) {
            const json& perf = p["performance_deltas"];
            const std::string cls = to_string(k);
            if (perf.contains(name) && perf[name].contains(cls) && perf[name][cls].contains("AUC"))
                out << '\t' << render(perf[name][cls]["AUC"]["median"].get<double>());
            else
                out << "\tNA";
        }
        out << '\n';
    }
    out << "median_consistency_across_selectors\t"
        << render(p["consistency_across_selectors"]["summary"]["median"].get<double>()) << '\n';
    if (!p["failures"].empty()) out << "failures\t" << p["failures"].size() << '\n';
    return kExitOk;
}

struct SynthArgs {
    std::size_t base_metrics = 5, modules = 500;
    std::vector<std::string> clones;
    std::string signal, out_path, outcome = "bug";
    double intercept = 0.0;
    std::uint64_t seed = kDefaultSeed;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    SyntheticSpec spec;
    spec.base_metric_count = a.base_metrics;
    spec.module_count = a.modules;
    spec.intercept = a.intercept;
    spec.seed = a.seed;
    for (const auto& c : a.clones) spec.clone_groups.push_back(parse_clone(c));
    for (const auto& v : split_list(a.signal)) {
        double x = 0.0;
        std::istringstream in(v);
        if (!(in >> x) || !(in >> std::ws).eof()) throw ConfigError("--signal value '" + v + "' is not a number");
        spec.signal_coefficients.push_back(x);
    }
    const Dataset d = generate_synthetic(spec);
    if (a.out_path.empty()) {
        write_csv(d, out, a.outcome);
        return kExitOk;
    }
    write_csv(d, std::filesystem::path(a.out_path), a.outcome);
    out << a.out_path << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"corrsel: correlated-metric elimination and feature-selection experiments"};
    app.require_subcommand(1, 1);

    SelectArgs sel;
    auto* select_cmd = app.add_subcommand("select", "Select metrics from a CSV dataset");
    select_cmd->add_option("dataset", sel.dataset, "CSV file")->required();
    select_cmd->add_option("--outcome", sel.outcome, "Outcome column")->required();
    select_cmd->add_option("--selector", sel.selector, "Selector abbreviation")->capture_default_str();
    select_cmd->add_option("--sp-t", sel.sp_t, "Spearman threshold")->capture_default_str();
    select_cmd->add_option("--vif-t", sel.vif_t, "VIF threshold")->capture_default_str();
    select_cmd->add_option("--seed", sel.seed, "Seed for randomized selectors")->capture_default_str();
    select_cmd->add_flag("--json", sel.json, "Machine-readable output");

    DiagnoseArgs diag;
    auto* diagnose_cmd = app.add_subcommand("diagnose", "Spearman matrix, VIF table and correlation flags");
    diagnose_cmd->add_option("dataset", diag.dataset, "CSV file")->required();
    diagnose_cmd->add_option("--outcome", diag.outcome, "Outcome column")->required();
    diagnose_cmd->add_option("--metrics", diag.metrics, "Comma-separated metric names (default: all)");
    diagnose_cmd->add_option("--sp-t", diag.sp_t, "Spearman threshold")->capture_default_str();
    diagnose_cmd->add_option("--vif-t", diag.vif_t, "VIF threshold")->capture_default_str();
    diagnose_cmd->add_flag("--json", diag.json, "Machine-readable output");

    std::string config_path, config_output;
    auto* experiment_cmd = app.add_subcommand("experiment", "Run a bootstrap experiment from a JSON config");
    experiment_cmd->add_option("config", config_path, "JSON config")->required();
    experiment_cmd->add_option("--output", config_output, "Report path (overrides the config)");

    SynthArgs syn;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic dataset with planted clones");
    synth_cmd->add_option("--base-metrics", syn.base_metrics, "Independent base metrics")->capture_default_str();
    synth_cmd->add_option("--clone", syn.clones, "Clone group source:count:sd (repeatable)");
    synth_cmd->add_option("--modules", syn.modules, "Rows")->capture_default_str();
    synth_cmd->add_option("--signal", syn.signal, "Comma-separated log-odds weights per base metric");
    synth_cmd->add_option("--intercept", syn.intercept, "Log-odds intercept")->capture_default_str();
    synth_cmd->add_option("--seed", syn.seed, "Generator seed")->capture_default_str();
    synth_cmd->add_option("--out", syn.out_path, "Output CSV (default: stdout)");
    synth_cmd->add_option("--outcome-name", syn.outcome, "Outcome column name")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*select_cmd) return cmd_select(sel, out);
        if (*diagnose_cmd) return cmd_diagnose(diag, out);
        if (*experiment_cmd) return cmd_experiment(config_path, config_output, out);
        if (*synth_cmd) return cmd_synth(syn, out);
    } catch (const UnsupportedSelector& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const ComputationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitComputation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitComputation;
    }
    return kExitUsage;
}

}  // namespace corrsel
