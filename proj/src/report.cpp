#include "corrsel/report.hpp"

#include "corrsel/errors.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace corrsel {

using nlohmann::json;

json trace_to_json(const EliminationTrace& trace) {
    json out = json::array();
    for (const auto& step : trace) {
        json entry{{"phase", to_string(step.phase)}, {"removed", step.removed}};
        entry["kept"] = step.kept.empty() ? json(nullptr) : json(step.kept);
        entry["statistic"] = std::isinf(step.statistic) ? json("inf") : json(step.statistic);
        out.push_back(std::move(entry));
    }
    return out;
}

json synthetic_spec_to_json(const SyntheticSpec& spec) {
    json groups = json::array();
    for (const auto& g : spec.clone_groups)
        groups.push_back({{"source", g.source}, {"count", g.count}, {"noise_sd", g.noise_sd}});
    return {{"base_metric_count", spec.base_metric_count},
            {"clone_groups", groups},
            {"module_count", spec.module_count},
            {"signal_coefficients", spec.signal_coefficients},
            {"intercept", spec.intercept},
            {"seed", spec.seed}};
}

namespace {

template <typename T>
T field(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

template <typename T>
T required(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
    return field<T>(j, key, T{});
}

}  // namespace

SyntheticSpec synthetic_spec_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("synthetic spec must be an object");
    SyntheticSpec spec;
    spec.base_metric_count = required<std::size_t>(j, "base_metric_count");
    spec.module_count = required<std::size_t>(j, "module_count");
    spec.signal_coefficients = field<std::vector<double>>(j, "signal_coefficients", {});
    spec.intercept = field<double>(j, "intercept", 0.0);
    spec.seed = field<std::uint64_t>(j, "seed", kDefaultSeed);
    if (j.contains("clone_groups")) {
        for (const auto& g : j.at("clone_groups")) {
            spec.clone_groups.push_back({required<std::size_t>(g, "source"), field<std::size_t>(g, "count", 1),
                                         field<double>(g, "noise_sd", 0.0)});
        }
    }
    return spec;
}

ExperimentConfig parse_experiment_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c;
    if (!j.contains("dataset")) throw ConfigError("missing field 'dataset'");
    const json& dataset = j.at("dataset");
    if (dataset.is_string()) {
        c.dataset_path = dataset.get<std::string>();
    } else if (dataset.is_object()) {
        c.synthetic = synthetic_spec_from_json(dataset.contains("synthetic") ? dataset.at("synthetic") : dataset);
    } else {
        throw ConfigError("'dataset' must be a CSV path or a synthetic spec object");
    }
    c.outcome_column = field<std::string>(j, "outcome_column", c.outcome_column);
    if (c.dataset_path && !j.contains("outcome_column")) throw ConfigError("missing field 'outcome_column'");

    if (j.contains("selectors")) {
        c.selectors.clear();
        for (const auto& s : j.at("selectors")) c.selectors.push_back(parse_selector(s.get<std::string>()));
        if (c.selectors.empty()) throw ConfigError("'selectors' must not be empty");
    }
    const auto count = field<long long>(j, "bootstrap_count", kDefaultBootstrapCount);
    if (count < 1) throw ConfigError("bootstrap_count must be >= 1");
    c.bootstrap_count = std::size_t(count);
    c.base_seed = field<std::uint64_t>(j, "base_seed", kDefaultSeed);

    auto& sc = c.selector_config;
    sc.autospearman.sp_t = field<double>(j, "sp_t", kDefaultSpearmanThreshold);
    sc.autospearman.vif_t = field<double>(j, "vif_t", kDefaultVifThreshold);
    sc.autospearman.mean_against_remaining = field<bool>(j, "mean_against_remaining", false);
    sc.bins = field<int>(j, "bins", sc.bins);
    sc.discretizer = parse_discretizer(field<std::string>(j, "discretizer", to_string(sc.discretizer)));
    if (j.contains("top_k") && !j.at("top_k").is_null()) sc.top_k = field<std::size_t>(j, "top_k", 1);
    sc.rfe_resamples = field<int>(j, "rfe_resamples", sc.rfe_resamples);
    sc.rfe_sizes = field<std::vector<std::size_t>>(j, "rfe_sizes", {});
    sc.stepwise_max_steps = field<int>(j, "stepwise_max_steps", sc.stepwise_max_steps);
    sc.best_first_stall = field<int>(j, "best_first_stall", sc.best_first_stall);
    c.forest_trees = field<int>(j, "forest_trees", c.forest_trees);
    sc.rfe_forest_trees = field<int>(j, "rfe_forest_trees", c.forest_trees);
    validate(sc);
    if (c.forest_trees < 1) throw ConfigError("forest_trees must be >= 1");

    if (j.contains("classifiers")) {
        c.classifiers.clear();
        for (const auto& k : j.at("classifiers")) c.classifiers.push_back(parse_classifier(k.get<std::string>()));
    }
    if (j.contains("output") && !j.at("output").is_null()) c.output = j.at("output").get<std::string>();
    if (j.contains("csv_output") && !j.at("csv_output").is_null()) c.csv_output = j.at("csv_output").get<std::string>();
    c.threads = field<unsigned>(j, "threads", 0);
    return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_experiment_config(j);
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    if (c.dataset_path)
        j["dataset"] = c.dataset_path->string();
    else if (c.synthetic)
        j["dataset"] = {{"synthetic", synthetic_spec_to_json(*c.synthetic)}};
    j["outcome_column"] = c.outcome_column;
    json selectors = json::array();
    for (auto id : c.selectors) selectors.push_back(to_string(id));
    j["selectors"] = selectors;
    j["bootstrap_count"] = c.bootstrap_count;
    j["base_seed"] = c.base_seed;
    const auto& sc = c.selector_config;
    j["sp_t"] = sc.autospearman.sp_t;
    j["vif_t"] = sc.autospearman.vif_t;
    j["mean_against_remaining"] = sc.autospearman.mean_against_remaining;
    j["bins"] = sc.bins;
    j["discretizer"] = to_string(sc.discretizer);
    j["top_k"] = sc.top_k ? json(*sc.top_k) : json(nullptr);
    j["rfe_resamples"] = sc.rfe_resamples;
    j["rfe_sizes"] = sc.rfe_sizes;
    j["rfe_forest_trees"] = sc.rfe_forest_trees;
    j["stepwise_max_steps"] = sc.stepwise_max_steps;
    j["best_first_stall"] = sc.best_first_stall;
    json classifiers = json::array();
    for (auto k : c.classifiers) classifiers.push_back(to_string(k));
    j["classifiers"] = classifiers;
    j["forest_trees"] = c.forest_trees;
    j["output"] = c.output ? json(c.output->string()) : json(nullptr);
    j["csv_output"] = c.csv_output ? json(c.csv_output->string()) : json(nullptr);
    return j;
}

namespace {

json consistency_json(const ConsistencyResult& r) {
    return {{"percentage", r.percentage}, {"intersection", r.intersection_size}, {"union", r.union_size}};
}

json quartiles_json(const Quartiles& q) {
    return {{"median", q.median}, {"q1", q.q1}, {"q3", q.q3}, {"n", q.count}};
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
    validate(config.selector_config);
    if (config.bootstrap_count < 1) throw ConfigError("bootstrap_count must be >= 1");
    if (!config.dataset_path && !config.synthetic) throw ConfigError("config names no dataset");

    std::string dataset_id;
    const Dataset d = [&] {
        if (config.dataset_path) {
            dataset_id = config.dataset_path->filename().string();
            return load_csv(*config.dataset_path, config.outcome_column);
        }
        dataset_id = "synthetic-" + std::to_string(config.synthetic->seed);
        return generate_synthetic(*config.synthetic);
    }();
    const unsigned threads = resolve_threads(config.threads);
    const double sp_t = config.selector_config.autospearman.sp_t;
    const double vif_t = config.selector_config.autospearman.vif_t;

    ExperimentReport report;
    report.grid = run_selection_grid(d, config.selectors, config.bootstrap_count, config.base_seed,
                                     config.selector_config, threads, dataset_id);
    const auto& grid = report.grid;
    const std::size_t samples = grid.sample_count;

    // Correlation flags per cell, on that sample's training rows.
    struct FlagCell {
        bool valid = false;
        CorrelationFlags strict, at_threshold;
    };
    std::vector<std::vector<FlagCell>> flags(grid.selectors.size(), std::vector<FlagCell>(samples));
    parallel_for(samples, threads, [&](std::size_t j) {
        const BootstrapSplit split = bootstrap_sample(d, grid.split_seeds[j]);
        for (std::size_t s = 0; s < grid.selectors.size(); ++s) {
            const auto& subset = grid.cells[s][j];
            if (!subset) continue;
            flags[s][j] = {true, correlation_flags(*subset, split.train, sp_t, vif_t, true),
                           correlation_flags(*subset, split.train, sp_t, vif_t, false)};
        }
    });

    report.performance =
        performance_deltas(d, grid, config.classifiers, config.base_seed, config.forest_trees, threads);

    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["generated_at"] = timestamp_utc();
    j["config"] = config_to_json(config);
    const DatasetSummary summary = summarize(d);
    j["dataset"] = {{"id", dataset_id},
                    {"modules", summary.module_count},
                    {"metrics", summary.metric_count},
                    {"defective_ratio", summary.defective_ratio},
                    {"epv", summary.epv},
                    {"metric_names", d.metric_names()}};
    j["seeds"] = {{"base_seed", config.base_seed}, {"split_seeds", grid.split_seeds}};
    j["thresholds"] = {{"sp_t", sp_t},
                       {"vif_t", vif_t},
                       {"elimination_comparison", ">="},
                       {"flag_comparison", ">"}};
    j["selection_rules"] = {
        {"ranking_cutoff", config.selector_config.top_k ? "top_k" : "positive_score"},
        {"top_k", config.selector_config.top_k ? json(*config.selector_config.top_k) : json(nullptr)},
        {"discretizer", to_string(config.selector_config.discretizer)},
        {"bins", config.selector_config.bins}};

    json warnings = json::array();
    json across_samples = json::object();
    json flag_summary = json::object();
    for (std::size_t s = 0; s < grid.selectors.size(); ++s) {
        const std::string name = to_string(grid.selectors[s]);
        std::vector<MetricSubset> ok;
        for (const auto& cell : grid.cells[s])
            if (cell) ok.push_back(*cell);
        const ConsistencyResult r = consistency_across_samples(ok);
        json entry = consistency_json(r);
        entry["samples"] = ok.size();
        across_samples[name] = entry;
        if (!ok.empty() && r.union_size == 0)
            warnings.push_back(name + ": every selected subset is empty; consistency reported as 0");

        std::size_t valid = 0, col = 0, multi = 0, col_at = 0, multi_at = 0;
        for (const auto& f : flags[s]) {
            if (!f.valid) continue;
            ++valid;
            col += f.strict.has_collinearity;
            multi += f.strict.has_multicollinearity;
            col_at += f.at_threshold.has_collinearity;
            multi_at += f.at_threshold.has_multicollinearity;
        }
        const auto pct = [&](std::size_t k) { return valid == 0 ? 0.0 : 100.0 * double(k) / double(valid); };
        flag_summary[name] = {{"samples", valid},
                              {"collinearity_pct", pct(col)},
                              {"multicollinearity_pct", pct(multi)},
                              {"either_pct", pct([&] {
                                   std::size_t k = 0;
                                   for (const auto& f : flags[s])
                                       k += f.valid && (f.strict.has_collinearity || f.strict.has_multicollinearity);
                                   return k;
                               }())},
                              {"collinearity_at_threshold_pct", pct(col_at)},
                              {"multicollinearity_at_threshold_pct", pct(multi_at)}};
    }
    j["consistency_across_samples"] = across_samples;

    json per_sample = json::array();
    std::vector<double> per_sample_values;
    for (std::size_t sample = 0; sample < samples; ++sample) {
        std::vector<MetricSubset> subsets;
        bool complete = true;
        for (std::size_t s = 0; s < grid.selectors.size(); ++s) {
            if (!grid.cells[s][sample]) {
                complete = false;
                break;
            }
            subsets.push_back(*grid.cells[s][sample]);
        }
        if (!complete) {
            per_sample.push_back(nullptr);
            continue;
        }
        const ConsistencyResult r = consistency_across_selectors(subsets);
        per_sample.push_back(consistency_json(r));
        per_sample_values.push_back(r.percentage);
    }
    j["consistency_across_selectors"] = {{"per_sample", per_sample},
                                         {"summary", quartiles_json(quartiles(per_sample_values))}};
    j["correlation_flags"] = flag_summary;

    // (selector, classifier, measure) -> deltas
    std::map<std::tuple<std::string, std::string, std::string>, std::vector<double>> buckets;
    json perf_cells = json::array();
    for (const auto& pd : report.performance.deltas) {
        buckets[{to_string(pd.selector), to_string(pd.classifier), to_string(pd.measure)}].push_back(pd.delta);
        perf_cells.push_back({{"selector", to_string(pd.selector)},
                              {"classifier", to_string(pd.classifier)},
                              {"measure", to_string(pd.measure)},
                              {"sample", pd.sample},
                              {"selected", pd.selected},
                              {"all", pd.all},
                              {"delta_pct_points", pd.delta},
                              {"test_rows", pd.test_rows},
                              {"test_digest", pd.test_digest}});
    }
    json perf = json::object();
    for (const auto& [key, values] : buckets) {
        const auto& [sel, cls, measure] = key;
        perf[sel][cls][measure] = quartiles_json(quartiles(values));
    }
    j["performance_deltas"] = perf;
    j["performance_cells"] = perf_cells;

    json cells = json::array();
    for (std::size_t s = 0; s < grid.selectors.size(); ++s)
        for (std::size_t sample = 0; sample < samples; ++sample) {
            const auto& cell = grid.cells[s][sample];
            json entry{{"selector", to_string(grid.selectors[s])}, {"sample", sample}};
            entry["subset"] = cell ? json(*cell) : json(nullptr);
            if (flags[s][sample].valid) {
                entry["has_collinearity"] = flags[s][sample].strict.has_collinearity;
                entry["has_multicollinearity"] = flags[s][sample].strict.has_multicollinearity;
            }
            cells.push_back(std::move(entry));
        }
    j["cells"] = cells;

    json failures = json::array();
    const auto add_failures = [&](const std::vector<CellFailure>& list) {
        for (const auto& f : list)
            failures.push_back(
                {{"selector", f.selector}, {"sample", f.sample}, {"stage", f.stage}, {"message", f.message}});
    };
    add_failures(grid.failures);
    add_failures(report.performance.failures);
    j["failures"] = failures;
    j["warnings"] = warnings;

    report.payload = std::move(j);
    if (config.output) write_text_atomically(*config.output, report.payload.dump(2) + "\n");
    if (config.csv_output) write_text_atomically(*config.csv_output, cells_csv(report));
    return report;
}

std::string report_payload_text(const json& report) {
    json copy = report;
    copy.erase("generated_at");
    return copy.dump();
}

void write_text_atomically(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out << text;
        out.flush();
        if (!out) throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move report into '" + path.string() + "': " + ec.message());
}

std::string cells_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out << "selector,classifier,measure,sample,selected,all,delta_pct_points,test_rows\n";
    for (const auto& pd : report.performance.deltas)
        out << to_string(pd.selector) << ',' << to_string(pd.classifier) << ',' << to_string(pd.measure) << ','
            << pd.sample << ',' << format_double(pd.selected) << ',' << format_double(pd.all) << ','
            << format_double(pd.delta) << ',' << pd.test_rows << '\n';
    return out.str();
}

}  // namespace corrsel
