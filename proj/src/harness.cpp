#include "corrsel/harness.hpp"

#include "corrsel/classifiers.hpp"
#include "corrsel/errors.hpp"
#include "corrsel/random.hpp"
#include "corrsel/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

namespace corrsel {

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CORRSEL_THREADS")) {
        char* end = nullptr;
        const unsigned long value = std::strtoul(env, &end, 10);
        if (end != env && value > 0) return unsigned(value);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = unsigned(std::min<std::size_t>(resolve_threads(threads), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    pool.clear();
    if (first_error) std::rethrow_exception(first_error);
}

std::uint64_t sample_seed(std::uint64_t base_seed, std::size_t sample) { return derive_seed(base_seed, {sample}); }

std::uint64_t selector_seed(std::uint64_t base_seed, std::size_t sample, SelectorId id) {
    return derive_seed(base_seed, {sample, std::uint64_t(id) + 1});
}

BootstrapSplit harness_split(const Dataset& d, std::uint64_t seed, std::uint64_t* effective_seed) {
    for (int attempt = 0;; ++attempt) {
        try {
            BootstrapSplit split = bootstrap_sample(d, seed);
            if (effective_seed) *effective_seed = seed;
            return split;
        } catch (const EmptyTestSet&) {
            if (attempt >= 64) throw;
            seed += kBootstrapRetryOffset;
        }
    }
}

const std::optional<MetricSubset>& SubsetCollection::at(SelectorId id, std::size_t sample) const {
    return cells.at(position(id)).at(sample);
}

std::size_t SubsetCollection::position(SelectorId id) const {
    const auto it = std::find(selectors.begin(), selectors.end(), id);
    if (it == selectors.end()) throw UnsupportedSelector(to_string(id) + " is not part of this grid");
    return std::size_t(it - selectors.begin());
}

SubsetCollection run_selection_grid(const Dataset& d, const std::vector<SelectorId>& selectors, std::size_t samples,
                                    std::uint64_t base_seed, const SelectorConfig& config, unsigned threads,
                                    std::string dataset_id) {
    if (samples < 1) throw ConfigError("bootstrap count must be >= 1");
    SubsetCollection grid;
    grid.dataset_id = std::move(dataset_id);
    grid.sample_count = samples;
    grid.selectors = selectors;
    grid.split_seeds.assign(samples, 0);
    grid.cells.assign(selectors.size(), std::vector<std::optional<MetricSubset>>(samples));

    std::vector<std::vector<CellFailure>> failures(samples);
    parallel_for(samples, threads, [&](std::size_t j) {
        BootstrapSplit split = harness_split(d, sample_seed(base_seed, j), &grid.split_seeds[j]);
        for (std::size_t s = 0; s < selectors.size(); ++s) {
            try {
                grid.cells[s][j] = select(selectors[s], split.train, config, selector_seed(base_seed, j, selectors[s]));
            } catch (const std::exception& e) {
                failures[j].push_back({to_string(selectors[s]), j, "select", e.what()});
            }
        }
    });
    for (auto& f : failures) grid.failures.insert(grid.failures.end(), f.begin(), f.end());
    return grid;
}

ConsistencyResult subset_consistency(const std::vector<MetricSubset>& subsets) {
    ConsistencyResult out;
    if (subsets.empty()) return out;
    std::set<std::string> unions;
    std::set<std::string> intersection(subsets.front().begin(), subsets.front().end());
    for (const auto& s : subsets) {
        unions.insert(s.begin(), s.end());
        const std::set<std::string> current(s.begin(), s.end());
        std::set<std::string> kept;
        std::set_intersection(intersection.begin(), intersection.end(), current.begin(), current.end(),
                              std::inserter(kept, kept.begin()));
        intersection = std::move(kept);
    }
    out.intersection_size = intersection.size();
    out.union_size = unions.size();
    out.percentage = out.union_size == 0 ? 0.0 : 100.0 * double(out.intersection_size) / double(out.union_size);
    return out;
}

ConsistencyResult consistency_across_samples(const std::vector<MetricSubset>& subsets) {
    return subset_consistency(subsets);
}

ConsistencyResult consistency_across_selectors(const std::vector<MetricSubset>& subsets_one_sample) {
    return subset_consistency(subsets_one_sample);
}

CorrelationFlags correlation_flags(const MetricSubset& subset, const Dataset& train, double sp_t, double vif_t,
                                   bool strict) {
    CorrelationFlags flags;
    if (subset.size() < 2) return flags;
    const Dataset projected = train.project(subset);
    const CorrelationMatrix s = spearman_matrix(projected);
    for (std::size_t i = 0; i < subset.size() && !flags.has_collinearity; ++i)
        for (std::size_t j = i + 1; j < subset.size(); ++j) {
            const double r = std::abs(s.at(i, j));
            if (strict ? r > sp_t : r >= sp_t) {
                flags.has_collinearity = true;
                break;
            }
        }
    for (const auto& [name, score] : vif_scores(projected, subset).scores)
        if (strict ? score.above(vif_t) : score.at_least(vif_t)) {
            flags.has_multicollinearity = true;
            break;
        }
    return flags;
}

std::string to_string(ClassifierKind k) { return k == ClassifierKind::Logistic ? "logistic" : "forest"; }

std::string to_string(Measure m) {
    switch (m) {
        case Measure::AUC: return "AUC";
        case Measure::F: return "F";
        case Measure::MCC: return "MCC";
    }
    return "?";
}

ClassifierKind parse_classifier(std::string_view text) {
    std::string t;
    for (char c : text) t.push_back(char(std::tolower(static_cast<unsigned char>(c))));
    if (t == "logistic" || t == "lr") return ClassifierKind::Logistic;
    if (t == "forest" || t == "rf") return ClassifierKind::Forest;
    throw ConfigError("unknown classifier '" + std::string(text) + "'; valid: logistic, forest");
}

std::uint64_t digest_indices(const std::vector<std::size_t>& indices) {
    std::uint64_t h = splitmix64(indices.size());
    for (auto i : indices) h = splitmix64(h ^ std::uint64_t(i));
    return h;
}

namespace {

// Probability scores on test rows; an empty subset predicts the constant
// intercept-only probability.
std::vector<double> fit_and_score(const Dataset& train, const Dataset& test, const MetricSubset& subset,
                                  ClassifierKind kind, int forest_trees, std::uint64_t forest_seed) {
    if (kind == ClassifierKind::Logistic || subset.empty()) return predict_all(fit_logistic(train, subset), test);
    return predict_all(fit_random_forest(train, subset, forest_trees, forest_seed), test);
}

MetricSubset column_ordered(const Dataset& d, const MetricSubset& subset) {
    auto idx = d.indices_of(subset);
    std::sort(idx.begin(), idx.end());
    MetricSubset out;
    for (auto j : idx) out.push_back(d.metric_names()[j]);
    return out;
}

}  // namespace

PerformanceRun performance_deltas(const Dataset& d, const SubsetCollection& grid,
                                  const std::vector<ClassifierKind>& classifiers, std::uint64_t base_seed,
                                  int forest_trees, unsigned threads) {
    const std::size_t samples = grid.sample_count;
    std::vector<std::vector<PerformanceDelta>> per_sample(samples);
    std::vector<std::vector<CellFailure>> failures(samples);

    parallel_for(samples, threads, [&](std::size_t j) {
        const BootstrapSplit split = bootstrap_sample(d, grid.split_seeds[j]);
        const std::size_t rows = split.test_indices.size();
        const std::uint64_t digest = digest_indices(split.test_indices);
        const bool auc_defined = split.test.has_both_classes();
        if (!auc_defined)
            failures[j].push_back({"All", j, "auc", "test rows hold a single class; AUC skipped for this sample"});
        // One forest seed per sample so identical subsets give identical forests.
        const std::uint64_t forest_seed = derive_seed(base_seed, {j, 0xF02E57});

        for (auto kind : classifiers) {
            std::vector<double> all_scores;
            try {
                all_scores = fit_and_score(split.train, split.test, column_ordered(d, d.metric_names()), kind,
                                           forest_trees, forest_seed);
            } catch (const std::exception& e) {
                failures[j].push_back({"All", j, "fit-" + to_string(kind), e.what()});
                continue;
            }
            const ConfusionMatrix all_cm = confusion_at(all_scores, split.test.outcome());
            const double all_auc = auc_defined ? auc(all_scores, split.test.outcome()) : 0.0;

            for (std::size_t s = 0; s < grid.selectors.size(); ++s) {
                const auto& subset = grid.cells[s][j];
                if (!subset) continue;
                std::vector<double> scores;
                try {
                    scores = fit_and_score(split.train, split.test, column_ordered(d, *subset), kind, forest_trees,
                                           forest_seed);
                } catch (const std::exception& e) {
                    failures[j].push_back({to_string(grid.selectors[s]), j, "fit-" + to_string(kind), e.what()});
                    continue;
                }
                const ConfusionMatrix cm = confusion_at(scores, split.test.outcome());
                const auto push = [&](Measure m, double selected, double all) {
                    per_sample[j].push_back(
                        {grid.selectors[s], kind, m, j, selected, all, 100.0 * (selected - all), rows, digest});
                };
                if (auc_defined) push(Measure::AUC, auc(scores, split.test.outcome()), all_auc);
                push(Measure::F, f_measure(cm), f_measure(all_cm));
                push(Measure::MCC, mcc(cm), mcc(all_cm));
            }
        }
    });

    PerformanceRun run;
    for (std::size_t j = 0; j < samples; ++j) {
        run.deltas.insert(run.deltas.end(), per_sample[j].begin(), per_sample[j].end());
        run.failures.insert(run.failures.end(), failures[j].begin(), failures[j].end());
    }
    return run;
}

PerformanceRun performance_deltas(const Dataset& d, const std::vector<SelectorId>& selectors, std::size_t samples,
                                  const std::vector<ClassifierKind>& classifiers, std::uint64_t base_seed,
                                  const SelectorConfig& config, int forest_trees, unsigned threads) {
    const SubsetCollection grid = run_selection_grid(d, selectors, samples, base_seed, config, threads);
    PerformanceRun run = performance_deltas(d, grid, classifiers, base_seed, forest_trees, threads);
    run.failures.insert(run.failures.begin(), grid.failures.begin(), grid.failures.end());
    return run;
}

Quartiles quartiles(std::vector<double> values) {
    Quartiles q;
    q.count = values.size();
    if (values.empty()) return q;
    std::sort(values.begin(), values.end());
    const auto at = [&](double prob) {
        const double h = double(values.size() - 1) * prob;
        const auto lo = std::size_t(std::floor(h));
        const double frac = h - double(lo);
        return lo + 1 < values.size() ? values[lo] + frac * (values[lo + 1] - values[lo]) : values[lo];
    };
    q.q1 = at(0.25);
    q.median = at(0.5);
    q.q3 = at(0.75);
    return q;
}

}  // namespace corrsel
