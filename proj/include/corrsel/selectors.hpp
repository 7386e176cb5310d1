#pragma once

#include "corrsel/autospearman.hpp"
#include "corrsel/dataset.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace corrsel {

enum class SelectorId { CFS, IG, Chisq, CON, RFE_LR, RFE_RF, Step_FWD, Step_BWD, Step_BOTH, AutoSpearman };

// The nine baselines followed by AutoSpearman.
const std::vector<SelectorId>& all_selectors();

// Abbreviations: CFS, IG, Chisq, CON, RFE-LR, RFE-RF, Step-FWD, Step-BWD,
// Step-BOTH, AutoSpearman.
std::string to_string(SelectorId id);
std::string selector_abbreviations();

// Case-insensitive; '_' is accepted in place of '-'. Throws UnsupportedSelector.
SelectorId parse_selector(std::string_view text);

// How the entropy/chi-squared/consistency filters discretize metrics.
enum class Discretizer { Mdl, EqualFrequency };

std::string to_string(Discretizer d);
Discretizer parse_discretizer(std::string_view text);

struct SelectorConfig {
    Discretizer discretizer = Discretizer::Mdl;
    int bins = 10;  // equal-frequency bin count
    // Ranking filters keep strictly positive scores, or the best top_k.
    std::optional<std::size_t> top_k;
    int rfe_resamples = 10;
    std::vector<std::size_t> rfe_sizes;  // empty = 1..p
    int rfe_forest_trees = 100;
    int stepwise_max_steps = 0;  // 0 = 2p + 1
    int best_first_stall = 5;
    AutoSpearmanParams autospearman;
};

void validate(const SelectorConfig& config);

// Dispatches to the technique; reads only `train`. Deterministic per
// (train, config, seed).
MetricSubset select(SelectorId id, const Dataset& train, const SelectorConfig& config, std::uint64_t seed);

// Correlation-based feature selection.
double cfs_merit(const Dataset& d, const MetricSubset& subset);

struct CfsSearchResult {
    MetricSubset subset;
    double merit = 0.0;
    double best_visited_merit = 0.0;
    std::size_t visited = 0;
};

CfsSearchResult cfs_search(const Dataset& train, const SelectorConfig& config);
MetricSubset select_cfs(const Dataset& train, const SelectorConfig& config);

// Per-metric discretized filter score, in column order.
std::vector<std::pair<std::string, double>> filter_scores(const Dataset& train, SelectorId id,
                                                          const SelectorConfig& config);
MetricSubset select_ig(const Dataset& train, const SelectorConfig& config);
MetricSubset select_chisq(const Dataset& train, const SelectorConfig& config);

// Inconsistency rate of subset under the configured discretizer.
double subset_inconsistency(const Dataset& d, const MetricSubset& subset, const SelectorConfig& config);
MetricSubset select_consistency(const Dataset& train, const SelectorConfig& config);

enum class RfeBackend { LR, RF };

struct RfeResult {
    MetricSubset subset;
    // Every evaluated candidate with its mean internal AUC, largest first.
    std::vector<std::pair<MetricSubset, double>> evaluated;
};

RfeResult rfe_search(const Dataset& train, RfeBackend backend, const SelectorConfig& config, std::uint64_t seed);
MetricSubset select_rfe(const Dataset& train, RfeBackend backend, const SelectorConfig& config, std::uint64_t seed);

enum class StepDirection { Forward, Backward, Both };

struct StepwiseResult {
    MetricSubset subset;
    double start_aic = 0.0;
    double final_aic = 0.0;
    int steps = 0;
};

// AIC = 2(|subset| + 1) - 2 logLik of the logistic fit.
double subset_aic(const Dataset& d, const MetricSubset& subset);

StepwiseResult stepwise_search(const Dataset& train, StepDirection direction, const SelectorConfig& config);
MetricSubset select_stepwise(const Dataset& train, StepDirection direction, const SelectorConfig& config);

}  // namespace corrsel
