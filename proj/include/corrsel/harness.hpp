#pragma once

#include "corrsel/classifiers.hpp"
#include "corrsel/dataset.hpp"
#include "corrsel/evaluation.hpp"
#include "corrsel/selectors.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace corrsel {

inline constexpr std::uint64_t kDefaultSeed = 20180905;
inline constexpr int kDefaultBootstrapCount = 30;
// Added to a sample seed when its bootstrap leaves no out-of-bag rows.
inline constexpr std::uint64_t kBootstrapRetryOffset = 0x9E3779B97F4A7C15ULL;

// Worker count: explicit value if > 0, else CORRSEL_THREADS if set and > 0,
// else hardware concurrency.
unsigned resolve_threads(unsigned requested);

// Runs fn(i) for i in [0, count) on up to `threads` workers. fn must only
// write to slot i of preallocated output.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

std::uint64_t sample_seed(std::uint64_t base_seed, std::size_t sample);
std::uint64_t selector_seed(std::uint64_t base_seed, std::size_t sample, SelectorId id);

// Bootstrap for sample j, reseeding with kBootstrapRetryOffset on EmptyTestSet.
// `effective_seed` receives the seed that produced the split.
BootstrapSplit harness_split(const Dataset& d, std::uint64_t seed, std::uint64_t* effective_seed = nullptr);

struct CellFailure {
    std::string selector;  // may be "All"
    std::size_t sample = 0;
    std::string stage;
    std::string message;
};

struct SubsetCollection {
    std::string dataset_id;
    std::size_t sample_count = 0;
    std::vector<SelectorId> selectors;
    std::vector<std::uint64_t> split_seeds;  // effective seed per sample
    // cells[selector position][sample]; nullopt marks a failed cell.
    std::vector<std::vector<std::optional<MetricSubset>>> cells;
    std::vector<CellFailure> failures;

    const std::optional<MetricSubset>& at(SelectorId id, std::size_t sample) const;
    std::size_t position(SelectorId id) const;
};

SubsetCollection run_selection_grid(const Dataset& d, const std::vector<SelectorId>& selectors, std::size_t samples,
                                    std::uint64_t base_seed, const SelectorConfig& config = {}, unsigned threads = 0,
                                    std::string dataset_id = "dataset");

struct ConsistencyResult {
    double percentage = 0.0;
    std::size_t intersection_size = 0;
    std::size_t union_size = 0;
};

// 100 |intersection| / |union|; 0 when the union is empty.
ConsistencyResult subset_consistency(const std::vector<MetricSubset>& subsets);
ConsistencyResult consistency_across_samples(const std::vector<MetricSubset>& subsets);
ConsistencyResult consistency_across_selectors(const std::vector<MetricSubset>& subsets_one_sample);

struct CorrelationFlags {
    bool has_collinearity = false;
    bool has_multicollinearity = false;
};

// strict = true: |rho| > sp_t and VIF > vif_t (Unbounded counts as above).
// strict = false: the >= comparisons used during elimination.
CorrelationFlags correlation_flags(const MetricSubset& subset, const Dataset& train,
                                   double sp_t = kDefaultSpearmanThreshold, double vif_t = kDefaultVifThreshold,
                                   bool strict = true);

enum class ClassifierKind { Logistic, Forest };
enum class Measure { AUC, F, MCC };

std::string to_string(ClassifierKind k);
std::string to_string(Measure m);
ClassifierKind parse_classifier(std::string_view text);

struct PerformanceDelta {
    SelectorId selector = SelectorId::AutoSpearman;
    ClassifierKind classifier = ClassifierKind::Logistic;
    Measure measure = Measure::AUC;
    std::size_t sample = 0;
    double selected = 0.0;
    double all = 0.0;
    double delta = 0.0;  // percentage points, 100 (selected - all)
    // Both terms were evaluated on these test rows.
    std::size_t test_rows = 0;
    std::uint64_t test_digest = 0;
};

struct PerformanceRun {
    std::vector<PerformanceDelta> deltas;
    std::vector<CellFailure> failures;
};

std::uint64_t digest_indices(const std::vector<std::size_t>& indices);

// Fits each classifier on the sample's training rows restricted to the
// selected subset and to all metrics; evaluates both on the same test rows.
PerformanceRun performance_deltas(const Dataset& d, const SubsetCollection& grid,
                                  const std::vector<ClassifierKind>& classifiers, std::uint64_t base_seed,
                                  int forest_trees = kDefaultTreeCount, unsigned threads = 0);

PerformanceRun performance_deltas(const Dataset& d, const std::vector<SelectorId>& selectors, std::size_t samples,
                                  const std::vector<ClassifierKind>& classifiers, std::uint64_t base_seed,
                                  const SelectorConfig& config = {}, int forest_trees = kDefaultTreeCount,
                                  unsigned threads = 0);

struct ExperimentConfig {
    std::optional<std::filesystem::path> dataset_path;
    std::optional<SyntheticSpec> synthetic;
    std::string outcome_column = "bug";
    std::vector<SelectorId> selectors = all_selectors();
    std::size_t bootstrap_count = kDefaultBootstrapCount;
    std::uint64_t base_seed = kDefaultSeed;
    SelectorConfig selector_config;
    std::vector<ClassifierKind> classifiers{ClassifierKind::Logistic, ClassifierKind::Forest};
    int forest_trees = kDefaultTreeCount;
    std::optional<std::filesystem::path> output;
    std::optional<std::filesystem::path> csv_output;
    unsigned threads = 0;
};

struct Quartiles {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    std::size_t count = 0;
};

// Type-7 quantiles; all zero when values is empty.
Quartiles quartiles(std::vector<double> values);

}  // namespace corrsel
