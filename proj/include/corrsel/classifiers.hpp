#pragma once

#include "corrsel/dataset.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace corrsel {

inline constexpr double kCoefficientCap = 30.0;
inline constexpr double kRidgeJitter = 1e-8;
inline constexpr double kProbabilityFloor = 1e-15;

struct LogisticOptions {
    int max_iter = 25;
    double tol = 1e-8;
};

struct LogisticModel {
    std::vector<std::string> metric_names;
    double intercept = 0.0;
    std::vector<double> coefficients;
    double log_likelihood = 0.0;
    bool converged = false;
    int iterations_used = 0;
    // Log-likelihood after every accepted step, starting from the initial point.
    std::vector<double> log_likelihood_trace;
};

// Binomial log-likelihood of (intercept, coefficients) on d's subset columns.
double logistic_log_likelihood(const Dataset& d, const std::vector<std::size_t>& columns, double intercept,
                               std::span<const double> coefficients);

// Iteratively reweighted least squares with step halving. An empty subset fits
// the intercept-only model. Coefficients that would exceed +/-30 (separation)
// are capped there and the model is marked not converged.
// Throws DegenerateOutcome.
LogisticModel fit_logistic(const Dataset& d, const MetricSubset& subset, const LogisticOptions& options = {});

// Throws DimensionMismatch.
double predict_logistic(const LogisticModel& m, std::span<const double> row);

struct TreeNode {
    int feature = -1;  // index into the forest's metric_names; -1 for a leaf
    double threshold = 0.0;  // go left when value <= threshold
    int left = -1;
    int right = -1;
    bool defective_vote = false;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    bool vote(std::span<const double> row) const;
};

struct ForestModel {
    std::vector<std::string> metric_names;
    std::vector<DecisionTree> trees;
    int ntree = 0;
    int mtry = 0;
    std::uint64_t seed = 0;
    // Total Gini decrease per metric, summed over trees (unnormalized).
    std::vector<double> impurity_decrease;
};

inline constexpr int kDefaultTreeCount = 100;

// Bagged Gini trees grown to purity (or until no split separates the node's
// rows). mtry = floor(sqrt(|subset|)) candidates per node, drawn without
// replacement; when none of them can split, the remaining metrics are tried.
// Tree t draws from a stream derived from (seed, t). Throws DegenerateOutcome.
ForestModel fit_random_forest(const Dataset& d, const MetricSubset& subset, int ntree = kDefaultTreeCount,
                              std::uint64_t seed = 0);

// Fraction of trees voting defective. Throws DimensionMismatch.
double predict_forest(const ForestModel& m, std::span<const double> row);

// metric name -> score
using ImportanceScores = std::map<std::string, double>;

// |coefficient| x sample standard deviation of the metric in d.
ImportanceScores importance(const LogisticModel& m, const Dataset& d);
// Mean decrease in impurity, normalized to sum 1 (uniform when no split was made).
ImportanceScores importance(const ForestModel& m, const Dataset& d);

// Row-wise predictions for all rows of d (columns looked up by the model's names).
std::vector<double> predict_all(const LogisticModel& m, const Dataset& d);
std::vector<double> predict_all(const ForestModel& m, const Dataset& d);

}  // namespace corrsel
