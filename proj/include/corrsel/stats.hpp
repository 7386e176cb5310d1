#pragma once

#include "corrsel/dataset.hpp"

#include <Eigen/Core>

#include <compare>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace corrsel {

// Ranks 1..n; ties receive the average of the ranks they span.
std::vector<double> rank_with_ties(std::span<const double> values);

bool is_constant(std::span<const double> values);

// Pearson correlation; 0 when either input is constant. Throws LengthMismatch.
double pearson(std::span<const double> x, std::span<const double> y);

// Pearson correlation of average ranks; 0 when either input is constant.
// Throws LengthMismatch (also for fewer than 2 values).
double spearman(std::span<const double> x, std::span<const double> y);

struct CorrelationMatrix {
    std::vector<std::string> metric_names;
    Eigen::MatrixXd values;

    double at(std::size_t i, std::size_t j) const { return values(Eigen::Index(i), Eigen::Index(j)); }
    double at(const std::string& a, const std::string& b) const;
};

CorrelationMatrix spearman_matrix(const Dataset& d);

// R^2 of the least-squares fit of target on predictors plus an intercept,
// through a column-pivoted QR so that rank-deficient designs fit in their
// identified column space. Clamped to [0, 1]; a constant target yields 0.
double ols_r_squared(std::span<const double> target, const Eigen::MatrixXd& predictors);

inline constexpr double kUnboundedVifTolerance = 1e-10;

// VIF of one metric. Unbounded marks perfect linear dependence and orders
// above every finite value.
class VifScore {
public:
    static VifScore finite(double value) { return VifScore(value, false); }
    static VifScore unbounded() { return VifScore(0.0, true); }
    static VifScore from_r_squared(double r_squared);

    bool is_unbounded() const noexcept { return unbounded_; }
    // +inf when unbounded.
    double value() const noexcept;

    bool at_least(double threshold) const noexcept { return unbounded_ || value_ >= threshold; }
    bool above(double threshold) const noexcept { return unbounded_ || value_ > threshold; }

    std::partial_ordering operator<=>(const VifScore& other) const noexcept;
    bool operator==(const VifScore& other) const noexcept = default;

private:
    VifScore(double value, bool unbounded) : value_(value), unbounded_(unbounded) {}
    double value_;
    bool unbounded_;
};

struct VifReport {
    // In subset order.
    std::vector<std::pair<std::string, VifScore>> scores;

    const VifScore& at(const std::string& metric) const;
};

// VIF(m) = 1 / (1 - R^2) from regressing m on the other subset metrics.
VifReport vif_scores(const Dataset& d, const MetricSubset& subset);

struct DiscreteColumn {
    std::vector<int> labels;
    // Sorted interior cut points; label = number of edges <= value.
    std::vector<double> bin_edges;

    int bin_count() const noexcept { return static_cast<int>(bin_edges.size()) + 1; }
};

// Cut points at type-7 empirical quantiles with duplicate edges merged, so
// fewer than `bins` effective bins can result. When the column has no more
// distinct values than bins, every distinct value gets its own bin.
// Throws TooFewValues when bins < 2 or values.size() < bins.
DiscreteColumn discretize_equal_frequency(std::span<const double> values, int bins);

// Supervised minimum-description-length discretization (recursive entropy
// splitting with the Fayyad-Irani stopping rule). A column without any
// accepted cut becomes a single bin.
DiscreteColumn discretize_mdl(std::span<const double> values, const std::vector<bool>& outcome);

double entropy_bits(std::span<const double> counts);
double outcome_entropy(const std::vector<bool>& outcome);

// H(outcome) - sum_b p(b) H(outcome | b), in bits. Throws LengthMismatch.
double information_gain(const DiscreteColumn& metric, const std::vector<bool>& outcome);

// Pearson chi-squared over the bins x 2 contingency table; E = 0 cells add 0.
// Throws LengthMismatch.
double chi_squared(const DiscreteColumn& metric, const std::vector<bool>& outcome);

// Fraction of rows outside the majority outcome of their joint discrete
// pattern. An empty column list puts every row into one pattern.
double inconsistency_rate(std::span<const DiscreteColumn* const> columns, const std::vector<bool>& outcome);

// Equal-frequency discretization of each subset column, then the rate above.
double inconsistency_rate(const Dataset& d, const MetricSubset& subset, int bins);

inline double aic(double log_likelihood, int parameter_count) {
    return 2.0 * parameter_count - 2.0 * log_likelihood;
}

}  // namespace corrsel
