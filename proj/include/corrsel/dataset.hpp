#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace corrsel {

// Ordered list of metric names; order follows the source column order unless a
// selector documents otherwise (ranking filters order by score).
using MetricSubset = std::vector<std::string>;

// Numeric metric matrix (modules x metrics) with named columns and a binary
// outcome (true = defective).
//
// Construction checks the structural invariants: matching shapes, finite
// values, unique non-empty names, at least one row. Class balance is checked
// separately by require_supervised() because derived datasets such as a
// bootstrap test split may legitimately hold a single class.
class Dataset {
public:
    Dataset(std::vector<std::string> metric_names, Eigen::MatrixXd values, std::vector<bool> outcome);

    static Dataset from_rows(std::vector<std::string> metric_names,
                             const std::vector<std::vector<double>>& rows, std::vector<bool> outcome);

    const std::vector<std::string>& metric_names() const noexcept { return names_; }
    const Eigen::MatrixXd& values() const noexcept { return values_; }
    const std::vector<bool>& outcome() const noexcept { return outcome_; }

    std::size_t module_count() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t metric_count() const noexcept { return names_.size(); }
    std::size_t defective_count() const noexcept;
    bool has_both_classes() const noexcept;

    std::span<const double> column(std::size_t j) const;
    std::span<const double> column(std::string_view name) const;
    std::vector<double> row(std::size_t i) const;

    std::optional<std::size_t> index_of(std::string_view name) const;
    // Throws MissingColumn.
    std::size_t require_index(std::string_view name) const;
    std::vector<std::size_t> indices_of(const MetricSubset& subset) const;

    // Rows in the given order; indices may repeat.
    Dataset select_rows(std::span<const std::size_t> indices) const;
    // Columns restricted to subset, in subset order. An empty subset yields a
    // zero-column dataset that keeps the outcome.
    Dataset project(const MetricSubset& subset) const;

    bool operator==(const Dataset& other) const;

private:
    std::vector<std::string> names_;
    Eigen::MatrixXd values_;
    std::vector<bool> outcome_;
};

// Throws DegenerateOutcome unless both classes are present.
void require_supervised(const Dataset& d);

std::vector<double> outcome_as_double(const Dataset& d);

// CSV ingestion. The outcome column accepts 0/1 or clean/defective
// (case-insensitive). The loaded dataset has >= 2 rows, >= 1 metric and both
// outcome classes.
Dataset parse_csv(std::istream& in, std::string_view outcome_column);
Dataset load_csv(const std::filesystem::path& path, std::string_view outcome_column);

// Writes metrics in column order followed by the outcome column (0/1), using
// shortest round-trip float formatting.
void write_csv(const Dataset& d, std::ostream& out, std::string_view outcome_column);
void write_csv(const Dataset& d, const std::filesystem::path& path, std::string_view outcome_column);

std::string format_double(double value);

struct DatasetSummary {
    std::size_t module_count = 0;
    std::size_t metric_count = 0;
    std::size_t defective_count = 0;
    double defective_ratio = 0.0;  // percent
    double epv = 0.0;              // defective modules per metric
};

DatasetSummary summarize(const Dataset& d);

// Out-of-sample bootstrap: N draws with replacement form the training set, the
// never-drawn rows (in source order) form the test set.
struct BootstrapSplit {
    Dataset train;
    Dataset test;
    std::vector<std::size_t> draw_indices;
    std::vector<std::size_t> test_indices;
};

// Throws EmptyTestSet if every row was drawn.
BootstrapSplit bootstrap_sample(const Dataset& d, std::uint64_t seed);

struct CloneGroup {
    std::size_t source = 0;
    std::size_t count = 1;
    double noise_sd = 0.0;
};

struct SyntheticSpec {
    std::size_t base_metric_count = 1;
    std::vector<CloneGroup> clone_groups;
    std::size_t module_count = 100;
    // Log-odds weight per base metric; empty means all zero.
    std::vector<double> signal_coefficients;
    double intercept = 0.0;
    std::uint64_t seed = 0;
};

// Base metrics are named m0..m{k-1}; clones of base metric s are named
// m{s}_c{j} and follow the base metrics in clone-group order. Throws InvalidSpec.
Dataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace corrsel
