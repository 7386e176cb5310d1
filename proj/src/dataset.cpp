#include "corrsel/dataset.hpp"

#include "corrsel/errors.hpp"
#include "corrsel/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace corrsel {

namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return cells;
}

std::string unquote(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::optional<double> parse_finite(std::string_view cell) {
    if (cell.empty()) return std::nullopt;
    if (cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::optional<bool> parse_outcome(std::string_view cell) {
    std::string lower(cell);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "1" || lower == "defective") return true;
    if (lower == "0" || lower == "clean") return false;
    return std::nullopt;
}

}  // namespace

Dataset::Dataset(std::vector<std::string> metric_names, Eigen::MatrixXd values, std::vector<bool> outcome)
    : names_(std::move(metric_names)), values_(std::move(values)), outcome_(std::move(outcome)) {
    if (values_.rows() < 1) throw InvalidDataset("dataset must hold at least one row");
    if (static_cast<std::size_t>(values_.cols()) != names_.size())
        throw InvalidDataset("column count does not match metric name count");
    if (outcome_.size() != static_cast<std::size_t>(values_.rows()))
        throw InvalidDataset("outcome length does not match row count");
    std::unordered_set<std::string_view> seen;
    for (const auto& name : names_) {
        if (name.empty()) throw InvalidDataset("empty metric name");
        if (!seen.insert(name).second) throw InvalidDataset("duplicate metric name '" + name + "'");
    }
    if (!values_.allFinite()) throw InvalidDataset("non-finite metric value");
}

Dataset Dataset::from_rows(std::vector<std::string> metric_names, const std::vector<std::vector<double>>& rows,
                           std::vector<bool> outcome) {
    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(metric_names.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != metric_names.size())
            throw InvalidDataset("row " + std::to_string(i) + " length does not match metric count");
        for (std::size_t j = 0; j < rows[i].size(); ++j) values(Eigen::Index(i), Eigen::Index(j)) = rows[i][j];
    }
    return Dataset(std::move(metric_names), std::move(values), std::move(outcome));
}

std::size_t Dataset::defective_count() const noexcept {
    return static_cast<std::size_t>(std::count(outcome_.begin(), outcome_.end(), true));
}

bool Dataset::has_both_classes() const noexcept {
    const std::size_t pos = defective_count();
    return pos > 0 && pos < outcome_.size();
}

std::span<const double> Dataset::column(std::size_t j) const {
    if (j >= names_.size()) throw DimensionMismatch("column index out of range");
    return {values_.col(Eigen::Index(j)).data(), module_count()};
}

std::span<const double> Dataset::column(std::string_view name) const { return column(require_index(name)); }

std::vector<double> Dataset::row(std::size_t i) const {
    std::vector<double> out(metric_count());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = values_(Eigen::Index(i), Eigen::Index(j));
    return out;
}

std::optional<std::size_t> Dataset::index_of(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
}

std::size_t Dataset::require_index(std::string_view name) const {
    if (auto idx = index_of(name)) return *idx;
    throw MissingColumn(std::string(name));
}

std::vector<std::size_t> Dataset::indices_of(const MetricSubset& subset) const {
    std::vector<std::size_t> out;
    out.reserve(subset.size());
    for (const auto& name : subset) out.push_back(require_index(name));
    return out;
}

Dataset Dataset::select_rows(std::span<const std::size_t> indices) const {
    Eigen::MatrixXd values(Eigen::Index(indices.size()), values_.cols());
    std::vector<bool> outcome(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        values.row(Eigen::Index(r)) = values_.row(Eigen::Index(indices[r]));
        outcome[r] = outcome_[indices[r]];
    }
    return Dataset(names_, std::move(values), std::move(outcome));
}

Dataset Dataset::project(const MetricSubset& subset) const {
    const auto idx = indices_of(subset);
    Eigen::MatrixXd values(values_.rows(), Eigen::Index(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) values.col(Eigen::Index(c)) = values_.col(Eigen::Index(idx[c]));
    return Dataset(subset, std::move(values), outcome_);
}

bool Dataset::operator==(const Dataset& other) const {
    return names_ == other.names_ && outcome_ == other.outcome_ && values_.rows() == other.values_.rows() &&
           values_.cols() == other.values_.cols() && values_ == other.values_;
}

void require_supervised(const Dataset& d) {
    if (!d.has_both_classes())
        throw DegenerateOutcome("outcome holds a single class (" + std::to_string(d.defective_count()) + " of " +
                                std::to_string(d.module_count()) + " defective)");
}

std::vector<double> outcome_as_double(const Dataset& d) {
    std::vector<double> y(d.module_count());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = d.outcome()[i] ? 1.0 : 0.0;
    return y;
}

Dataset parse_csv(std::istream& in, std::string_view outcome_column) {
    std::string line;
    if (!std::getline(in, line) || trim(line).empty()) throw EmptyDataset("CSV has no header row");

    std::vector<std::string> header;
    for (auto cell : split_commas(line)) header.push_back(unquote(cell));
    const auto outcome_it = std::find(header.begin(), header.end(), outcome_column);
    if (outcome_it == header.end()) throw MissingColumn(std::string(outcome_column));
    const std::size_t outcome_idx = static_cast<std::size_t>(outcome_it - header.begin());

    std::vector<std::string> names;
    for (std::size_t c = 0; c < header.size(); ++c)
        if (c != outcome_idx) names.push_back(header[c]);

    std::vector<std::vector<double>> rows;
    std::vector<bool> outcome;
    std::size_t data_row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++data_row;
        const auto cells = split_commas(line);
        if (cells.size() != header.size())
            throw DataError("data row " + std::to_string(data_row) + " has " + std::to_string(cells.size()) +
                            " cells, header has " + std::to_string(header.size()));
        std::vector<double> row;
        row.reserve(names.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c == outcome_idx) {
                const auto label = parse_outcome(cells[c]);
                if (!label) throw InvalidOutcomeValue(data_row, std::string(cells[c]));
                outcome.push_back(*label);
                continue;
            }
            const auto value = parse_finite(cells[c]);
            if (!value) throw NonNumericCell(data_row, c, header[c]);
            row.push_back(*value);
        }
        rows.push_back(std::move(row));
    }

    if (rows.empty()) throw EmptyDataset("CSV has no data rows");
    if (rows.size() < 2) throw EmptyDataset("CSV needs at least 2 data rows");
    if (names.empty()) throw EmptyDataset("CSV has no metric columns");
    Dataset d = Dataset::from_rows(std::move(names), rows, std::move(outcome));
    require_supervised(d);
    return d;
}

Dataset load_csv(const std::filesystem::path& path, std::string_view outcome_column) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return parse_csv(in, outcome_column);
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

void write_csv(const Dataset& d, std::ostream& out, std::string_view outcome_column) {
    for (const auto& name : d.metric_names()) out << name << ',';
    out << outcome_column << '\n';
    for (std::size_t i = 0; i < d.module_count(); ++i) {
        for (std::size_t j = 0; j < d.metric_count(); ++j) out << format_double(d.values()(Eigen::Index(i), Eigen::Index(j))) << ',';
        out << (d.outcome()[i] ? '1' : '0') << '\n';
    }
}

void write_csv(const Dataset& d, const std::filesystem::path& path, std::string_view outcome_column) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_csv(d, out, outcome_column);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

DatasetSummary summarize(const Dataset& d) {
    DatasetSummary s;
    s.module_count = d.module_count();
    s.metric_count = d.metric_count();
    s.defective_count = d.defective_count();
    s.defective_ratio = s.module_count == 0 ? 0.0 : 100.0 * double(s.defective_count) / double(s.module_count);
    s.epv = s.metric_count == 0 ? 0.0 : double(s.defective_count) / double(s.metric_count);
    return s;
}

BootstrapSplit bootstrap_sample(const Dataset& d, std::uint64_t seed) {
    const std::size_t n = d.module_count();
    Rng rng(seed);
    std::vector<std::size_t> draws(n);
    std::vector<bool> drawn(n, false);
    for (auto& idx : draws) {
        idx = static_cast<std::size_t>(rng.uniform_index(n));
        drawn[idx] = true;
    }
    std::vector<std::size_t> test_idx;
    for (std::size_t i = 0; i < n; ++i)
        if (!drawn[i]) test_idx.push_back(i);
    if (test_idx.empty()) throw EmptyTestSet("bootstrap drew every row; no out-of-bag rows remain");
    return BootstrapSplit{d.select_rows(draws), d.select_rows(test_idx), std::move(draws), std::move(test_idx)};
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
    if (spec.base_metric_count < 1) throw InvalidSpec("base_metric_count must be >= 1");
    if (spec.module_count < 10) throw InvalidSpec("module_count must be >= 10");
    if (!spec.signal_coefficients.empty() && spec.signal_coefficients.size() != spec.base_metric_count)
        throw InvalidSpec("signal_coefficients must have one weight per base metric");
    std::size_t total = spec.base_metric_count;
    for (const auto& g : spec.clone_groups) {
        if (g.source >= spec.base_metric_count) throw InvalidSpec("clone source out of range");
        if (!(g.noise_sd >= 0.0) || !std::isfinite(g.noise_sd)) throw InvalidSpec("clone noise sd must be >= 0");
        total += g.count;
    }

    std::vector<std::string> names;
    for (std::size_t b = 0; b < spec.base_metric_count; ++b) names.push_back("m" + std::to_string(b));
    std::vector<std::size_t> clones_seen(spec.base_metric_count, 0);
    for (const auto& g : spec.clone_groups)
        for (std::size_t c = 0; c < g.count; ++c)
            names.push_back("m" + std::to_string(g.source) + "_c" + std::to_string(clones_seen[g.source]++));

    const auto n = Eigen::Index(spec.module_count);
    Eigen::MatrixXd values(n, Eigen::Index(total));
    std::vector<bool> outcome(spec.module_count);
    Rng rng(spec.seed);
    for (Eigen::Index i = 0; i < n; ++i) {
        double eta = spec.intercept;
        for (std::size_t b = 0; b < spec.base_metric_count; ++b) {
            const double x = rng.normal();
            values(i, Eigen::Index(b)) = x;
            if (!spec.signal_coefficients.empty()) eta += spec.signal_coefficients[b] * x;
        }
        Eigen::Index col = Eigen::Index(spec.base_metric_count);
        for (const auto& g : spec.clone_groups)
            for (std::size_t c = 0; c < g.count; ++c, ++col)
                values(i, col) = values(i, Eigen::Index(g.source)) + (g.noise_sd > 0.0 ? rng.normal(0.0, g.noise_sd) : 0.0);
        outcome[std::size_t(i)] = rng.bernoulli(1.0 / (1.0 + std::exp(-eta)));
    }
    Dataset d(std::move(names), std::move(values), std::move(outcome));
    if (!d.has_both_classes()) throw InvalidSpec("generated outcome holds a single class; change seed or signal");
    return d;
}

}  // namespace corrsel
