#include "corrsel/stats.hpp"

#include "corrsel/errors.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace corrsel {

namespace {

std::vector<std::size_t> sorted_order(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    return order;
}

double plogp_sum(double total, std::span<const double> counts) {
    double h = 0.0;
    for (double c : counts)
        if (c > 0.0) {
            const double p = c / total;
            h -= p * std::log2(p);
        }
    return h;
}

}  // namespace

std::vector<double> rank_with_ties(std::span<const double> values) {
    const auto order = sorted_order(values);
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        // Positions i..j-1 share ranks i+1..j; their average is exact in binary.
        const double avg = 0.5 * double(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
        i = j;
    }
    return ranks;
}

bool is_constant(std::span<const double> values) {
    return std::adjacent_find(values.begin(), values.end(), std::not_equal_to<>()) == values.end();
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw LengthMismatch("correlation inputs differ in length");
    if (x.size() < 2) throw LengthMismatch("correlation needs at least 2 values");
    if (is_constant(x) || is_constant(y)) return 0.0;
    const double n = double(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw LengthMismatch("spearman inputs differ in length");
    if (x.size() < 2) throw LengthMismatch("spearman needs at least 2 values");
    const auto rx = rank_with_ties(x);
    const auto ry = rank_with_ties(y);
    return pearson(rx, ry);
}

double CorrelationMatrix::at(const std::string& a, const std::string& b) const {
    const auto ia = std::find(metric_names.begin(), metric_names.end(), a);
    const auto ib = std::find(metric_names.begin(), metric_names.end(), b);
    if (ia == metric_names.end()) throw MissingColumn(a);
    if (ib == metric_names.end()) throw MissingColumn(b);
    return at(std::size_t(ia - metric_names.begin()), std::size_t(ib - metric_names.begin()));
}

CorrelationMatrix spearman_matrix(const Dataset& d) {
    const std::size_t p = d.metric_count();
    std::vector<std::vector<double>> ranks(p);
    for (std::size_t j = 0; j < p; ++j) ranks[j] = rank_with_ties(d.column(j));
    CorrelationMatrix m{d.metric_names(), Eigen::MatrixXd::Identity(Eigen::Index(p), Eigen::Index(p))};
    if (d.module_count() < 2) return m;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) {
            const double rho = pearson(ranks[i], ranks[j]);
            m.values(Eigen::Index(i), Eigen::Index(j)) = rho;
            m.values(Eigen::Index(j), Eigen::Index(i)) = rho;
        }
    return m;
}

double ols_r_squared(std::span<const double> target, const Eigen::MatrixXd& predictors) {
    const auto n = Eigen::Index(target.size());
    if (predictors.rows() != n) throw DimensionMismatch("predictor rows differ from target length");
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(target.data(), n);
    y.array() -= y.mean();
    const double tss = y.squaredNorm();
    if (tss == 0.0 || predictors.cols() == 0) return 0.0;

    // Centering absorbs the intercept.
    Eigen::MatrixXd x = predictors.rowwise() - predictors.colwise().mean();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-12);
    const Eigen::Index rank = qr.rank();
    Eigen::VectorXd qty = y;
    qty.applyOnTheLeft(qr.householderQ().adjoint());
    const double rss = qty.tail(n - rank).squaredNorm();
    return std::clamp(1.0 - rss / tss, 0.0, 1.0);
}

VifScore VifScore::from_r_squared(double r_squared) {
    if (r_squared >= 1.0 - kUnboundedVifTolerance) return unbounded();
    return finite(1.0 / (1.0 - r_squared));
}

double VifScore::value() const noexcept {
    return unbounded_ ? std::numeric_limits<double>::infinity() : value_;
}

std::partial_ordering VifScore::operator<=>(const VifScore& other) const noexcept {
    if (unbounded_ || other.unbounded_) return unbounded_ <=> other.unbounded_;
    return value_ <=> other.value_;
}

const VifScore& VifReport::at(const std::string& metric) const {
    for (const auto& [name, score] : scores)
        if (name == metric) return score;
    throw MissingColumn(metric);
}

VifReport vif_scores(const Dataset& d, const MetricSubset& subset) {
    const auto idx = d.indices_of(subset);
    const auto n = Eigen::Index(d.module_count());
    VifReport report;
    report.scores.reserve(idx.size());
    for (std::size_t target = 0; target < idx.size(); ++target) {
        if (idx.size() == 1) {
            report.scores.emplace_back(subset[target], VifScore::finite(1.0));
            continue;
        }
        Eigen::MatrixXd others(n, Eigen::Index(idx.size() - 1));
        Eigen::Index c = 0;
        for (std::size_t k = 0; k < idx.size(); ++k)
            if (k != target) others.col(c++) = d.values().col(Eigen::Index(idx[k]));
        const double r2 = ols_r_squared(d.column(idx[target]), others);
        report.scores.emplace_back(subset[target], VifScore::from_r_squared(r2));
    }
    return report;
}

DiscreteColumn discretize_equal_frequency(std::span<const double> values, int bins) {
    if (bins < 2) throw TooFewValues("discretization needs at least 2 bins");
    if (values.size() < std::size_t(bins)) throw TooFewValues("fewer values than bins");

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> distinct = sorted;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    DiscreteColumn out;
    if (distinct.size() <= std::size_t(bins)) {
        out.bin_edges.assign(distinct.begin() + 1, distinct.end());
    } else {
        const double last = double(sorted.size() - 1);
        for (int k = 1; k < bins; ++k) {
            const double h = last * double(k) / double(bins);
            const auto lo = std::size_t(std::floor(h));
            const double frac = h - double(lo);
            const double edge = lo + 1 < sorted.size() ? sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]) : sorted[lo];
            // Edges at or below the minimum would leave the first bin empty.
            if (edge > sorted.front() && (out.bin_edges.empty() || edge > out.bin_edges.back()))
                out.bin_edges.push_back(edge);
        }
    }
    out.labels.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out.labels[i] = int(std::upper_bound(out.bin_edges.begin(), out.bin_edges.end(), values[i]) - out.bin_edges.begin());
    return out;
}

namespace {

struct ClassCounts {
    double neg = 0.0;
    double pos = 0.0;
    double total() const { return neg + pos; }
    int classes() const { return (neg > 0.0) + (pos > 0.0); }
    double entropy() const {
        const double c[2] = {neg, pos};
        return plogp_sum(total(), c);
    }
};

void mdl_split(const std::vector<double>& xs, const std::vector<bool>& ys, std::size_t lo, std::size_t hi,
               std::vector<double>& edges) {
    ClassCounts all;
    for (std::size_t i = lo; i < hi; ++i) (ys[i] ? all.pos : all.neg) += 1.0;
    const double n = all.total();
    if (n < 2.0 || all.classes() < 2) return;

    ClassCounts left;
    double best_entropy = std::numeric_limits<double>::infinity();
    std::size_t best_cut = 0;
    ClassCounts best_left, best_right;
    for (std::size_t i = lo + 1; i < hi; ++i) {
        (ys[i - 1] ? left.pos : left.neg) += 1.0;
        if (xs[i] == xs[i - 1]) continue;
        const ClassCounts right{all.neg - left.neg, all.pos - left.pos};
        const double e = (left.total() * left.entropy() + right.total() * right.entropy()) / n;
        if (e < best_entropy) {
            best_entropy = e;
            best_cut = i;
            best_left = left;
            best_right = right;
        }
    }
    if (best_cut == 0) return;

    const double ent = all.entropy();
    const double gain = ent - best_entropy;
    const double k = all.classes(), k1 = best_left.classes(), k2 = best_right.classes();
    const double delta = std::log2(std::pow(3.0, k) - 2.0) -
                         (k * ent - k1 * best_left.entropy() - k2 * best_right.entropy());
    if (gain <= (std::log2(n - 1.0) + delta) / n) return;

    mdl_split(xs, ys, lo, best_cut, edges);
    edges.push_back(0.5 * (xs[best_cut - 1] + xs[best_cut]));
    mdl_split(xs, ys, best_cut, hi, edges);
}

}  // namespace

DiscreteColumn discretize_mdl(std::span<const double> values, const std::vector<bool>& outcome) {
    if (values.size() != outcome.size()) throw LengthMismatch("discretization inputs differ in length");
    const auto order = sorted_order(values);
    std::vector<double> xs(values.size());
    std::vector<bool> ys(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        xs[i] = values[order[i]];
        ys[i] = outcome[order[i]];
    }
    DiscreteColumn out;
    mdl_split(xs, ys, 0, xs.size(), out.bin_edges);
    out.labels.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out.labels[i] = int(std::upper_bound(out.bin_edges.begin(), out.bin_edges.end(), values[i]) - out.bin_edges.begin());
    return out;
}

double entropy_bits(std::span<const double> counts) {
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    if (total <= 0.0) return 0.0;
    return plogp_sum(total, counts);
}

double outcome_entropy(const std::vector<bool>& outcome) {
    const double pos = double(std::count(outcome.begin(), outcome.end(), true));
    const double c[2] = {double(outcome.size()) - pos, pos};
    return entropy_bits(c);
}

namespace {

// bins x 2 table of (clean, defective) counts.
std::vector<std::array<double, 2>> contingency(const DiscreteColumn& metric, const std::vector<bool>& outcome) {
    if (metric.labels.size() != outcome.size()) throw LengthMismatch("labels and outcome differ in length");
    int bins = metric.bin_count();
    for (int l : metric.labels) bins = std::max(bins, l + 1);
    std::vector<std::array<double, 2>> table(std::size_t(bins), {0.0, 0.0});
    for (std::size_t i = 0; i < outcome.size(); ++i) table[std::size_t(metric.labels[i])][outcome[i] ? 1 : 0] += 1.0;
    return table;
}

}  // namespace

double information_gain(const DiscreteColumn& metric, const std::vector<bool>& outcome) {
    const auto table = contingency(metric, outcome);
    const double n = double(outcome.size());
    if (n == 0.0) return 0.0;
    double conditional = 0.0;
    for (const auto& row : table) {
        const double nb = row[0] + row[1];
        if (nb > 0.0) conditional += nb / n * entropy_bits(row);
    }
    return std::max(0.0, outcome_entropy(outcome) - conditional);
}

double chi_squared(const DiscreteColumn& metric, const std::vector<bool>& outcome) {
    const auto table = contingency(metric, outcome);
    const double n = double(outcome.size());
    if (n == 0.0) return 0.0;
    double col[2] = {0.0, 0.0};
    for (const auto& row : table) {
        col[0] += row[0];
        col[1] += row[1];
    }
    double chi = 0.0;
    for (const auto& row : table) {
        const double rt = row[0] + row[1];
        for (int c = 0; c < 2; ++c) {
            const double expected = rt * col[c] / n;
            if (expected > 0.0) chi += (row[c] - expected) * (row[c] - expected) / expected;
        }
    }
    return chi;
}

double inconsistency_rate(std::span<const DiscreteColumn* const> columns, const std::vector<bool>& outcome) {
    const std::size_t n = outcome.size();
    if (n == 0) return 0.0;
    for (const auto* c : columns)
        if (c->labels.size() != n) throw LengthMismatch("labels and outcome differ in length");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto less = [&](std::size_t a, std::size_t b) {
        for (const auto* c : columns)
            if (c->labels[a] != c->labels[b]) return c->labels[a] < c->labels[b];
        return false;
    };
    std::sort(order.begin(), order.end(), less);

    std::size_t inconsistent = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        std::size_t pos = 0;
        while (j < n && !less(order[i], order[j])) {
            pos += outcome[order[j]] ? 1 : 0;
            ++j;
        }
        const std::size_t count = j - i;
        inconsistent += count - std::max(pos, count - pos);
        i = j;
    }
    return double(inconsistent) / double(n);
}

double inconsistency_rate(const Dataset& d, const MetricSubset& subset, int bins) {
    std::vector<DiscreteColumn> columns;
    for (auto j : d.indices_of(subset)) columns.push_back(discretize_equal_frequency(d.column(j), bins));
    std::vector<const DiscreteColumn*> ptrs;
    for (const auto& c : columns) ptrs.push_back(&c);
    return inconsistency_rate(ptrs, d.outcome());
}

}  // namespace corrsel
