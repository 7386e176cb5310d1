#include "corrsel/classifiers.hpp"

#include "corrsel/errors.hpp"
#include "corrsel/random.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace corrsel {

namespace {

double softplus(double eta) { return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta))); }

double sigmoid(double eta) {
    if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

Eigen::MatrixXd design_matrix(const Dataset& d, const std::vector<std::size_t>& columns) {
    const auto n = Eigen::Index(d.module_count());
    Eigen::MatrixXd x(n, Eigen::Index(columns.size() + 1));
    x.col(0).setOnes();
    for (std::size_t c = 0; c < columns.size(); ++c) x.col(Eigen::Index(c + 1)) = d.values().col(Eigen::Index(columns[c]));
    return x;
}

double log_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
    const Eigen::VectorXd eta = x * beta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y[i] * eta[i] - softplus(eta[i]);
    return ll;
}

Eigen::VectorXd solve_newton_system(Eigen::MatrixXd h, const Eigen::VectorXd& g) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.rcond() > 1e-14) return ldlt.solve(g);
    h.diagonal().array() += kRidgeJitter;
    ldlt.compute(h);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.rcond() > 1e-14) return ldlt.solve(g);
    return h.colPivHouseholderQr().solve(g);
}

}  // namespace

double logistic_log_likelihood(const Dataset& d, const std::vector<std::size_t>& columns, double intercept,
                               std::span<const double> coefficients) {
    if (coefficients.size() != columns.size()) throw DimensionMismatch("coefficient count differs from column count");
    const Eigen::MatrixXd x = design_matrix(d, columns);
    Eigen::VectorXd beta(x.cols());
    beta[0] = intercept;
    for (std::size_t c = 0; c < coefficients.size(); ++c) beta[Eigen::Index(c + 1)] = coefficients[c];
    const auto y = outcome_as_double(d);
    return log_likelihood(x, Eigen::Map<const Eigen::VectorXd>(y.data(), Eigen::Index(y.size())), beta);
}

LogisticModel fit_logistic(const Dataset& d, const MetricSubset& subset, const LogisticOptions& options) {
    require_supervised(d);
    const auto columns = d.indices_of(subset);
    const Eigen::MatrixXd x = design_matrix(d, columns);
    const auto yv = outcome_as_double(d);
    const Eigen::Map<const Eigen::VectorXd> y(yv.data(), Eigen::Index(yv.size()));

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
    const double ybar = y.mean();
    beta[0] = std::log(ybar / (1.0 - ybar));
    double ll = log_likelihood(x, y, beta);

    LogisticModel model;
    model.metric_names = subset;
    model.log_likelihood_trace.push_back(ll);

    bool capped = false;
    for (int iter = 1; iter <= options.max_iter; ++iter) {
        const Eigen::VectorXd eta = x * beta;
        Eigen::VectorXd p(eta.size()), w(eta.size());
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
            p[i] = sigmoid(eta[i]);
            w[i] = p[i] * (1.0 - p[i]);
        }
        const Eigen::VectorXd gradient = x.transpose() * (y - p);
        const Eigen::MatrixXd hessian = x.transpose() * w.asDiagonal() * x;
        Eigen::VectorXd target = beta + solve_newton_system(hessian, gradient);

        if (target.cwiseAbs().maxCoeff() > kCoefficientCap) {
            target = target.cwiseMax(-kCoefficientCap).cwiseMin(kCoefficientCap);
            capped = true;
        }

        // Step halving keeps the accepted log-likelihood sequence non-decreasing.
        const Eigen::VectorXd direction = target - beta;
        double scale = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 40; ++halving, scale *= 0.5) {
            const Eigen::VectorXd candidate = beta + scale * direction;
            const double candidate_ll = log_likelihood(x, y, candidate);
            if (candidate_ll >= ll) {
                beta = candidate;
                ll = candidate_ll;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // No ascent left along the Newton direction: numerically at the optimum.
            model.converged = !capped && direction.cwiseAbs().maxCoeff() < std::sqrt(options.tol);
            break;
        }
        model.iterations_used = iter;
        model.log_likelihood_trace.push_back(ll);
        if (capped) {
            model.converged = false;
            break;
        }
        if ((scale * direction).cwiseAbs().maxCoeff() < options.tol) {
            model.converged = true;
            break;
        }
    }

    model.intercept = beta[0];
    model.coefficients.assign(beta.data() + 1, beta.data() + beta.size());
    model.log_likelihood = ll;
    return model;
}

double predict_logistic(const LogisticModel& m, std::span<const double> row) {
    if (row.size() != m.coefficients.size()) throw DimensionMismatch("row length differs from model metric count");
    double eta = m.intercept;
    for (std::size_t j = 0; j < row.size(); ++j) eta += m.coefficients[j] * row[j];
    return std::clamp(sigmoid(eta), kProbabilityFloor, 1.0 - kProbabilityFloor);
}

bool DecisionTree::vote(std::span<const double> row) const {
    int at = 0;
    while (nodes[std::size_t(at)].feature >= 0) {
        const auto& node = nodes[std::size_t(at)];
        at = row[std::size_t(node.feature)] <= node.threshold ? node.left : node.right;
    }
    return nodes[std::size_t(at)].defective_vote;
}

namespace {

double gini_mass(double pos, double total) {
    // total * gini impurity
    if (total <= 0.0) return 0.0;
    const double p = pos / total;
    return total * 2.0 * p * (1.0 - p);
}

struct SplitCandidate {
    int feature = -1;
    double threshold = 0.0;
    double decrease = -1.0;
};

class TreeBuilder {
public:
    TreeBuilder(const Eigen::MatrixXd& x, const std::vector<bool>& y, int mtry, Rng& rng, std::vector<double>& importance)
        : x_(x), y_(y), mtry_(mtry), rng_(rng), importance_(importance) {}

    DecisionTree build(std::vector<std::size_t> rows) {
        DecisionTree tree;
        tree.nodes.emplace_back();
        std::vector<std::pair<int, std::vector<std::size_t>>> stack;
        stack.emplace_back(0, std::move(rows));
        while (!stack.empty()) {
            auto [node_id, node_rows] = std::move(stack.back());
            stack.pop_back();
            const double total = double(node_rows.size());
            double pos = 0.0;
            for (auto r : node_rows) pos += y_[r] ? 1.0 : 0.0;
            tree.nodes[std::size_t(node_id)].defective_vote = pos > total - pos;
            if (pos == 0.0 || pos == total) continue;

            const SplitCandidate split = find_split(node_rows, pos);
            if (split.feature < 0) continue;

            importance_[std::size_t(split.feature)] += split.decrease;
            std::vector<std::size_t> left, right;
            for (auto r : node_rows)
                (x_(Eigen::Index(r), split.feature) <= split.threshold ? left : right).push_back(r);
            const int left_id = int(tree.nodes.size());
            tree.nodes.emplace_back();
            const int right_id = int(tree.nodes.size());
            tree.nodes.emplace_back();
            auto& node = tree.nodes[std::size_t(node_id)];
            node.feature = split.feature;
            node.threshold = split.threshold;
            node.left = left_id;
            node.right = right_id;
            stack.emplace_back(right_id, std::move(right));
            stack.emplace_back(left_id, std::move(left));
        }
        return tree;
    }

private:
    SplitCandidate find_split(const std::vector<std::size_t>& rows, double pos) {
        const int p = int(x_.cols());
        std::vector<int> features(static_cast<std::size_t>(p));
        std::iota(features.begin(), features.end(), 0);
        SplitCandidate best;
        const double parent = gini_mass(pos, double(rows.size()));
        for (int k = 0; k < p; ++k) {
            // Lazy Fisher-Yates: draw the k-th candidate feature without replacement.
            const auto pick = std::size_t(k) + std::size_t(rng_.uniform_index(std::uint64_t(p - k)));
            std::swap(features[std::size_t(k)], features[pick]);
            evaluate_feature(features[std::size_t(k)], rows, pos, parent, best);
            if (k + 1 >= mtry_ && best.feature >= 0) break;
        }
        return best;
    }

    void evaluate_feature(int f, const std::vector<std::size_t>& rows, double pos, double parent, SplitCandidate& best) {
        std::vector<std::pair<double, bool>> column;
        column.reserve(rows.size());
        for (auto r : rows) column.emplace_back(x_(Eigen::Index(r), f), y_[r]);
        std::sort(column.begin(), column.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        const double total = double(column.size());
        double left_pos = 0.0;
        for (std::size_t i = 1; i < column.size(); ++i) {
            left_pos += column[i - 1].second ? 1.0 : 0.0;
            if (column[i].first == column[i - 1].first) continue;
            const double left_n = double(i);
            const double decrease =
                parent - gini_mass(left_pos, left_n) - gini_mass(pos - left_pos, total - left_n);
            if (decrease > best.decrease) {
                best.feature = f;
                best.decrease = std::max(decrease, 0.0);
                best.threshold = 0.5 * (column[i - 1].first + column[i].first);
                // Midpoint can round up to the upper value for adjacent doubles.
                if (!(best.threshold < column[i].first)) best.threshold = column[i - 1].first;
            }
        }
    }

    const Eigen::MatrixXd& x_;
    const std::vector<bool>& y_;
    int mtry_;
    Rng& rng_;
    std::vector<double>& importance_;
};

std::vector<double> project_row(const Dataset& d, std::size_t i, const std::vector<std::size_t>& columns) {
    std::vector<double> row(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) row[c] = d.values()(Eigen::Index(i), Eigen::Index(columns[c]));
    return row;
}

}  // namespace

ForestModel fit_random_forest(const Dataset& d, const MetricSubset& subset, int ntree, std::uint64_t seed) {
    require_supervised(d);
    if (subset.empty()) throw DimensionMismatch("random forest needs at least one metric");
    if (ntree < 1) throw ConfigError("ntree must be >= 1");
    const Dataset data = d.project(subset);
    const std::size_t n = data.module_count();

    ForestModel model;
    model.metric_names = subset;
    model.ntree = ntree;
    model.mtry = std::max(1, int(std::floor(std::sqrt(double(subset.size())))));
    model.seed = seed;
    model.impurity_decrease.assign(subset.size(), 0.0);
    model.trees.reserve(std::size_t(ntree));
    for (int t = 0; t < ntree; ++t) {
        Rng rng(derive_seed(seed, {std::uint64_t(t)}));
        std::vector<std::size_t> rows(n);
        for (auto& r : rows) r = std::size_t(rng.uniform_index(n));
        TreeBuilder builder(data.values(), data.outcome(), model.mtry, rng, model.impurity_decrease);
        model.trees.push_back(builder.build(std::move(rows)));
    }
    return model;
}

double predict_forest(const ForestModel& m, std::span<const double> row) {
    if (row.size() != m.metric_names.size()) throw DimensionMismatch("row length differs from model metric count");
    int votes = 0;
    for (const auto& tree : m.trees) votes += tree.vote(row) ? 1 : 0;
    return double(votes) / double(m.trees.size());
}

ImportanceScores importance(const LogisticModel& m, const Dataset& d) {
    ImportanceScores scores;
    for (std::size_t j = 0; j < m.metric_names.size(); ++j) {
        const auto col = d.column(m.metric_names[j]);
        const double n = double(col.size());
        const double mean = std::accumulate(col.begin(), col.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : col) ss += (v - mean) * (v - mean);
        const double sd = n > 1.0 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        scores[m.metric_names[j]] = std::abs(m.coefficients[j]) * sd;
    }
    return scores;
}

ImportanceScores importance(const ForestModel& m, const Dataset&) {
    ImportanceScores scores;
    const double total = std::accumulate(m.impurity_decrease.begin(), m.impurity_decrease.end(), 0.0);
    for (std::size_t j = 0; j < m.metric_names.size(); ++j)
        scores[m.metric_names[j]] =
            total > 0.0 ? m.impurity_decrease[j] / total : 1.0 / double(m.metric_names.size());
    return scores;
}

std::vector<double> predict_all(const LogisticModel& m, const Dataset& d) {
    const auto columns = d.indices_of(m.metric_names);
    std::vector<double> out(d.module_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = predict_logistic(m, project_row(d, i, columns));
    return out;
}

std::vector<double> predict_all(const ForestModel& m, const Dataset& d) {
    const auto columns = d.indices_of(m.metric_names);
    std::vector<double> out(d.module_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = predict_forest(m, project_row(d, i, columns));
    return out;
}

}  // namespace corrsel
