#include "doctest.h"

#include "corrsel/classifiers.hpp"
#include "corrsel/errors.hpp"

#include "fixtures.hpp"

#include <numeric>

using namespace corrsel;
using doctest::Approx;

namespace {

DecisionTree leaf(bool vote) {
    DecisionTree t;
    TreeNode n;
    n.defective_vote = vote;
    t.nodes.push_back(n);
    return t;
}

ForestModel forest_of(std::initializer_list<bool> votes) {
    ForestModel m;
    m.metric_names = {"a"};
    for (bool v : votes) m.trees.push_back(leaf(v));
    m.ntree = int(m.trees.size());
    return m;
}

}  // namespace

TEST_CASE("intercept-only logistic fit is the logit of the defective fraction") {
    std::vector<bool> y(10, false);
    for (std::size_t i = 0; i < 6; ++i) y[i] = true;
    const Dataset d({"a"}, Eigen::MatrixXd::Random(10, 1), y);
    const LogisticModel m = fit_logistic(d, {});
    CHECK(m.intercept == Approx(std::log(1.5)).epsilon(1e-10));
    CHECK(m.coefficients.empty());
    CHECK(m.converged);
}

TEST_CASE("symmetric data gives a zero intercept") {
    Eigen::MatrixXd x(8, 1);
    x << -4, -3, -2, -1, 1, 2, 3, 4;
    const Dataset d({"a"}, x, {false, true, false, false, true, true, false, true});
    const LogisticModel m = fit_logistic(d, {"a"});
    CHECK(std::abs(m.intercept) < 1e-6);
    CHECK(m.coefficients[0] > 0.0);
    CHECK(m.converged);
}

TEST_CASE("complete separation caps coefficients and reports non-convergence") {
    Eigen::MatrixXd x(2, 1);
    x << 0, 1;
    const LogisticModel m = fit_logistic(Dataset({"a"}, x, {false, true}), {"a"});
    CHECK_FALSE(m.converged);
    CHECK(std::abs(m.coefficients[0]) <= kCoefficientCap);
    CHECK(std::isfinite(m.log_likelihood));
}

TEST_CASE("single-class outcome is rejected") {
    const Dataset d({"a"}, Eigen::MatrixXd::Random(5, 1), std::vector<bool>(5, true));
    CHECK_THROWS_AS(fit_logistic(d, {"a"}), DegenerateOutcome);
    CHECK_THROWS_AS(fit_random_forest(d, {"a"}, 3, 1), DegenerateOutcome);
}

TEST_CASE("irls log-likelihood never decreases and the gradient vanishes") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Dataset d = testing::random_dataset(seed, 150, 4);
        const LogisticModel m = fit_logistic(d, d.metric_names());
        REQUIRE(m.converged);
        for (std::size_t k = 1; k < m.log_likelihood_trace.size(); ++k)
            CHECK(m.log_likelihood_trace[k] >= m.log_likelihood_trace[k - 1]);
        CHECK(testing::analytic_gradient_norm(d, m) < 1e-6);
        CHECK(testing::fd_gradient_norm(d, m) < 1e-6);
    }
}

TEST_CASE("collinear designs still fit") {
    Dataset base = testing::random_dataset(9, 120, 2);
    Eigen::MatrixXd x(base.values().rows(), 3);
    x << base.values(), base.values().col(0);
    const Dataset d({"a", "b", "a2"}, x, base.outcome());
    const LogisticModel m = fit_logistic(d, {"a", "b", "a2"});
    for (double c : m.coefficients) CHECK(std::isfinite(c));
    CHECK(m.log_likelihood >= fit_logistic(d, {"a", "b"}).log_likelihood - 1e-6);
}

TEST_CASE("predict_logistic examples") {
    LogisticModel zero;
    zero.metric_names = {"a", "b"};
    zero.coefficients = {0.0, 0.0};
    CHECK(predict_logistic(zero, std::vector<double>{3.0, -2.0}) == 0.5);

    LogisticModel intercept_only;
    intercept_only.intercept = std::log(3.0);
    CHECK(predict_logistic(intercept_only, std::vector<double>{}) == Approx(0.75));

    LogisticModel m;
    m.metric_names = {"a", "b"};
    m.intercept = 0.3;
    m.coefficients = {1.2, -0.7};
    LogisticModel neg = m;
    neg.intercept = -m.intercept;
    neg.coefficients = {-1.2, 0.7};
    const std::vector<double> row{0.5, 2.0};
    CHECK(predict_logistic(neg, row) == Approx(1.0 - predict_logistic(m, row)));
    CHECK_THROWS_AS(predict_logistic(m, std::vector<double>{1.0}), DimensionMismatch);

    m.coefficients = {100.0, 0.0};
    CHECK(predict_logistic(m, std::vector<double>{10.0, 0.0}) <= 1.0 - kProbabilityFloor);
}

TEST_CASE("a single tree separates four points") {
    Eigen::MatrixXd x(4, 1);
    x << 1, 2, 3, 4;
    const Dataset d({"a"}, x, {false, false, true, true});
    const ForestModel f = fit_random_forest(d, {"a"}, 1, 3);
    REQUIRE(f.trees.size() == 1);
    CHECK(f.mtry == 1);
    const auto p = predict_all(f, d);
    for (std::size_t i = 0; i < 4; ++i) {
        const bool in_range = p[i] == 0.0 || p[i] == 1.0;
        CHECK(in_range);
    }
    const ForestModel wide = fit_random_forest(d, {"a"}, 25, 3);
    const auto q = predict_all(wide, d);
    CHECK(q[0] < 0.5);
    CHECK(q[3] > 0.5);
}

TEST_CASE("forest fits are deterministic per seed") {
    const Dataset d = testing::random_dataset(4, 120, 5);
    const ForestModel a = fit_random_forest(d, d.metric_names(), 20, 99);
    const ForestModel b = fit_random_forest(d, d.metric_names(), 20, 99);
    CHECK(predict_all(a, d) == predict_all(b, d));
    CHECK(a.mtry == 2);
    CHECK(a.impurity_decrease == b.impurity_decrease);
    const ForestModel c = fit_random_forest(d, d.metric_names(), 20, 100);
    CHECK(predict_all(c, d) != predict_all(a, d));
}

TEST_CASE("forest probability is the vote fraction") {
    CHECK(predict_forest(forest_of({true, true, true}), std::vector<double>{0.0}) == 1.0);
    CHECK(predict_forest(forest_of({true, true, false, true}), std::vector<double>{0.0}) == 0.75);
    CHECK(predict_forest(forest_of({true, false}), std::vector<double>{0.0}) == 0.5);
    CHECK_THROWS_AS(predict_forest(forest_of({true}), std::vector<double>{0.0, 1.0}), DimensionMismatch);

    const Dataset d = testing::random_dataset(8, 80, 3);
    const ForestModel f = fit_random_forest(d, d.metric_names(), 7, 1);
    for (double p : predict_all(f, d)) {
        const double votes = p * 7;
        CHECK(votes == Approx(std::round(votes)));
    }
}

TEST_CASE("logistic importance is standardized coefficient magnitude") {
    const Dataset d = testing::random_dataset(2, 100, 2);
    LogisticModel m;
    m.metric_names = {"x0", "x1"};
    m.coefficients = {-2.0, 0.0};
    const ImportanceScores s = importance(m, d);
    CHECK(s.at("x1") == 0.0);
    const auto col = d.column("x0");
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / double(col.size());
    double ss = 0;
    for (double v : col) ss += (v - mean) * (v - mean);
    CHECK(s.at("x0") == Approx(2.0 * std::sqrt(ss / double(col.size() - 1))));
}

TEST_CASE("forest importances sum to one and clones share importance") {
    SyntheticSpec spec;
    // Four base metrics so that the solo and duplicated fits share mtry = 2.
    spec.base_metric_count = 4;
    spec.module_count = 400;
    spec.signal_coefficients = {2.0, 0.0, 0.0, 0.0};
    spec.seed = 31;
    const Dataset solo_data = generate_synthetic(spec);
    spec.clone_groups = {{0, 1, 0.0}};
    const Dataset dup_data = generate_synthetic(spec);

    const ForestModel solo = fit_random_forest(solo_data, {"m0", "m1", "m2", "m3"}, 100, 5);
    const ForestModel dup = fit_random_forest(dup_data, {"m0", "m1", "m2", "m3", "m0_c0"}, 100, 5);
    REQUIRE(solo.mtry == dup.mtry);
    const ImportanceScores s = importance(solo, solo_data);
    const ImportanceScores t = importance(dup, dup_data);
    double total = 0;
    for (const auto& [name, v] : t) total += v;
    CHECK(total == Approx(1.0).epsilon(1e-9));
    const double shared = t.at("m0") + t.at("m0_c0");
    CHECK(std::abs(shared - s.at("m0")) <= 0.2 * s.at("m0"));
    CHECK(t.at("m0") > 0.0);
    CHECK(t.at("m0_c0") > 0.0);
}
