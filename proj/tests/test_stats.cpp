#include "doctest.h"

#include "corrsel/errors.hpp"
#include "corrsel/random.hpp"
#include "corrsel/stats.hpp"

#include "fixtures.hpp"

#include <Eigen/QR>

#include <numeric>

using namespace corrsel;
using doctest::Approx;

namespace {

std::vector<double> normals(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

DiscreteColumn column_of(std::vector<int> labels) {
    const int top = *std::max_element(labels.begin(), labels.end());
    DiscreteColumn c;
    c.labels = std::move(labels);
    for (int b = 0; b < top; ++b) c.bin_edges.push_back(b + 0.5);
    return c;
}

}  // namespace

TEST_CASE("rank_with_ties averages tied ranks") {
    CHECK(rank_with_ties(std::vector<double>{10, 20, 30}) == std::vector<double>{1, 2, 3});
    CHECK(rank_with_ties(std::vector<double>{5, 5, 9}) == std::vector<double>{1.5, 1.5, 3});
    CHECK(rank_with_ties(std::vector<double>{7, 7, 7}) == std::vector<double>{2, 2, 2});
    CHECK(rank_with_ties(std::vector<double>{3, 1, 3, 2, 1}) == std::vector<double>{4.5, 1.5, 4.5, 3, 1.5});
}

TEST_CASE("rank sums are exact") {
    Rng rng(4);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> v(1 + rng.uniform_index(60));
        for (auto& x : v) x = double(rng.uniform_index(8));
        const auto r = rank_with_ties(v);
        const double n = double(v.size());
        CHECK(std::accumulate(r.begin(), r.end(), 0.0) == n * (n + 1) / 2);
    }
}

TEST_CASE("spearman examples") {
    CHECK(spearman(std::vector<double>{1, 4, 9}, std::vector<double>{1, 4, 9}) == Approx(1.0));
    CHECK(spearman(std::vector<double>{1, 2, 3, 4, 5}, std::vector<double>{2, 1, 4, 3, 5}) == Approx(0.8));
    CHECK(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) == Approx(-1.0));
    CHECK(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{4, 4, 4}) == 0.0);
    CHECK_THROWS_AS(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}), LengthMismatch);
}

TEST_CASE("spearman is symmetric, rank-invariant and matches the tie-free formula") {
    Rng rng(17);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 5 + rng.uniform_index(200);
        const auto x = normals(rng, n), y = normals(rng, n);
        const double r = spearman(x, y);
        CHECK(r == spearman(y, x));
        CHECK(std::abs(r - testing::spearman_formula(x, y)) < 1e-12);
        std::vector<double> ex(n), cube(n), affine(n);
        for (std::size_t i = 0; i < n; ++i) {
            ex[i] = std::exp(x[i]);
            cube[i] = x[i] * x[i] * x[i];
            affine[i] = 3.0 * x[i] + 2.0;
        }
        CHECK(std::abs(spearman(ex, y) - r) < 1e-12);
        CHECK(std::abs(spearman(cube, y) - r) < 1e-12);
        CHECK(std::abs(spearman(affine, y) - r) < 1e-12);
    }
}

TEST_CASE("spearman_matrix is symmetric with unit diagonal") {
    Eigen::MatrixXd x(6, 3);
    x << 1, 1, 6, 2, 2, 4, 3, 3, 5, 4, 4, 1, 5, 5, 2, 6, 6, 3;
    const CorrelationMatrix s = spearman_matrix(Dataset({"a", "b", "c"}, x, {1, 0, 1, 0, 1, 0}));
    CHECK(s.at("a", "b") == Approx(1.0));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(s.at(i, i) == 1.0);
        for (std::size_t j = 0; j < 3; ++j) CHECK(s.at(i, j) == s.at(j, i));
    }
    const CorrelationMatrix one = spearman_matrix(Dataset({"a"}, Eigen::MatrixXd::Ones(3, 1), {1, 0, 1}));
    CHECK(one.values.rows() == 1);
    CHECK(one.at(0, 0) == 1.0);
}

TEST_CASE("ols_r_squared degenerate and perfect fits") {
    Rng rng(2);
    const std::size_t n = 100;
    Eigen::MatrixXd p(Eigen::Index(n), 2);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        p(Eigen::Index(i), 0) = rng.normal();
        p(Eigen::Index(i), 1) = rng.normal();
        y[i] = 2 * p(Eigen::Index(i), 0) - p(Eigen::Index(i), 1) + 4;
    }
    CHECK(ols_r_squared(y, p) == Approx(1.0).epsilon(1e-10));
    CHECK(ols_r_squared(y, Eigen::MatrixXd::Constant(Eigen::Index(n), 1, 3.0)) == 0.0);
    CHECK(ols_r_squared(std::vector<double>(n, 1.0), p) == 0.0);
}

TEST_CASE("ols_r_squared agrees with normal equations and is affine invariant") {
    Rng rng(8);
    const std::size_t n = 200;
    Eigen::MatrixXd x(Eigen::Index(n), 2);
    for (std::size_t i = 0; i < n; ++i) {
        x(Eigen::Index(i), 0) = rng.normal();
        x(Eigen::Index(i), 1) = 2 * x(Eigen::Index(i), 0) + rng.normal(0, 0.1);
    }
    const double r2 = ols_r_squared(std::span<const double>(x.col(1).data(), n), x.leftCols(1));
    const double oracle = 1.0 - 1.0 / testing::vif_oracle(x, 1);
    CHECK(std::abs(r2 - oracle) < 1e-8);

    Eigen::MatrixXd block(Eigen::Index(n), 2);
    for (std::size_t i = 0; i < n; ++i) {
        block(Eigen::Index(i), 0) = rng.normal();
        block(Eigen::Index(i), 1) = rng.normal();
    }
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = block(Eigen::Index(i), 0) + rng.normal();
    Eigen::Matrix2d a;
    a << 2, 1, -1, 3;
    const Eigen::MatrixXd moved = (block * a).rowwise() + Eigen::RowVector2d(5, -7);
    CHECK(std::abs(ols_r_squared(t, block) - ols_r_squared(t, moved)) < 1e-8);
}

TEST_CASE("vif_scores examples") {
    Rng rng(12);
    const std::size_t n = 500;
    Eigen::MatrixXd x(Eigen::Index(n), 3), y(Eigen::Index(n), 3);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rng.normal(), b = rng.normal();
        x.row(Eigen::Index(i)) << a, b, a + b;
        y.row(Eigen::Index(i)) << a, b, a + b + rng.normal();
    }
    const std::vector<bool> outcome(n, false);
    const Dataset exact({"a", "b", "c"}, x, outcome);
    CHECK(vif_scores(exact, {"a"}).at("a") == VifScore::finite(1.0));
    CHECK(vif_scores(exact, {"a", "b", "c"}).at("c").is_unbounded());

    const Dataset noisy({"a", "b", "c"}, y, outcome);
    const VifScore c = vif_scores(noisy, {"a", "b", "c"}).at("c");
    CHECK(!c.is_unbounded());
    CHECK(std::abs(c.value() / testing::vif_oracle(y, 2) - 1.0) < 1e-6);
}

TEST_CASE("vif_scores on an orthogonalized design are all one") {
    Rng rng(3);
    Eigen::MatrixXd raw(2000, 4);
    for (Eigen::Index i = 0; i < raw.rows(); ++i)
        for (Eigen::Index j = 0; j < raw.cols(); ++j) raw(i, j) = rng.normal();
    Eigen::MatrixXd centered = raw.rowwise() - raw.colwise().mean();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(centered);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(2000, 4);
    const Dataset d({"a", "b", "c", "d"}, q, std::vector<bool>(2000, true));
    for (const auto& [name, score] : vif_scores(d, {"a", "b", "c", "d"}).scores)
        CHECK(std::abs(score.value() - 1.0) < 1e-6);
}

TEST_CASE("unbounded vif orders above every finite value") {
    CHECK(VifScore::unbounded() > VifScore::finite(1e300));
    CHECK(VifScore::finite(2.0) < VifScore::finite(3.0));
    CHECK(VifScore::unbounded().above(5.0));
    CHECK(VifScore::finite(5.0).at_least(5.0));
    CHECK(!VifScore::finite(5.0).above(5.0));
    CHECK(std::isinf(VifScore::unbounded().value()));
}

TEST_CASE("equal-frequency discretization") {
    std::vector<double> ten(10);
    std::iota(ten.begin(), ten.end(), 1.0);
    CHECK(discretize_equal_frequency(ten, 2).labels == std::vector<int>{0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
    const auto constant = discretize_equal_frequency(std::vector<double>(8, 3.0), 4);
    CHECK(constant.bin_count() == 1);
    CHECK(constant.labels == std::vector<int>(8, 0));
    const std::vector<double> binary{0, 1, 1, 0, 0, 1};
    CHECK(discretize_equal_frequency(binary, 2).labels == std::vector<int>{0, 1, 1, 0, 0, 1});
    CHECK_THROWS_AS(discretize_equal_frequency(ten, 1), TooFewValues);
    CHECK_THROWS_AS(discretize_equal_frequency(std::vector<double>{1, 2}, 3), TooFewValues);
}

TEST_CASE("equal-frequency labels stay within bins and follow value order") {
    Rng rng(21);
    for (int t = 0; t < 30; ++t) {
        std::vector<double> v(20 + rng.uniform_index(100));
        for (auto& x : v) x = double(rng.uniform_index(12)) + (t % 2 ? rng.normal() : 0.0);
        const auto c = discretize_equal_frequency(v, 10);
        CHECK(c.bin_count() <= 10);
        for (std::size_t i = 0; i < v.size(); ++i) {
            CHECK(c.labels[i] >= 0);
            CHECK(c.labels[i] < c.bin_count());
            for (std::size_t k = 0; k < v.size(); ++k)
                if (v[i] < v[k]) CHECK(c.labels[i] <= c.labels[k]);
        }
    }
}

TEST_CASE("mdl discretization cuts a separable column once") {
    std::vector<double> v;
    std::vector<bool> y;
    for (int i = 0; i < 40; ++i) {
        v.push_back(i);
        y.push_back(i >= 20);
    }
    const auto c = discretize_mdl(v, y);
    REQUIRE(c.bin_edges.size() == 1);
    CHECK(c.bin_edges[0] == Approx(19.5));
    std::vector<bool> noise(40);
    for (int i = 0; i < 40; ++i) noise[std::size_t(i)] = (i % 2) == 0;
    CHECK(discretize_mdl(v, noise).bin_count() == 1);
}

TEST_CASE("information gain examples") {
    const std::vector<bool> y{true, true, true, false};
    CHECK(outcome_entropy(y) == Approx(0.8113).epsilon(1e-4));
    CHECK(information_gain(column_of({0, 0, 1, 1}), y) == Approx(0.3113).epsilon(1e-4));
    CHECK(information_gain(column_of({1, 1, 1, 0}), y) == Approx(outcome_entropy(y)));
    CHECK(information_gain(column_of({0, 0, 0, 0}), y) == 0.0);
    CHECK_THROWS_AS(information_gain(column_of({0, 1}), y), LengthMismatch);
}

TEST_CASE("information gain never exceeds outcome entropy") {
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng.uniform_index(80);
        std::vector<int> labels(n);
        std::vector<bool> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = int(rng.uniform_index(5));
            y[i] = rng.bernoulli(0.4);
        }
        const double ig = information_gain(column_of(labels), y);
        CHECK(ig >= 0.0);
        CHECK(ig <= outcome_entropy(y) + 1e-12);
    }
}

TEST_CASE("chi-squared examples") {
    CHECK(chi_squared(column_of({0, 0, 1, 1}), {true, false, true, false}) == 0.0);
    std::vector<int> perfect(40);
    std::vector<bool> y(40);
    for (std::size_t i = 0; i < 40; ++i) {
        perfect[i] = i < 20 ? 1 : 0;
        y[i] = i < 20;
    }
    CHECK(chi_squared(column_of(perfect), y) == Approx(40.0));
    std::vector<int> twenty(20);
    std::vector<bool> y20(20);
    for (std::size_t i = 0; i < 20; ++i) {
        twenty[i] = i < 10 ? 0 : 1;
        y20[i] = i < 10;
    }
    CHECK(chi_squared(column_of(twenty), y20) == Approx(20.0));
    DiscreteColumn empty_bin{{0, 0, 2, 2}, {0.5, 1.5}};
    CHECK(chi_squared(empty_bin, {true, true, false, false}) == Approx(4.0));
}

TEST_CASE("inconsistency rate examples") {
    const DiscreteColumn pure = column_of({0, 0, 1, 1});
    const DiscreteColumn* cols[] = {&pure};
    CHECK(inconsistency_rate(cols, {true, true, false, false}) == 0.0);
    const DiscreteColumn one = column_of({0, 0, 0, 0});
    const DiscreteColumn* single[] = {&one};
    CHECK(inconsistency_rate(single, {true, false, true, false}) == 0.5);

    const Dataset d = testing::random_dataset(6, 60, 5);
    CHECK(inconsistency_rate(d, d.metric_names(), 10) == 0.0);
}

TEST_CASE("inconsistency rate never rises when a metric is added") {
    const Dataset d = testing::random_dataset(13, 80, 5, 0.3);
    const auto& names = d.metric_names();
    for (unsigned mask = 1; mask < 32; ++mask) {
        MetricSubset s;
        for (unsigned j = 0; j < 5; ++j)
            if (mask & (1u << j)) s.push_back(names[j]);
        const double base = inconsistency_rate(d, s, 3);
        for (unsigned j = 0; j < 5; ++j) {
            if (mask & (1u << j)) continue;
            MetricSubset more = s;
            more.push_back(names[j]);
            CHECK(inconsistency_rate(d, more, 3) <= base + 1e-15);
        }
    }
}

TEST_CASE("aic examples") {
    CHECK(aic(0.0, 1) == 2.0);
    CHECK(aic(-10.0, 3) == 26.0);
    CHECK(aic(-10.0, 4) - aic(-10.0, 3) == 2.0);
}
