#include "doctest.h"

#include "corrsel/errors.hpp"
#include "corrsel/evaluation.hpp"
#include "corrsel/random.hpp"

#include "fixtures.hpp"

using namespace corrsel;
using doctest::Approx;

TEST_CASE("auc examples") {
    CHECK(auc(std::vector<double>{0.9, 0.8, 0.1, 0.2}, {true, true, false, false}) == 1.0);
    CHECK(auc(std::vector<double>{0.4, 0.4, 0.4}, {true, false, true}) == 0.5);
    CHECK(auc(std::vector<double>{0.9, 0.8, 0.3}, {true, false, true}) == 0.5);
    CHECK_THROWS_AS(auc(std::vector<double>{0.1, 0.2}, {true, true}), SingleClass);
    CHECK_THROWS_AS(auc(std::vector<double>{0.1}, {true, false}), LengthMismatch);
}

TEST_CASE("auc matches brute-force pair counting") {
    Rng rng(77);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng.uniform_index(199);
        std::vector<double> s(n);
        std::vector<bool> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = t % 3 == 0 ? double(rng.uniform_index(5)) : rng.uniform01();
            y[i] = rng.bernoulli(0.35);
        }
        y[0] = true;
        y[1] = false;
        const double a = auc(s, y);
        CHECK(a == testing::auc_pairs(s, y));

        std::vector<double> moved(n);
        std::vector<bool> flipped(n);
        for (std::size_t i = 0; i < n; ++i) {
            moved[i] = std::exp(3.0 * s[i]);
            flipped[i] = !y[i];
        }
        CHECK(auc(moved, y) == a);
        // Complementary pair counts; compare the rationals, not 1 - a in floating point.
        CHECK(auc(s, flipped) == testing::auc_pairs(s, flipped));
        CHECK(std::abs(auc(s, flipped) + a - 1.0) <= 2 * std::numeric_limits<double>::epsilon());
    }
}

TEST_CASE("confusion_at thresholds strictly above") {
    CHECK(confusion_at(std::vector<double>{0.6, 0.4}, {true, false}) == ConfusionMatrix{1, 0, 1, 0});
    CHECK(confusion_at(std::vector<double>{0.5}, {true}) == ConfusionMatrix{0, 0, 0, 1});
    CHECK(confusion_at(std::vector<double>{}, {}).total() == 0);
    CHECK(confusion_at(std::vector<double>{0.7, 0.9}, {false, true}, 0.8) == ConfusionMatrix{1, 0, 1, 0});
}

TEST_CASE("f_measure examples") {
    CHECK(f_measure({3, 1, 0, 1}) == Approx(0.75));
    CHECK(f_measure({0, 2, 5, 3}) == 0.0);
    CHECK(f_measure({4, 0, 9, 0}) == 1.0);
}

TEST_CASE("mcc examples") {
    CHECK(mcc({5, 0, 5, 0}) == 1.0);
    CHECK(mcc({0, 5, 0, 5}) == -1.0);
    CHECK(mcc({4, 1, 3, 2}) == Approx(10.0 / std::sqrt(600.0)));
    CHECK(mcc({5, 5, 0, 0}) == 0.0);
    CHECK(mcc({}) == 0.0);
}

TEST_CASE("mcc is symmetric and survives large counts") {
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
        ConfusionMatrix cm{rng.uniform_index(50), rng.uniform_index(50), rng.uniform_index(50), rng.uniform_index(50)};
        CHECK(mcc(cm) == Approx(mcc({cm.tn, cm.fn, cm.tp, cm.fp})));
        CHECK(mcc(cm) >= -1.0);
        CHECK(mcc(cm) <= 1.0);
    }
    const std::uint64_t big = 3'000'000'000ULL;
    CHECK(mcc({big, 0, big, 0}) == 1.0);
    CHECK(mcc({big, big / 2, big, big / 3}) == Approx(mcc({6, 3, 6, 2})));
}

TEST_CASE("perfect scores only for perfect classifiers") {
    CHECK(f_measure({2, 0, 0, 0}) == 1.0);
    CHECK(f_measure({2, 1, 0, 0}) < 1.0);
    CHECK(mcc({2, 0, 0, 0}) == 0.0);
    CHECK(mcc({2, 0, 1, 0}) == 1.0);
    CHECK(mcc({2, 0, 1, 1}) < 1.0);
}
