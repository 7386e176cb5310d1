#pragma once

#include "corrsel/classifiers.hpp"
#include "corrsel/dataset.hpp"
#include "corrsel/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace corrsel::testing {

// 7 independent base metrics m0..m6; m0, m1 and m2 each get one clone at
// noise sd 0.01. Signal concentrated on m0.
inline SyntheticSpec planted_spec(std::uint64_t seed, std::size_t modules = 500) {
    SyntheticSpec spec;
    spec.base_metric_count = 7;
    spec.clone_groups = {{0, 1, 0.01}, {1, 1, 0.01}, {2, 1, 0.01}};
    spec.module_count = modules;
    spec.signal_coefficients = {1.0, 0.3, 0.3, 0.3, 0.3, 0.3, 0.3};
    spec.seed = seed;
    return spec;
}

inline Dataset planted_fixture(std::uint64_t seed, std::size_t modules = 500) {
    return generate_synthetic(planted_spec(seed, modules));
}

// Signal only on the base metrics that have no clone.
inline SyntheticSpec independent_signal_spec(std::uint64_t seed) {
    SyntheticSpec spec = planted_spec(seed);
    spec.signal_coefficients = {0.0, 0.0, 0.0, 0.8, 0.8, 0.8, 0.8};
    return spec;
}

inline Dataset random_dataset(std::uint64_t seed, std::size_t n, std::size_t p, double slope = 0.7) {
    Rng rng(seed);
    std::vector<std::string> names;
    for (std::size_t j = 0; j < p; ++j) names.push_back("x" + std::to_string(j));
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    std::vector<bool> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double eta = -0.3;
        for (std::size_t j = 0; j < p; ++j) {
            x(Eigen::Index(i), Eigen::Index(j)) = rng.normal();
            eta += (j % 2 == 0 ? slope : -slope / 2) * x(Eigen::Index(i), Eigen::Index(j));
        }
        y[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-eta)));
    }
    if (std::all_of(y.begin(), y.end(), [](bool b) { return b; })) y[0] = false;
    if (std::none_of(y.begin(), y.end(), [](bool b) { return b; })) y[0] = true;
    return Dataset(names, x, y);
}

// Spearman for tie-free data: 1 - 6 sum d^2 / (n (n^2 - 1)).
inline double spearman_formula(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<std::size_t> ox(n), oy(n);
    for (std::size_t i = 0; i < n; ++i) ox[i] = oy[i] = i;
    std::sort(ox.begin(), ox.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    std::sort(oy.begin(), oy.end(), [&](auto a, auto b) { return y[a] < y[b]; });
    std::vector<double> rx(n), ry(n);
    for (std::size_t r = 0; r < n; ++r) {
        rx[ox[r]] = double(r + 1);
        ry[oy[r]] = double(r + 1);
    }
    long double sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += (long double)(rx[i] - ry[i]) * (rx[i] - ry[i]);
    const long double nn = n;
    return double(1.0L - 6.0L * sum / (nn * (nn * nn - 1.0L)));
}

// Solves a dense system by Gaussian elimination with partial pivoting.
inline std::vector<long double> gauss_solve(std::vector<std::vector<long double>> a, std::vector<long double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const long double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<long double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        long double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return x;
}

// VIF of column j via normal equations on [1, other columns].
inline double vif_oracle(const Eigen::MatrixXd& x, std::size_t j) {
    const std::size_t n = std::size_t(x.rows()), p = std::size_t(x.cols());
    std::vector<std::size_t> others;
    for (std::size_t k = 0; k < p; ++k)
        if (k != j) others.push_back(k);
    const std::size_t m = others.size() + 1;
    auto design = [&](std::size_t i, std::size_t c) -> long double {
        return c == 0 ? 1.0L : (long double)x(Eigen::Index(i), Eigen::Index(others[c - 1]));
    };
    std::vector<std::vector<long double>> xtx(m, std::vector<long double>(m, 0));
    std::vector<long double> xty(m, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < m; ++a) {
            xty[a] += design(i, a) * x(Eigen::Index(i), Eigen::Index(j));
            for (std::size_t b = 0; b < m; ++b) xtx[a][b] += design(i, a) * design(i, b);
        }
    const auto beta = gauss_solve(xtx, xty);
    long double mean = 0;
    for (std::size_t i = 0; i < n; ++i) mean += x(Eigen::Index(i), Eigen::Index(j));
    mean /= n;
    long double rss = 0, tss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        long double fit = 0;
        for (std::size_t a = 0; a < m; ++a) fit += beta[a] * design(i, a);
        const long double yi = x(Eigen::Index(i), Eigen::Index(j));
        rss += (yi - fit) * (yi - fit);
        tss += (yi - mean) * (yi - mean);
    }
    return double(1.0L / (rss / tss));
}

// Fraction of (positive, negative) pairs ranked correctly, ties count half.
inline double auc_pairs(const std::vector<double>& s, const std::vector<bool>& y) {
    long long twice = 0, pairs = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t k = 0; k < s.size(); ++k)
            if (y[i] && !y[k]) {
                ++pairs;
                twice += s[i] > s[k] ? 2 : (s[i] == s[k] ? 1 : 0);
            }
    return double(twice) / double(2 * pairs);
}

// Central finite-difference gradient of the log-likelihood, max-norm.
inline double fd_gradient_norm(const Dataset& d, const LogisticModel& m, double h = 1e-6) {
    std::vector<std::size_t> cols = d.indices_of(m.metric_names);
    double worst = 0.0;
    for (std::size_t k = 0; k <= m.coefficients.size(); ++k) {
        double b0p = m.intercept, b0m = m.intercept;
        std::vector<double> cp = m.coefficients, cm = m.coefficients;
        if (k == 0) {
            b0p += h;
            b0m -= h;
        } else {
            cp[k - 1] += h;
            cm[k - 1] -= h;
        }
        const double g = (logistic_log_likelihood(d, cols, b0p, cp) - logistic_log_likelihood(d, cols, b0m, cm)) /
                         (2 * h);
        worst = std::max(worst, std::abs(g));
    }
    return worst;
}

// Exact analytic gradient max-norm: X^T (y - p).
inline double analytic_gradient_norm(const Dataset& d, const LogisticModel& m) {
    std::vector<std::size_t> cols = d.indices_of(m.metric_names);
    std::vector<long double> g(cols.size() + 1, 0);
    for (std::size_t i = 0; i < d.module_count(); ++i) {
        long double eta = m.intercept;
        for (std::size_t k = 0; k < cols.size(); ++k)
            eta += m.coefficients[k] * d.values()(Eigen::Index(i), Eigen::Index(cols[k]));
        const long double p = 1.0L / (1.0L + std::exp(-eta));
        const long double r = (d.outcome()[i] ? 1.0L : 0.0L) - p;
        g[0] += r;
        for (std::size_t k = 0; k < cols.size(); ++k) g[k + 1] += r * d.values()(Eigen::Index(i), Eigen::Index(cols[k]));
    }
    double worst = 0;
    for (auto v : g) worst = std::max(worst, double(std::fabs(v)));
    return worst;
}

}  // namespace corrsel::testing
