#include "corrsel/autospearman.hpp"

#include "corrsel/errors.hpp"
#include "corrsel/stats.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace corrsel {

void validate(const AutoSpearmanParams& params) {
    if (!(params.sp_t > 0.0 && params.sp_t <= 1.0)) throw ConfigError("sp_t must lie in (0, 1]");
    if (!(params.vif_t > 1.0)) throw ConfigError("vif_t must be > 1");
}

std::string to_string(EliminationPhase phase) {
    return phase == EliminationPhase::Spearman ? "spearman" : "vif";
}

EliminationResult spearman_phase(const Dataset& d, double sp_t) {
    AutoSpearmanParams params;
    params.sp_t = sp_t;
    return spearman_phase(d, params);
}

EliminationResult spearman_phase(const Dataset& d, const AutoSpearmanParams& params) {
    if (!(params.sp_t > 0.0 && params.sp_t <= 1.0)) throw ConfigError("sp_t must lie in (0, 1]");
    EliminationResult result;

    // Constant columns carry no rank information and break VIF designs.
    std::vector<std::size_t> metrics;
    for (std::size_t j = 0; j < d.metric_count(); ++j) {
        if (is_constant(d.column(j)))
            result.trace.push_back({EliminationPhase::Spearman, d.metric_names()[j], "", 0.0});
        else
            metrics.push_back(j);
    }

    // One correlation matrix over the non-constant metrics; never recomputed.
    const CorrelationMatrix s = spearman_matrix(d.project([&] {
        MetricSubset names;
        for (auto j : metrics) names.push_back(d.metric_names()[j]);
        return names;
    }()));
    const std::size_t m = metrics.size();

    struct Pair {
        double abs_rho;
        std::size_t i, j;  // positions into `metrics`, i < j
    };
    std::vector<Pair> candidates;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            const double r = std::abs(s.at(i, j));
            if (r >= params.sp_t) candidates.push_back({r, i, j});
        }
    std::sort(candidates.begin(), candidates.end(), [](const Pair& a, const Pair& b) {
        return std::tie(b.abs_rho, a.i, a.j) < std::tie(a.abs_rho, b.i, b.j);
    });

    std::vector<bool> removed(m, false);
    const auto mean_abs_rho = [&](std::size_t target, std::size_t a, std::size_t b) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t k = 0; k < m; ++k) {
            if (k == a || k == b) continue;
            if (params.mean_against_remaining && removed[k]) continue;
            sum += std::abs(s.at(target, k));
            ++count;
        }
        return count == 0 ? 0.0 : sum / double(count);
    };

    for (const auto& pair : candidates) {
        // Pairs touching an already removed metric left the candidate set.
        if (removed[pair.i] || removed[pair.j]) continue;
        const double mean_i = mean_abs_rho(pair.i, pair.i, pair.j);
        const double mean_j = mean_abs_rho(pair.j, pair.i, pair.j);
        const bool keep_i = mean_i <= mean_j;
        const std::size_t keep = keep_i ? pair.i : pair.j;
        const std::size_t drop = keep_i ? pair.j : pair.i;
        removed[drop] = true;
        result.trace.push_back({EliminationPhase::Spearman, d.metric_names()[metrics[drop]],
                                d.metric_names()[metrics[keep]], pair.abs_rho});
    }

    for (std::size_t k = 0; k < m; ++k)
        if (!removed[k]) result.subset.push_back(d.metric_names()[metrics[k]]);
    return result;
}

EliminationResult vif_phase(const Dataset& d, const MetricSubset& start, double vif_t) {
    if (!(vif_t > 1.0)) throw ConfigError("vif_t must be > 1");
    EliminationResult result{start, {}};
    while (!result.subset.empty()) {
        const VifReport report = vif_scores(d, result.subset);
        std::size_t worst = result.subset.size();
        for (std::size_t k = 0; k < report.scores.size(); ++k) {
            const VifScore& score = report.scores[k].second;
            if (!score.at_least(vif_t)) continue;
            if (worst == result.subset.size()) {
                worst = k;
                continue;
            }
            const VifScore& current = report.scores[worst].second;
            const bool later = d.require_index(result.subset[k]) > d.require_index(result.subset[worst]);
            if (score > current || (score == current && later)) worst = k;
        }
        if (worst == result.subset.size()) break;
        result.trace.push_back(
            {EliminationPhase::Vif, result.subset[worst], "", report.scores[worst].second.value()});
        result.subset.erase(result.subset.begin() + std::ptrdiff_t(worst));
    }
    return result;
}

EliminationResult auto_spearman(const Dataset& d, const AutoSpearmanParams& params) {
    validate(params);
    EliminationResult first = spearman_phase(d, params);
    EliminationResult second = vif_phase(d, first.subset, params.vif_t);
    first.trace.insert(first.trace.end(), second.trace.begin(), second.trace.end());
    return {std::move(second.subset), std::move(first.trace)};
}

}  // namespace corrsel
