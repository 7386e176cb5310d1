#include "corrsel/selectors.hpp"

#include "corrsel/classifiers.hpp"
#include "corrsel/errors.hpp"
#include "corrsel/evaluation.hpp"
#include "corrsel/random.hpp"
#include "corrsel/stats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace corrsel {

namespace {

std::string normalize_token(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (c == '_') c = '-';
        out.push_back(char(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

MetricSubset names_of(const Dataset& d, const std::vector<std::size_t>& indices) {
    MetricSubset out;
    for (auto j : indices) out.push_back(d.metric_names()[j]);
    return out;
}

// Re-sorts a subset into source column order.
MetricSubset in_column_order(const Dataset& d, const MetricSubset& subset) {
    auto idx = d.indices_of(subset);
    std::sort(idx.begin(), idx.end());
    return names_of(d, idx);
}

using IndexSet = std::vector<std::size_t>;  // sorted

struct SearchNode {
    double score;
    IndexSet members;
};

// Open-list order: higher score, then smaller subset, then lexicographic.
struct NodeOrder {
    bool operator()(const SearchNode& a, const SearchNode& b) const {
        if (a.score != b.score) return a.score > b.score;
        if (a.members.size() != b.members.size()) return a.members.size() < b.members.size();
        return a.members < b.members;
    }
};

struct BestFirstOutcome {
    SearchNode best;
    std::map<IndexSet, double> visited;
};

// Forward best-first search from the empty set. Stops after `stall_limit`
// consecutive expansions that fail to beat the best score.
BestFirstOutcome best_first(std::size_t p, const std::function<double(const IndexSet&)>& score, int stall_limit) {
    BestFirstOutcome out;
    SearchNode start{score({}), {}};
    out.visited.emplace(start.members, start.score);
    out.best = start;
    std::set<SearchNode, NodeOrder> open{start};
    int stall = 0;
    while (!open.empty() && stall < stall_limit) {
        const SearchNode node = *open.begin();
        open.erase(open.begin());
        bool improved = false;
        for (std::size_t f = 0; f < p; ++f) {
            if (std::binary_search(node.members.begin(), node.members.end(), f)) continue;
            IndexSet child = node.members;
            child.insert(std::upper_bound(child.begin(), child.end(), f), f);
            if (out.visited.count(child)) continue;
            const double s = score(child);
            out.visited.emplace(child, s);
            SearchNode child_node{s, std::move(child)};
            if (s > out.best.score) {
                out.best = child_node;
                improved = true;
            }
            open.insert(std::move(child_node));
        }
        stall = improved ? 0 : stall + 1;
    }
    return out;
}

std::vector<DiscreteColumn> discretize_all(const Dataset& d, const SelectorConfig& config) {
    std::vector<DiscreteColumn> columns;
    columns.reserve(d.metric_count());
    const int bins = std::max(2, std::min<int>(config.bins, int(d.module_count())));
    for (std::size_t j = 0; j < d.metric_count(); ++j) {
        if (config.discretizer == Discretizer::Mdl)
            columns.push_back(discretize_mdl(d.column(j), d.outcome()));
        else if (d.module_count() < 2)
            columns.push_back(DiscreteColumn{std::vector<int>(d.module_count(), 0), {}});
        else
            columns.push_back(discretize_equal_frequency(d.column(j), bins));
    }
    return columns;
}

}  // namespace

const std::vector<SelectorId>& all_selectors() {
    static const std::vector<SelectorId> ids{SelectorId::CFS,      SelectorId::IG,       SelectorId::Chisq,
                                             SelectorId::CON,      SelectorId::RFE_LR,   SelectorId::RFE_RF,
                                             SelectorId::Step_FWD, SelectorId::Step_BWD, SelectorId::Step_BOTH,
                                             SelectorId::AutoSpearman};
    return ids;
}

std::string to_string(SelectorId id) {
    switch (id) {
        case SelectorId::CFS: return "CFS";
        case SelectorId::IG: return "IG";
        case SelectorId::Chisq: return "Chisq";
        case SelectorId::CON: return "CON";
        case SelectorId::RFE_LR: return "RFE-LR";
        case SelectorId::RFE_RF: return "RFE-RF";
        case SelectorId::Step_FWD: return "Step-FWD";
        case SelectorId::Step_BWD: return "Step-BWD";
        case SelectorId::Step_BOTH: return "Step-BOTH";
        case SelectorId::AutoSpearman: return "AutoSpearman";
    }
    return "?";
}

std::string selector_abbreviations() {
    std::string out;
    for (auto id : all_selectors()) {
        if (!out.empty()) out += ", ";
        out += to_string(id);
    }
    return out;
}

SelectorId parse_selector(std::string_view text) {
    const std::string wanted = normalize_token(text);
    for (auto id : all_selectors())
        if (normalize_token(to_string(id)) == wanted) return id;
    throw UnsupportedSelector("unknown selector '" + std::string(text) + "'; valid: " + selector_abbreviations());
}

std::string to_string(Discretizer d) { return d == Discretizer::Mdl ? "mdl" : "equal-frequency"; }

Discretizer parse_discretizer(std::string_view text) {
    const std::string t = normalize_token(text);
    if (t == "mdl") return Discretizer::Mdl;
    if (t == "equal-frequency") return Discretizer::EqualFrequency;
    throw ConfigError("unknown discretizer '" + std::string(text) + "'; valid: mdl, equal-frequency");
}

void validate(const SelectorConfig& config) {
    if (config.bins < 2) throw ConfigError("bins must be >= 2");
    if (config.top_k && *config.top_k < 1) throw ConfigError("top_k must be >= 1");
    if (config.rfe_resamples < 1) throw ConfigError("rfe_resamples must be >= 1");
    if (config.rfe_forest_trees < 1) throw ConfigError("rfe_forest_trees must be >= 1");
    if (config.stepwise_max_steps < 0) throw ConfigError("stepwise_max_steps must be >= 0");
    if (config.best_first_stall < 1) throw ConfigError("best_first_stall must be >= 1");
    validate(config.autospearman);
}

// ---------------------------------------------------------------------------
// CFS

namespace {

struct CfsTables {
    std::vector<double> class_corr;   // |rho(metric, outcome)|
    Eigen::MatrixXd feature_corr;     // |rho(metric, metric)|
};

CfsTables cfs_tables(const Dataset& d) {
    const auto y = outcome_as_double(d);
    CfsTables t;
    for (std::size_t j = 0; j < d.metric_count(); ++j) t.class_corr.push_back(std::abs(spearman(d.column(j), y)));
    t.feature_corr = spearman_matrix(d).values.cwiseAbs();
    return t;
}

double merit_of(const CfsTables& t, const IndexSet& members) {
    if (members.empty()) return 0.0;
    double cf = 0.0, ff = 0.0;
    for (std::size_t a = 0; a < members.size(); ++a) {
        cf += t.class_corr[members[a]];
        for (std::size_t b = a + 1; b < members.size(); ++b)
            ff += t.feature_corr(Eigen::Index(members[a]), Eigen::Index(members[b]));
    }
    // k * mean_cf / sqrt(k + k(k-1) * mean_ff) with the means expanded.
    return cf / std::sqrt(double(members.size()) + 2.0 * ff);
}

}  // namespace

double cfs_merit(const Dataset& d, const MetricSubset& subset) {
    auto idx = d.indices_of(subset);
    std::sort(idx.begin(), idx.end());
    return merit_of(cfs_tables(d), idx);
}

CfsSearchResult cfs_search(const Dataset& train, const SelectorConfig& config) {
    require_supervised(train);
    const CfsTables tables = cfs_tables(train);
    const auto search = best_first(
        train.metric_count(), [&](const IndexSet& s) { return merit_of(tables, s); }, config.best_first_stall);
    CfsSearchResult out;
    out.subset = names_of(train, search.best.members);
    out.merit = search.best.score;
    out.visited = search.visited.size();
    for (const auto& [members, merit] : search.visited) out.best_visited_merit = std::max(out.best_visited_merit, merit);
    return out;
}

MetricSubset select_cfs(const Dataset& train, const SelectorConfig& config) { return cfs_search(train, config).subset; }

// ---------------------------------------------------------------------------
// Ranking filters

std::vector<std::pair<std::string, double>> filter_scores(const Dataset& train, SelectorId id,
                                                          const SelectorConfig& config) {
    if (id != SelectorId::IG && id != SelectorId::Chisq)
        throw UnsupportedSelector(to_string(id) + " is not a ranking filter");
    require_supervised(train);
    const auto columns = discretize_all(train, config);
    std::vector<std::pair<std::string, double>> scores;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const double s = id == SelectorId::IG ? information_gain(columns[j], train.outcome())
                                              : chi_squared(columns[j], train.outcome());
        scores.emplace_back(train.metric_names()[j], s);
    }
    return scores;
}

namespace {

MetricSubset apply_cutoff(std::vector<std::pair<std::string, double>> scores, const SelectorConfig& config) {
    // Stable sort keeps column order among equal scores.
    std::stable_sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    MetricSubset out;
    for (const auto& [name, score] : scores) {
        if (config.top_k) {
            if (out.size() >= *config.top_k) break;
        } else if (!(score > 0.0)) {
            break;
        }
        out.push_back(name);
    }
    return out;
}

}  // namespace

MetricSubset select_ig(const Dataset& train, const SelectorConfig& config) {
    return apply_cutoff(filter_scores(train, SelectorId::IG, config), config);
}

MetricSubset select_chisq(const Dataset& train, const SelectorConfig& config) {
    return apply_cutoff(filter_scores(train, SelectorId::Chisq, config), config);
}

// ---------------------------------------------------------------------------
// Consistency

double subset_inconsistency(const Dataset& d, const MetricSubset& subset, const SelectorConfig& config) {
    const auto columns = discretize_all(d, config);
    std::vector<const DiscreteColumn*> picked;
    for (auto j : d.indices_of(subset)) picked.push_back(&columns[j]);
    return inconsistency_rate(picked, d.outcome());
}

MetricSubset select_consistency(const Dataset& train, const SelectorConfig& config) {
    require_supervised(train);
    const auto columns = discretize_all(train, config);
    const auto rate_of = [&](const IndexSet& s) {
        std::vector<const DiscreteColumn*> picked;
        for (auto j : s) picked.push_back(&columns[j]);
        return inconsistency_rate(picked, train.outcome());
    };
    const std::size_t p = train.metric_count();
    IndexSet all(p);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const double target = rate_of(all) + 1e-9;

    auto search = best_first(p, [&](const IndexSet& s) { return -rate_of(s); }, config.best_first_stall);

    // Smallest feasible subset, then lowest rate, then lexicographic.
    const IndexSet* chosen = nullptr;
    double chosen_rate = 0.0;
    for (const auto& [members, neg_rate] : search.visited) {
        const double rate = -neg_rate;
        if (rate > target) continue;
        if (!chosen || members.size() < chosen->size() ||
            (members.size() == chosen->size() && rate < chosen_rate)) {
            chosen = &members;
            chosen_rate = rate;
        }
    }
    if (chosen) return names_of(train, *chosen);

    // The search stalled before reaching the full-set rate: grow greedily.
    IndexSet current = search.best.members;
    while (rate_of(current) > target) {
        std::size_t best_f = p;
        double best_rate = 0.0;
        for (std::size_t f = 0; f < p; ++f) {
            if (std::binary_search(current.begin(), current.end(), f)) continue;
            IndexSet trial = current;
            trial.insert(std::upper_bound(trial.begin(), trial.end(), f), f);
            const double r = rate_of(trial);
            if (best_f == p || r < best_rate) {
                best_f = f;
                best_rate = r;
            }
        }
        current.insert(std::upper_bound(current.begin(), current.end(), best_f), best_f);
    }
    return names_of(train, current);
}

// ---------------------------------------------------------------------------
// Recursive feature elimination

namespace {

inline constexpr std::uint64_t kReseedOffset = 0x9E3779B97F4A7C15ULL;

BootstrapSplit bootstrap_with_retry(const Dataset& d, std::uint64_t seed) {
    for (int attempt = 0;; ++attempt) {
        try {
            return bootstrap_sample(d, seed + std::uint64_t(attempt) * kReseedOffset);
        } catch (const EmptyTestSet&) {
            if (attempt >= 64) throw;
        }
    }
}

struct Resample {
    Dataset train;
    Dataset test;
};

double mean_internal_auc(const std::vector<Resample>& resamples, const MetricSubset& subset, RfeBackend backend,
                         const SelectorConfig& config, std::uint64_t seed) {
    double sum = 0.0;
    int used = 0;
    for (std::size_t r = 0; r < resamples.size(); ++r) {
        const auto& rs = resamples[r];
        std::vector<double> scores;
        if (backend == RfeBackend::LR) {
            scores = predict_all(fit_logistic(rs.train, subset), rs.test);
        } else {
            scores = predict_all(
                fit_random_forest(rs.train, subset, config.rfe_forest_trees, derive_seed(seed, {r, 1})), rs.test);
        }
        sum += auc(scores, rs.test.outcome());
        ++used;
    }
    return used == 0 ? 0.5 : sum / used;
}

ImportanceScores backend_importance(const Dataset& train, const MetricSubset& subset, RfeBackend backend,
                                    const SelectorConfig& config, std::uint64_t seed) {
    if (backend == RfeBackend::LR) return importance(fit_logistic(train, subset), train);
    return importance(fit_random_forest(train, subset, config.rfe_forest_trees, derive_seed(seed, {0xF0})), train);
}

}  // namespace

RfeResult rfe_search(const Dataset& train, RfeBackend backend, const SelectorConfig& config, std::uint64_t seed) {
    require_supervised(train);
    const std::size_t p = train.metric_count();
    RfeResult out;
    if (p == 0) return out;

    // Shared resamples of the training sample; both classes must reach each side.
    std::vector<Resample> resamples;
    for (int r = 0; r < config.rfe_resamples; ++r) {
        std::uint64_t s = derive_seed(seed, {std::uint64_t(r)});
        for (int attempt = 0; attempt < 64; ++attempt, s += kReseedOffset) {
            BootstrapSplit split = bootstrap_with_retry(train, s);
            if (split.train.has_both_classes() && split.test.has_both_classes()) {
                resamples.push_back({std::move(split.train), std::move(split.test)});
                break;
            }
        }
    }

    std::set<std::size_t> sizes(config.rfe_sizes.begin(), config.rfe_sizes.end());
    if (sizes.empty())
        for (std::size_t k = 1; k <= p; ++k) sizes.insert(k);

    MetricSubset current = train.metric_names();
    while (!current.empty()) {
        if (sizes.count(current.size()))
            out.evaluated.emplace_back(current, mean_internal_auc(resamples, current, backend, config, seed));
        if (current.size() == 1) break;
        const auto scores = backend_importance(train, current, backend, config, derive_seed(seed, {current.size()}));
        // Least important goes; ties drop the later column.
        std::size_t drop = 0;
        for (std::size_t k = 1; k < current.size(); ++k)
            if (scores.at(current[k]) <= scores.at(current[drop])) drop = k;
        current.erase(current.begin() + std::ptrdiff_t(drop));
    }

    const std::pair<MetricSubset, double>* best = nullptr;
    for (const auto& candidate : out.evaluated)
        if (!best || candidate.second > best->second ||
            (candidate.second == best->second && candidate.first.size() < best->first.size()))
            best = &candidate;
    if (best) out.subset = in_column_order(train, best->first);
    return out;
}

MetricSubset select_rfe(const Dataset& train, RfeBackend backend, const SelectorConfig& config, std::uint64_t seed) {
    return rfe_search(train, backend, config, seed).subset;
}

// ---------------------------------------------------------------------------
// Stepwise AIC

double subset_aic(const Dataset& d, const MetricSubset& subset) {
    const LogisticModel m = fit_logistic(d, subset);
    return aic(m.log_likelihood, int(subset.size()) + 1);
}

StepwiseResult stepwise_search(const Dataset& train, StepDirection direction, const SelectorConfig& config) {
    require_supervised(train);
    const std::size_t p = train.metric_count();
    const int max_steps = config.stepwise_max_steps > 0 ? config.stepwise_max_steps : int(2 * p + 1);

    std::vector<bool> in(p, direction == StepDirection::Backward);
    const auto current_subset = [&] {
        MetricSubset s;
        for (std::size_t j = 0; j < p; ++j)
            if (in[j]) s.push_back(train.metric_names()[j]);
        return s;
    };

    StepwiseResult out;
    double current = subset_aic(train, current_subset());
    out.start_aic = current;
    while (out.steps < max_steps) {
        std::size_t best_move = p;
        double best_aic = current;
        for (std::size_t j = 0; j < p; ++j) {
            const bool adding = !in[j];
            if (adding && direction == StepDirection::Backward) continue;
            if (!adding && direction == StepDirection::Forward) continue;
            in[j] = !in[j];
            const double a = subset_aic(train, current_subset());
            in[j] = !in[j];
            if (a < best_aic) {
                best_aic = a;
                best_move = j;
            }
        }
        if (best_move == p) break;
        in[best_move] = !in[best_move];
        current = best_aic;
        ++out.steps;
    }
    out.subset = current_subset();
    out.final_aic = current;
    return out;
}

MetricSubset select_stepwise(const Dataset& train, StepDirection direction, const SelectorConfig& config) {
    return stepwise_search(train, direction, config).subset;
}

// ---------------------------------------------------------------------------

MetricSubset select(SelectorId id, const Dataset& train, const SelectorConfig& config, std::uint64_t seed) {
    switch (id) {
        case SelectorId::CFS: return select_cfs(train, config);
        case SelectorId::IG: return select_ig(train, config);
        case SelectorId::Chisq: return select_chisq(train, config);
        case SelectorId::CON: return select_consistency(train, config);
        case SelectorId::RFE_LR: return select_rfe(train, RfeBackend::LR, config, seed);
        case SelectorId::RFE_RF: return select_rfe(train, RfeBackend::RF, config, seed);
        case SelectorId::Step_FWD: return select_stepwise(train, StepDirection::Forward, config);
        case SelectorId::Step_BWD: return select_stepwise(train, StepDirection::Backward, config);
        case SelectorId::Step_BOTH: return select_stepwise(train, StepDirection::Both, config);
        case SelectorId::AutoSpearman: return auto_spearman(train, config.autospearman).subset;
    }
    throw UnsupportedSelector("unsupported selector");
}

}  // namespace corrsel
