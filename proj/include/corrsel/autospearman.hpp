#pragma once

#include "corrsel/dataset.hpp"

#include <string>
#include <vector>

namespace corrsel {

inline constexpr double kDefaultSpearmanThreshold = 0.7;
inline constexpr double kDefaultVifThreshold = 5.0;

struct AutoSpearmanParams {
    double sp_t = kDefaultSpearmanThreshold;  // in (0, 1]
    double vif_t = kDefaultVifThreshold;      // > 1
    // Compare pair members by their mean |rho| against the metrics still
    // retained rather than the full metric set. Off by default.
    bool mean_against_remaining = false;
};

enum class EliminationPhase { Spearman, Vif };

struct EliminationStep {
    EliminationPhase phase = EliminationPhase::Spearman;
    std::string removed;
    std::string kept;  // Spearman phase pair partner; empty otherwise
    // |rho| of the pair, the VIF of the removed metric (+inf when unbounded),
    // or 0 for a constant column dropped up front.
    double statistic = 0.0;
};

using EliminationTrace = std::vector<EliminationStep>;

struct EliminationResult {
    MetricSubset subset;
    EliminationTrace trace;
};

// Throws ConfigError when a threshold lies outside its domain.
void validate(const AutoSpearmanParams& params);

// Constant columns are removed first (statistic 0). Then pairs with
// |rho| >= sp_t are visited by descending |rho| (ties: lowest index pair); of
// each pair whose members are both still present, the member with the smaller
// mean |rho| to the other metrics is kept (ties: lower column index).
EliminationResult spearman_phase(const Dataset& d, const AutoSpearmanParams& params);
EliminationResult spearman_phase(const Dataset& d, double sp_t);

// Repeatedly drops the single metric with the largest VIF while any VIF is
// >= vif_t. Unbounded beats finite; ties remove the largest column index.
EliminationResult vif_phase(const Dataset& d, const MetricSubset& start, double vif_t);

// Both phases. Never reads the outcome.
EliminationResult auto_spearman(const Dataset& d, const AutoSpearmanParams& params = {});

std::string to_string(EliminationPhase phase);

}  // namespace corrsel
