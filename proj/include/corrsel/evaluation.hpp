#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace corrsel {

struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

struct PerformanceTriple {
    double auc = 0.5;
    double f_measure = 0.0;
    double mcc = 0.0;
};

inline constexpr double kDefaultThreshold = 0.5;

// Mann-Whitney estimate of P(score_pos > score_neg) with ties counted half.
// Throws LengthMismatch or SingleClass.
double auc(std::span<const double> scores, const std::vector<bool>& labels);

// Predicted defective iff score > threshold (strict).
ConfusionMatrix confusion_at(std::span<const double> scores, const std::vector<bool>& labels,
                             double threshold = kDefaultThreshold);

// Harmonic mean of precision and recall; 0 when tp = 0.
double f_measure(const ConfusionMatrix& cm);

// Matthews correlation; 0 when any marginal is 0.
double mcc(const ConfusionMatrix& cm);

}  // namespace corrsel
