#include "corrsel/evaluation.hpp"

#include "corrsel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace corrsel {

double auc(std::span<const double> scores, const std::vector<bool>& labels) {
    if (scores.size() != labels.size()) throw LengthMismatch("scores and labels differ in length");
    const std::uint64_t positives = std::uint64_t(std::count(labels.begin(), labels.end(), true));
    const std::uint64_t negatives = labels.size() - positives;
    if (positives == 0 || negatives == 0) throw SingleClass("AUC needs both classes");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Twice the positive rank sum, kept integral so the result is exact.
    unsigned __int128 doubled_rank_sum = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const std::uint64_t doubled_avg_rank = std::uint64_t(i + 1 + j);
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]]) doubled_rank_sum += doubled_avg_rank;
        i = j;
    }
    // 2U = 2 * rank_sum - P(P+1); U counts wins plus half of ties.
    const unsigned __int128 doubled_u = doubled_rank_sum - (unsigned __int128)positives * (positives + 1);
    const unsigned __int128 doubled_pairs = (unsigned __int128)2 * positives * negatives;
    return double(doubled_u) / double(doubled_pairs);
}

ConfusionMatrix confusion_at(std::span<const double> scores, const std::vector<bool>& labels, double threshold) {
    if (scores.size() != labels.size()) throw LengthMismatch("scores and labels differ in length");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] > threshold;
        if (predicted && labels[i]) ++cm.tp;
        else if (predicted) ++cm.fp;
        else if (labels[i]) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

double f_measure(const ConfusionMatrix& cm) {
    if (cm.tp == 0) return 0.0;
    const double precision = double(cm.tp) / double(cm.tp + cm.fp);
    const double recall = double(cm.tp) / double(cm.tp + cm.fn);
    return 2.0 * precision * recall / (precision + recall);
}

double mcc(const ConfusionMatrix& cm) {
    const std::uint64_t a = cm.tp + cm.fp, b = cm.tp + cm.fn, c = cm.tn + cm.fp, d = cm.tn + cm.fn;
    if (a == 0 || b == 0 || c == 0 || d == 0) return 0.0;
    const __int128 numerator = (__int128)cm.tp * cm.tn - (__int128)cm.fp * cm.fn;
    const long double denominator =
        std::sqrt((long double)a) * std::sqrt((long double)b) * std::sqrt((long double)c) * std::sqrt((long double)d);
    return std::clamp(double((long double)numerator / denominator), -1.0, 1.0);
}

}  // namespace corrsel
