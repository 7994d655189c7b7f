#include "ahc/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ahc {

std::vector<LearningPair> select_learning_batch(AlStrategy strategy,
                                                const LearningCandidates& candidates, int n,
                                                PredicateRotation& rotation, Rng& rng) {
    if (n < 1) throw std::invalid_argument("learning batch size must be at least 1");
    const int preds = static_cast<int>(candidates.per_predicate.size());
    if (preds == 0) return {};

    int target = -1;
    for (int step = 0; step < preds; ++step) {
        const int p = (rotation.cursor + step) % preds;
        if (!candidates.per_predicate[p].empty()) {
            target = p;
            break;
        }
    }
    if (target < 0) return {};
    rotation.cursor = (target + 1) % preds;

    // Canonical ascending-id order makes both strategies independent of the
    // caller's candidate ordering.
    std::vector<std::pair<int, double>> pool = candidates.per_predicate[target];
    std::sort(pool.begin(), pool.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    const int take = std::min<int>(n, static_cast<int>(pool.size()));
    std::vector<LearningPair> batch;
    batch.reserve(take);
    if (strategy == AlStrategy::Uncertainty) {
        std::stable_sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
            return std::abs(a.second - 0.5) < std::abs(b.second - 0.5);
        });
        for (int i = 0; i < take; ++i) batch.push_back({pool[i].first, target});
    } else {
        for (int i = 0; i < take; ++i) {
            const int j = i + rng.below(static_cast<int>(pool.size()) - i);
            std::swap(pool[i], pool[j]);
            batch.push_back({pool[i].first, target});
        }
    }
    return batch;
}

}  // namespace ahc
