#pragma once

#include "ahc/rng.hpp"

#include <utility>
#include <vector>

namespace ahc {

enum class AlStrategy { Random, Uncertainty };

// Cursor into the predicate list; each learning batch targets one predicate.
struct PredicateRotation {
    int cursor = 0;
};

// Per-predicate learning candidates: (item_id, psi_ml for that predicate).
// Items already carrying a training label for the predicate are excluded by
// the caller.
struct LearningCandidates {
    std::vector<std::vector<std::pair<int, double>>> per_predicate;
};

struct LearningPair {
    int item_id = 0;
    int predicate_pos = 0;  // position in the dataset's predicate list
};

// Targets the first predicate from the cursor with any candidates, then picks
// n items: uncertainty = smallest |psi - 0.5| (ties by ascending id), random =
// uniform without replacement. Returns fewer pairs when candidates run out and
// an empty batch when every list is empty. Output is invariant to candidate
// input order.
std::vector<LearningPair> select_learning_batch(AlStrategy strategy,
                                                const LearningCandidates& candidates, int n,
                                                PredicateRotation& rotation, Rng& rng);

}  // namespace ahc
