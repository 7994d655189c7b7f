#pragma once

#include "ahc/core.hpp"

#include <cstdint>
#include <vector>

namespace ahc {

// Text generator with a tunable ceiling on classifier accuracy: each item
// carries per-predicate signal tokens that agree with gold except with
// probability noise, plus uninformative background tokens.
struct SynthesisSpec {
    int pool_size = 1000;
    std::vector<double> selectivity;  // theta per predicate, in (0,1)
    std::vector<double> noise;        // per predicate signal flip rate, in [0, 0.5)
    int signal_tokens_per_predicate = 3;
    int signal_vocab_per_predicate = 6;  // distinct tokens per polarity
    int background_tokens_per_item = 2;
    int background_tokens_jitter = 0;  // adds uniform extra background length per item
    int background_vocab = 5;
    // Graded vocabulary: token rank r is drawn with frequency proportional to
    // 1/(r+1)^skew and agrees with the item's signal polarity with probability
    // interpolated from reliability_min (rank 0) up to reliability_max (the
    // last rank). Empty reliability vectors mean every token is fully
    // reliable, which keeps classifier accuracy step-like in the label count;
    // spreading reliabilities puts items on a spectrum from clear-cut to
    // ambiguous, the texture of natural text where some phrasings hint and
    // others decide.
    double signal_token_skew = 0.0;
    std::vector<double> signal_reliability_min;  // per predicate; empty = 1.0
    std::vector<double> signal_reliability_max;
    std::uint64_t seed = 1;

    void validate() const;  // throws ConfigInvalid
};

Dataset synthesize_dataset(const SynthesisSpec& spec);

}  // namespace ahc
