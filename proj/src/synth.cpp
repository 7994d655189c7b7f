#include "ahc/synth.hpp"

#include "ahc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ahc {

void SynthesisSpec::validate() const {
    if (pool_size < 0) throw ConfigInvalid("synth.pool_size must be non-negative");
    if (selectivity.empty()) throw ConfigInvalid("synth.selectivity must list each predicate");
    for (double t : selectivity) {
        if (t <= 0.0 || t >= 1.0) throw ConfigInvalid("synth.selectivity values must be in (0,1)");
    }
    if (noise.size() != selectivity.size()) {
        throw ConfigInvalid("synth.noise must match synth.selectivity in length");
    }
    for (double q : noise) {
        if (q < 0.0 || q >= 0.5) throw ConfigInvalid("synth.noise values must be in [0, 0.5)");
    }
    if (signal_tokens_per_predicate < 1 || signal_vocab_per_predicate < 1) {
        throw ConfigInvalid("synth signal token counts must be at least 1");
    }
    if (background_tokens_per_item < 0 || background_vocab < 1) {
        throw ConfigInvalid("synth background token counts invalid");
    }
    if (background_tokens_jitter < 0) {
        throw ConfigInvalid("synth.background_tokens_jitter must be non-negative");
    }
    if (signal_token_skew < 0.0) {
        throw ConfigInvalid("synth.signal_token_skew must be non-negative");
    }
    if (signal_reliability_min.size() != signal_reliability_max.size()) {
        throw ConfigInvalid("synth signal reliability bounds must pair up");
    }
    if (!signal_reliability_min.empty() &&
        signal_reliability_min.size() != selectivity.size()) {
        throw ConfigInvalid("synth signal reliabilities must match the predicate count");
    }
    for (std::size_t p = 0; p < signal_reliability_min.size(); ++p) {
        const double lo = signal_reliability_min[p];
        const double hi = signal_reliability_max[p];
        if (lo < 0.5 || lo > 1.0 || hi < 0.5 || hi > 1.0) {
            throw ConfigInvalid("synth signal reliabilities must be in [0.5, 1]");
        }
        if (lo > hi) {
            throw ConfigInvalid("synth.signal_reliability_min must not exceed the max");
        }
    }
}

Dataset synthesize_dataset(const SynthesisSpec& spec) {
    spec.validate();
    const int n_preds = static_cast<int>(spec.selectivity.size());
    Dataset data;
    data.predicates.reserve(static_cast<std::size_t>(n_preds));
    for (int p = 0; p < n_preds; ++p) {
        Predicate pred;
        pred.id = p + 1;
        pred.description = "p" + std::to_string(p + 1);
        pred.selectivity_estimate = spec.selectivity[static_cast<std::size_t>(p)];
        data.predicates.push_back(pred);
    }

    Rng rng(spec.seed);

    // Graded draws cost extra rng pulls, so gate them per predicate to keep
    // the token stream of plain configs reproducible across versions.
    auto reliability_spread = [&spec](int p) {
        return !spec.signal_reliability_min.empty() &&
               (spec.signal_reliability_min[static_cast<std::size_t>(p)] < 1.0 ||
                spec.signal_reliability_max[static_cast<std::size_t>(p)] < 1.0);
    };
    bool any_graded = spec.signal_token_skew > 0.0;
    for (int p = 0; p < n_preds && !any_graded; ++p) any_graded = reliability_spread(p);

    const int vocab = spec.signal_vocab_per_predicate;
    std::vector<double> rank_cdf;
    if (any_graded) {
        rank_cdf.reserve(static_cast<std::size_t>(vocab));
        double total = 0.0;
        for (int r = 0; r < vocab; ++r) {
            total += 1.0 / std::pow(static_cast<double>(r + 1), spec.signal_token_skew);
            rank_cdf.push_back(total);
        }
    }
    auto draw_rank = [&rng, &rank_cdf, vocab]() {
        const double u = rng.unit() * rank_cdf.back();
        const auto it = std::upper_bound(rank_cdf.begin(), rank_cdf.end(), u);
        return std::min(static_cast<int>(it - rank_cdf.begin()), vocab - 1);
    };
    auto reliability = [&spec, vocab](int p, int rank) {
        const double lo = spec.signal_reliability_min[static_cast<std::size_t>(p)];
        const double hi = spec.signal_reliability_max[static_cast<std::size_t>(p)];
        if (vocab == 1) return hi;
        const double t = static_cast<double>(rank) / static_cast<double>(vocab - 1);
        return lo + (hi - lo) * t;
    };

    data.items.reserve(static_cast<std::size_t>(spec.pool_size));
    data.gold.reserve(static_cast<std::size_t>(spec.pool_size));
    for (int i = 0; i < spec.pool_size; ++i) {
        Item item;
        item.id = i + 1;
        std::vector<int> gold_row(static_cast<std::size_t>(n_preds));
        for (int p = 0; p < n_preds; ++p) {
            const bool gold = rng.bernoulli(spec.selectivity[static_cast<std::size_t>(p)]);
            const bool flip = rng.bernoulli(spec.noise[static_cast<std::size_t>(p)]);
            gold_row[static_cast<std::size_t>(p)] = gold ? 1 : 0;
            const bool positive_text = gold != flip;
            const bool graded = any_graded && reliability_spread(p);
            for (int k = 0; k < spec.signal_tokens_per_predicate; ++k) {
                const int rank = any_graded ? draw_rank() : rng.below(vocab);
                const bool match = !graded || rng.bernoulli(reliability(p, rank));
                const std::string stem =
                    "p" + std::to_string(p + 1) + (positive_text == match ? "pos" : "neg");
                item.tokens.push_back(stem + std::to_string(rank));
            }
        }
        int bg_count = spec.background_tokens_per_item;
        if (spec.background_tokens_jitter > 0) {
            bg_count += rng.below(spec.background_tokens_jitter + 1);
        }
        for (int k = 0; k < bg_count; ++k) {
            item.tokens.push_back("bg" + std::to_string(rng.below(spec.background_vocab)));
        }
        for (std::size_t k = 0; k < item.tokens.size(); ++k) {
            if (k > 0) item.text.push_back(' ');
            item.text += item.tokens[k];
        }
        data.items.push_back(std::move(item));
        data.gold.push_back(std::move(gold_row));
    }
    data.rebuild_index();
    return data;
}

}  // namespace ahc
