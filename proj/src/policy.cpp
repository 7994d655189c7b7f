#include "ahc/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ahc {

void PolicyConfig::validate() const {
    if (learn_fraction < 0.0 || learn_fraction > 1.0) {
        throw ConfigInvalid("policy.learn_fraction must be in [0,1]");
    }
    if (p_learn < 0.0 || p_learn > 1.0) throw ConfigInvalid("policy.p_learn must be in [0,1]");
    if (warmup_labels < 0) throw ConfigInvalid("policy.warmup_labels must be non-negative");
    if (window < 1) throw ConfigInvalid("policy.window must be at least 1");
    if (steepness <= 0.0) throw ConfigInvalid("policy.steepness must be positive");
    if (gamma_x <= 0.0 || gamma_x > 1.0) throw ConfigInvalid("policy.gamma_x must be in (0,1]");
}

TrendResult accuracy_trend(std::span<const double> history, int window) {
    const int m = static_cast<int>(history.size());
    if (m < 2) return {0.0, true};
    auto avg_ending_at = [&](int end) {  // exclusive end
        const int w = std::min(window, end);
        double s = 0.0;
        for (int i = end - w; i < end; ++i) s += history[static_cast<std::size_t>(i)];
        return s / w;
    };
    const double cur = avg_ending_at(m);
    const double prev = avg_ending_at(m - 1);
    return {(cur - prev) / std::max(prev, 1e-9), false};
}

double trend_to_probability(double delta, double epsilon, double steepness) {
    if (steepness <= 0.0) throw std::invalid_argument("steepness must be positive");
    return 1.0 / (1.0 + std::exp(-steepness * (delta - epsilon)));
}

double exp3_probability(double w_learn, double w_exploit, double gamma_x) {
    if (w_learn <= 0.0 || w_exploit <= 0.0) {
        throw std::invalid_argument("Exp3 weights must be positive");
    }
    if (gamma_x <= 0.0 || gamma_x > 1.0) throw std::invalid_argument("gamma_x must be in (0,1]");
    // Interpolation form of (1-g) * frac + g/2; the clamp only absorbs float
    // rounding so the exploration floor and cap hold as closed bounds.
    const double frac = w_learn / (w_learn + w_exploit);
    const double p = frac + gamma_x * (0.5 - frac);
    return std::clamp(p, 0.5 * gamma_x, 1.0 - 0.5 * gamma_x);
}

double exp3_update_weight(double w, double reward, double gamma_x) {
    if (w <= 0.0) throw std::invalid_argument("Exp3 weight must be positive");
    if (reward < 0.0) throw std::invalid_argument("Exp3 reward must be non-negative");
    return w * std::exp(0.5 * gamma_x * reward);
}

RewardEstimate estimate_reward(double cost_before, double cost_after, int votes_spent) {
    RewardEstimate r;
    r.cost_before = cost_before;
    r.cost_after = cost_after;
    r.votes_spent = votes_spent;
    r.value = std::clamp((cost_before - cost_after) / std::max(votes_spent, 1), 0.0, 1.0);
    return r;
}

PolicyState::PolicyState(const PolicyConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
}

Arm PolicyState::choose_arm(const IterationContext& ctx, Rng& rng) {
    switch (cfg_.kind) {
        case PolicyKind::Baseline:
            return cfg_.baseline_arm;
        case PolicyKind::FixedSwitch:
            return ctx.spent < cfg_.learn_fraction * ctx.budget ? Arm::Learn : Arm::Exploit;
        case PolicyKind::Stochastic:
            return rng.bernoulli(cfg_.p_learn) ? Arm::Learn : Arm::Exploit;
        case PolicyKind::Adaptive: {
            if (switched_) return Arm::Exploit;
            TrendResult trend{0.0, true};
            if (ctx.fbeta_history) trend = accuracy_trend(*ctx.fbeta_history, cfg_.window);
            const bool warm = ctx.labels_collected >= cfg_.warmup_labels;
            if (!cfg_.soft_adaptive) {
                if (warm && !trend.insufficient && trend.delta < cfg_.epsilon) {
                    switched_ = true;
                    return Arm::Exploit;
                }
                return Arm::Learn;
            }
            if (!warm || trend.insufficient) return Arm::Learn;
            const double p = trend_to_probability(trend.delta, cfg_.epsilon, cfg_.steepness);
            return rng.bernoulli(p) ? Arm::Learn : Arm::Exploit;
        }
        case PolicyKind::Exp3: {
            const double p = exp3_probability(w_learn_, w_exploit_, cfg_.gamma_x);
            const bool learn = rng.bernoulli(p);
            last_p_chosen_ = learn ? p : 1.0 - p;
            return learn ? Arm::Learn : Arm::Exploit;
        }
    }
    return Arm::Exploit;
}

void PolicyState::observe_reward(Arm arm, const RewardEstimate& reward) {
    if (cfg_.kind != PolicyKind::Exp3) return;
    double x = reward.value;
    if (cfg_.importance_weighting) x /= std::max(last_p_chosen_, 1e-12);
    double& w = arm == Arm::Learn ? w_learn_ : w_exploit_;
    w = exp3_update_weight(w, x, cfg_.gamma_x);
}

}  // namespace ahc
