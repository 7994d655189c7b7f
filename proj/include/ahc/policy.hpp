#pragma once

#include "ahc/core.hpp"
#include "ahc/rng.hpp"

#include <span>

namespace ahc {

enum class PolicyKind { Baseline, FixedSwitch, Stochastic, Adaptive, Exp3 };

struct PolicyConfig {
    PolicyKind kind = PolicyKind::FixedSwitch;
    Arm baseline_arm = Arm::Exploit;
    double learn_fraction = 0.2;  // budget share spent learning before the switch
    double p_learn = 0.5;         // stochastic policy
    double epsilon = 0.02;        // adaptive trend threshold
    int warmup_labels = 500;
    int window = 3;               // moving-average width for the trend
    bool soft_adaptive = false;   // map the trend to a probability instead of latching
    double steepness = 200.0;     // logistic steepness for soft mode
    double gamma_x = 0.1;         // Exp3 exploration rate
    bool importance_weighting = false;  // divide Exp3 rewards by the chosen arm's probability

    void validate() const;  // throws ConfigInvalid
};

struct TrendResult {
    double delta = 0.0;
    bool insufficient = false;  // fewer than two points: keep learning
};

// Relative step of the moving average: (avg_t - avg_{t-1}) / max(avg_{t-1}, 1e-9),
// averaging over min(window, points available).
TrendResult accuracy_trend(std::span<const double> history, int window);

// P_l = 1 / (1 + exp(-steepness * (delta - epsilon))).
double trend_to_probability(double delta, double epsilon, double steepness);

// P(learn) = (1 - gamma_x) * w_l / (w_l + w_e) + gamma_x / 2.
double exp3_probability(double w_learn, double w_exploit, double gamma_x);

// Chosen arm only: w * exp(0.5 * gamma_x * reward).
double exp3_update_weight(double w, double reward, double gamma_x);

struct RewardEstimate {
    double value = 0.0;  // clipped to [0,1]
    double cost_before = 0.0;
    double cost_after = 0.0;
    int votes_spent = 0;
};

// Per-vote reduction in expected remaining cost, clipped into [0,1].
RewardEstimate estimate_reward(double cost_before, double cost_after, int votes_spent);

class PolicyState {
public:
    explicit PolicyState(const PolicyConfig& cfg);

    Arm choose_arm(const IterationContext& ctx, Rng& rng);

    // Feeds Exp3; the other policies ignore rewards.
    void observe_reward(Arm arm, const RewardEstimate& reward);

    bool switched() const { return switched_; }
    double weight_learn() const { return w_learn_; }
    double weight_exploit() const { return w_exploit_; }

private:
    PolicyConfig cfg_;
    bool switched_ = false;        // adaptive hard switch, latched
    double w_learn_ = 1.0;
    double w_exploit_ = 1.0;
    double last_p_chosen_ = 1.0;   // probability of the most recent Exp3 choice
};

}  // namespace ahc
