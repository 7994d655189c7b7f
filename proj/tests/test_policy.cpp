#include "doctest.h"

#include "ahc/policy.hpp"

#include <cmath>
#include <vector>

using namespace ahc;

namespace {

IterationContext ctx_with(int spent, int budget, int labels = 0,
                          const std::vector<double>* history = nullptr) {
    IterationContext ctx;
    ctx.t = 1;
    ctx.spent = spent;
    ctx.budget = budget;
    ctx.labels_collected = labels;
    ctx.fbeta_history = history;
    return ctx;
}

PolicyConfig config_of(PolicyKind kind) {
    PolicyConfig cfg;
    cfg.kind = kind;
    return cfg;
}

}  // namespace

TEST_CASE("policy config validation rejects out-of-range knobs") {
    PolicyConfig cfg;
    cfg.learn_fraction = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigInvalid);
    cfg = PolicyConfig{};
    cfg.p_learn = -0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigInvalid);
    cfg = PolicyConfig{};
    cfg.gamma_x = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigInvalid);
    cfg = PolicyConfig{};
    cfg.window = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigInvalid);
    CHECK_NOTHROW(PolicyConfig{}.validate());
}

TEST_CASE("accuracy_trend computes the relative moving-average step") {
    const std::vector<double> two = {0.5, 0.6};
    const TrendResult t1 = accuracy_trend(two, 1);
    CHECK_FALSE(t1.insufficient);
    CHECK(t1.delta == doctest::Approx(0.2));

    const std::vector<double> flat = {0.4, 0.4, 0.4, 0.4};
    CHECK(accuracy_trend(flat, 3).delta == doctest::Approx(0.0));

    const std::vector<double> one = {0.9};
    CHECK(accuracy_trend(one, 3).insufficient);
    CHECK(accuracy_trend({}, 3).insufficient);

    // Window 2 over [0.2, 0.4, 0.6]: avg(0.4,0.6) vs avg(0.2,0.4).
    const std::vector<double> ramp = {0.2, 0.4, 0.6};
    CHECK(accuracy_trend(ramp, 2).delta == doctest::Approx((0.5 - 0.3) / 0.3));
}

TEST_CASE("trend_to_probability is a logistic centered at epsilon") {
    CHECK(trend_to_probability(0.02, 0.02, 200.0) == doctest::Approx(0.5));
    CHECK(trend_to_probability(0.02 + std::log(9.0) / 200.0, 0.02, 200.0) ==
          doctest::Approx(0.9));
    CHECK(trend_to_probability(1.0, 0.02, 200.0) > 0.999);
    CHECK(trend_to_probability(-1.0, 0.02, 200.0) < 0.001);
    CHECK_THROWS_AS(trend_to_probability(0.0, 0.02, 0.0), std::invalid_argument);
}

TEST_CASE("exp3_probability evaluates the mixing formula") {
    CHECK(exp3_probability(1.0, 1.0, 0.2) == doctest::Approx(0.5));
    CHECK(exp3_probability(3.0, 1.0, 0.1) == 0.725);  // exact in double arithmetic
    CHECK(exp3_probability(7.0, 3.0, 1.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(exp3_probability(0.0, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(exp3_probability(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("exp3 probabilities stay inside the exploration floor and complement") {
    Rng rng(2024);
    for (int trial = 0; trial < 10000; ++trial) {
        const double wl = std::exp(rng.uniform(-20.0, 20.0));
        const double we = std::exp(rng.uniform(-20.0, 20.0));
        const double gamma = rng.uniform(0.01, 1.0);
        const double p = exp3_probability(wl, we, gamma);
        CHECK(p >= 0.5 * gamma - 1e-12);
        CHECK(p <= 1.0 - 0.5 * gamma + 1e-12);
        CHECK(p + exp3_probability(we, wl, gamma) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("exp3_update_weight exponentiates the chosen arm only") {
    CHECK(exp3_update_weight(1.7, 0.0, 0.1) == doctest::Approx(1.7));
    CHECK(exp3_update_weight(1.0, 1.0, 0.1) == doctest::Approx(std::exp(0.05)).epsilon(1e-12));
    CHECK(exp3_update_weight(2.0, 0.5, 0.5) ==
          doctest::Approx(2.0 * std::exp(0.125)).epsilon(1e-12));
    CHECK(exp3_update_weight(1e-300, 1.0, 1.0) > 0.0);
    CHECK_THROWS_AS(exp3_update_weight(0.0, 1.0, 0.1), std::invalid_argument);
}

TEST_CASE("estimate_reward clips the per-vote cost reduction into [0,1]") {
    CHECK(estimate_reward(100.0, 100.0, 10).value == doctest::Approx(0.0));
    CHECK(estimate_reward(100.0, 80.0, 10).value == doctest::Approx(1.0));
    CHECK(estimate_reward(100.0, 95.0, 10).value == doctest::Approx(0.5));
    CHECK(estimate_reward(100.0, 120.0, 10).value == doctest::Approx(0.0));
    CHECK(estimate_reward(3.0, 1.0, 0).value == doctest::Approx(1.0));  // guard divisor
    const RewardEstimate r = estimate_reward(7.0, 6.0, 2);
    CHECK(r.cost_before == 7.0);
    CHECK(r.cost_after == 6.0);
    CHECK(r.votes_spent == 2);
}

TEST_CASE("baseline policies never change arm") {
    PolicyConfig cfg = config_of(PolicyKind::Baseline);
    cfg.baseline_arm = Arm::Learn;
    PolicyState learn(cfg);
    cfg.baseline_arm = Arm::Exploit;
    PolicyState exploit(cfg);
    Rng rng(1);
    for (int spent : {0, 50, 99}) {
        CHECK(learn.choose_arm(ctx_with(spent, 100), rng) == Arm::Learn);
        CHECK(exploit.choose_arm(ctx_with(spent, 100), rng) == Arm::Exploit);
    }
}

TEST_CASE("fixed switch learns strictly below the budget fraction") {
    PolicyConfig cfg = config_of(PolicyKind::FixedSwitch);
    cfg.learn_fraction = 0.3;
    PolicyState policy(cfg);
    Rng rng(1);
    CHECK(policy.choose_arm(ctx_with(10, 100), rng) == Arm::Learn);
    CHECK(policy.choose_arm(ctx_with(29, 100), rng) == Arm::Learn);
    CHECK(policy.choose_arm(ctx_with(30, 100), rng) == Arm::Exploit);
    CHECK(policy.choose_arm(ctx_with(50, 100), rng) == Arm::Exploit);

    cfg.learn_fraction = 0.0;
    PolicyState zero(cfg);
    CHECK(zero.choose_arm(ctx_with(0, 100), rng) == Arm::Exploit);

    cfg.learn_fraction = 1.0;
    PolicyState full(cfg);
    CHECK(full.choose_arm(ctx_with(99, 100), rng) == Arm::Learn);
}

TEST_CASE("stochastic policy follows its learn probability") {
    PolicyConfig cfg = config_of(PolicyKind::Stochastic);
    cfg.p_learn = 1.0;
    PolicyState always(cfg);
    cfg.p_learn = 0.0;
    PolicyState never(cfg);
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        CHECK(always.choose_arm(ctx_with(0, 100), rng) == Arm::Learn);
        CHECK(never.choose_arm(ctx_with(0, 100), rng) == Arm::Exploit);
    }
}

TEST_CASE("adaptive hard switch latches once the trend stalls after warmup") {
    PolicyConfig cfg = config_of(PolicyKind::Adaptive);
    cfg.warmup_labels = 500;
    cfg.epsilon = 0.02;
    cfg.window = 3;
    PolicyState policy(cfg);
    Rng rng(1);

    // No history yet: learn.
    CHECK(policy.choose_arm(ctx_with(0, 1000), rng) == Arm::Learn);

    // Improving trend with labels below warmup: learn.
    const std::vector<double> improving = {0.50, 0.505};  // delta 0.5% < epsilon
    CHECK(policy.choose_arm(ctx_with(0, 1000, 499, &improving), rng) == Arm::Learn);
    CHECK_FALSE(policy.switched());

    // Warm and stalled: switch and stay switched whatever comes next.
    CHECK(policy.choose_arm(ctx_with(0, 1000, 500, &improving), rng) == Arm::Exploit);
    CHECK(policy.switched());
    const std::vector<double> surging = {0.5, 0.9};
    CHECK(policy.choose_arm(ctx_with(0, 1000, 900, &surging), rng) == Arm::Exploit);

    // A strong trend keeps an unswitched policy learning.
    PolicyState fresh(cfg);
    CHECK(fresh.choose_arm(ctx_with(0, 1000, 800, &surging), rng) == Arm::Learn);
    CHECK_FALSE(fresh.switched());
}

TEST_CASE("soft adaptive samples from the logistic trend mapping") {
    PolicyConfig cfg = config_of(PolicyKind::Adaptive);
    cfg.soft_adaptive = true;
    cfg.warmup_labels = 0;
    cfg.steepness = 200.0;
    PolicyState policy(cfg);
    Rng rng(11);
    const std::vector<double> surging = {0.2, 0.8};  // delta 3.0, P(learn) ~ 1
    for (int i = 0; i < 10; ++i) {
        CHECK(policy.choose_arm(ctx_with(0, 100, 10, &surging), rng) == Arm::Learn);
    }
    const std::vector<double> collapsing = {0.8, 0.2};
    for (int i = 0; i < 10; ++i) {
        CHECK(policy.choose_arm(ctx_with(0, 100, 10, &collapsing), rng) == Arm::Exploit);
    }
    CHECK_FALSE(policy.switched());  // soft mode never latches
}

TEST_CASE("exp3 choices are seed-deterministic and rewards move one weight") {
    PolicyConfig cfg = config_of(PolicyKind::Exp3);
    cfg.gamma_x = 0.2;
    PolicyState a(cfg), b(cfg);
    Rng rng_a(42), rng_b(42);
    for (int i = 0; i < 30; ++i) {
        CHECK(a.choose_arm(ctx_with(i, 100), rng_a) == b.choose_arm(ctx_with(i, 100), rng_b));
    }

    PolicyState policy(cfg);
    RewardEstimate reward;
    reward.value = 1.0;
    policy.observe_reward(Arm::Learn, reward);
    CHECK(policy.weight_learn() == doctest::Approx(std::exp(0.1)).epsilon(1e-12));
    CHECK(policy.weight_exploit() == doctest::Approx(1.0));
    policy.observe_reward(Arm::Exploit, reward);
    CHECK(policy.weight_exploit() == doctest::Approx(std::exp(0.1)).epsilon(1e-12));

    // The other policies ignore rewards entirely.
    PolicyState fixed(config_of(PolicyKind::FixedSwitch));
    fixed.observe_reward(Arm::Learn, reward);
    CHECK(fixed.weight_learn() == doctest::Approx(1.0));
}

TEST_CASE("exp3 importance weighting divides the reward by the chosen probability") {
    PolicyConfig cfg = config_of(PolicyKind::Exp3);
    cfg.gamma_x = 0.2;
    cfg.importance_weighting = true;
    PolicyState policy(cfg);
    Rng rng(3);
    const Arm arm = policy.choose_arm(ctx_with(0, 100), rng);  // even weights: p = 0.5
    RewardEstimate reward;
    reward.value = 0.5;
    policy.observe_reward(arm, reward);
    const double moved = arm == Arm::Learn ? policy.weight_learn() : policy.weight_exploit();
    CHECK(moved == doctest::Approx(std::exp(0.1 * 0.5 / 0.5)).epsilon(1e-12));
}
