#pragma once

#include "ahc/engine.hpp"
#include "ahc/synth.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ahc {

struct ScenarioSpec {
    std::string name;
    SynthesisSpec synth;                 // seed is overridden per experiment seed
    std::vector<double> crowd_accuracy;  // per predicate; empty draws from accuracy_range
    std::pair<double, double> accuracy_range = {0.6, 1.0};
};

std::vector<ScenarioSpec> builtin_scenarios();
ScenarioSpec scenario_by_name(const std::string& name);  // throws ConfigInvalid

// Dataset for a scenario seed slot; identical across grid cells so policies
// are compared on the same pools.
Dataset scenario_dataset(const ScenarioSpec& scenario, int seed_index);
// Per-predicate crowd accuracies for a seed slot (draws when unspecified).
std::vector<double> scenario_accuracies(const ScenarioSpec& scenario, int seed_index);

struct GridCell {
    std::string scenario;
    std::string policy;       // row label, e.g. fixed_switch, crowd_only, adaptive
    double param = 0.0;       // policy parameter (learn fraction, p_learn, gamma_x)
    double budget_per_item = 5.0;
    double crowd_acc = 0.0;   // > 0 overrides every predicate's accuracy
    RunConfig base;
};

// Fully configured cell for one of the named policies. param means: learn
// fraction (fixed_switch), p_learn (stochastic), gamma_x (exp3); ignored for
// baseline_learn/baseline_exploit/crowd_only/adaptive.
GridCell make_cell(const std::string& scenario, const std::string& policy, double param,
                   double budget_per_item, double crowd_acc = 0.0);

struct ExperimentGrid {
    std::vector<GridCell> cells;
    int seeds = 10;
    std::uint64_t seed_base = 1;
};

// Cells for fixed_switch over the given fractions plus a crowd_only row.
ExperimentGrid fraction_grid(const std::string& scenario, const std::vector<double>& fractions,
                             double budget_per_item, int seeds);
// fixed_switch at one fraction across budgets, paired with crowd_only rows.
ExperimentGrid budget_grid(const std::string& scenario, const std::vector<double>& budgets,
                           double fraction, int seeds);
// fixed_switch and crowd_only across forced crowd accuracies.
ExperimentGrid accuracy_grid(const std::string& scenario, const std::vector<double>& accuracies,
                             double fraction, double budget_per_item, int seeds);

struct ResultRow {
    std::string scenario;
    std::string policy;
    double param = 0.0;
    double budget_per_item = 0.0;
    double crowd_acc = 0.0;
    int seed_count = 0;
    double cost_mean = 0.0, cost_std = 0.0;
    double f1_mean = 0.0, f1_std = 0.0;
    double f3_mean = 0.0, f3_std = 0.0;
    double precision_mean = 0.0, recall_mean = 0.0;
    bool failed = false;      // not serialized; failed rows are skipped on emit
    std::string error;
};

// One run of a cell's seed slot.
RunResult run_cell_seed(const GridCell& cell, int seed_index, std::uint64_t seed_base);
ResultRow run_cell(const GridCell& cell, int seeds, std::uint64_t seed_base);
// Runs every cell; a failing cell yields a row with failed set instead of
// aborting the grid.
std::vector<ResultRow> run_experiment(const ExperimentGrid& grid);

void emit_results_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> parse_results_csv(const std::string& path);

// Plot-data JSON with three curve families: cost vs F3 across policy params,
// F3 vs budget, and F3 vs crowd accuracy.
void emit_plot_json(const std::vector<ResultRow>& rows, const std::string& path);

}  // namespace ahc
