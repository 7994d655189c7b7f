#include "ahc/config.hpp"
#include "ahc/dataset_io.hpp"
#include "ahc/experiment.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path ensure_out_dir(const std::string& out) {
    fs::path dir(out.empty() ? "." : out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ahc::IoError("cannot create output directory " + dir.string());
    return dir;
}

json metrics_to_json(const ahc::MetricBundle& m) {
    json out;
    out["precision"] = m.precision;
    out["recall"] = m.recall;
    for (std::size_t i = 0; i < m.betas.size(); ++i) {
        out["fbeta"][std::to_string(m.betas[i])] = m.fbeta[i];
    }
    out["tp"] = m.tp;
    out["fp"] = m.fp;
    out["fn"] = m.fn;
    out["tn"] = m.tn;
    return out;
}

int cmd_run(const std::string& config_path, const std::string& out, std::int64_t seed,
            int budget, const std::string& policy) {
    ahc::RunSetup setup = ahc::load_run_setup(config_path);
    if (seed >= 0) setup.config.seed = static_cast<std::uint64_t>(seed);
    if (budget >= 0) setup.config.budget = budget;
    if (!policy.empty()) setup.config.policy.kind = ahc::policy_kind_from_string(policy);
    setup.config.validate();

    const ahc::RunResult result = ahc::run(setup.dataset, setup.config);

    const fs::path dir = ensure_out_dir(out);
    ahc::save_decisions_csv(result.decisions, (dir / "decisions.csv").string());

    json summary;
    summary["spent"] = result.spent;
    summary["cost_per_item"] = result.cost_per_item;
    summary["iterations"] = result.iterations;
    summary["finalized_by_ml"] = result.finalized_by_ml;
    summary["policy"] = ahc::to_string(setup.config.policy.kind);
    summary["seed"] = setup.config.seed;
    summary["metrics"] = metrics_to_json(result.metrics);
    std::ofstream sf(dir / "summary.json");
    if (!sf) throw ahc::IoError("cannot write summary.json");
    sf << summary.dump(2) << '\n';

    std::cout << summary.dump(2) << '\n';
    return 0;
}

int cmd_experiment(const std::string& scenario, const std::string& axis, int seeds,
                   double budget_per_item, double fraction, std::uint64_t seed_base,
                   const std::string& out) {
    ahc::ExperimentGrid grid;
    if (axis == "fraction") {
        std::vector<double> fractions;
        for (int i = 1; i <= 10; ++i) fractions.push_back(0.1 * i);
        grid = ahc::fraction_grid(scenario, fractions, budget_per_item, seeds);
    } else if (axis == "budget") {
        std::vector<double> budgets;
        for (int b = 1; b <= 10; ++b) budgets.push_back(static_cast<double>(b));
        grid = ahc::budget_grid(scenario, budgets, fraction, seeds);
    } else if (axis == "accuracy") {
        grid = ahc::accuracy_grid(scenario, {0.6, 0.7, 0.8, 0.9, 1.0}, fraction,
                                  budget_per_item, seeds);
    } else {
        throw ahc::ConfigInvalid("unknown axis '" + axis +
                                 "'; expected fraction, budget, or accuracy");
    }
    grid.seed_base = seed_base;

    const std::vector<ahc::ResultRow> rows = ahc::run_experiment(grid);
    const fs::path dir = ensure_out_dir(out);
    ahc::emit_results_csv(rows, (dir / "results.csv").string());
    ahc::emit_plot_json(rows, (dir / "plots.json").string());

    int failed = 0;
    for (const ahc::ResultRow& r : rows) {
        if (r.failed) {
            ++failed;
            std::cerr << "cell failed: " << r.scenario << '/' << r.policy << " param=" << r.param
                      << ": " << r.error << '\n';
        }
    }
    std::cout << "wrote " << (rows.size() - static_cast<std::size_t>(failed)) << " rows to "
              << (dir / "results.csv").string() << '\n';
    return 0;
}

int cmd_synth(const std::string& scenario, int seed_index, const std::string& out) {
    const ahc::ScenarioSpec spec = ahc::scenario_by_name(scenario);
    const ahc::Dataset data = ahc::scenario_dataset(spec, seed_index);
    ahc::save_dataset_csv(data, out);
    std::cout << "wrote " << data.items.size() << " items to " << out << '\n';
    return 0;
}

int cmd_metrics(const std::string& decisions_path, const std::string& dataset_path,
                const std::vector<double>& betas) {
    const ahc::Dataset data = ahc::load_dataset_csv(dataset_path);
    const std::vector<ahc::Decision> decisions = ahc::load_decisions_csv(decisions_path);
    const ahc::MetricBundle m = ahc::compute_metrics(decisions, data, betas);
    std::cout << metrics_to_json(m).dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active hybrid classification over a text pool"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", policy_override;
    std::int64_t seed_override = -1;
    int budget_override = -1;
    CLI::App* run = app.add_subcommand("run", "Run a single screening session from a config");
    run->add_option("--config", config_path, "JSON run config")->required();
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--seed", seed_override, "Override config seed");
    run->add_option("--budget", budget_override, "Override vote budget");
    run->add_option("--policy", policy_override, "Override policy kind");

    std::string exp_scenario = "amazon-like", exp_axis = "fraction", exp_out = ".";
    int exp_seeds = 10;
    double exp_bpi = 5.0, exp_fraction = 0.2;
    std::uint64_t exp_seed_base = 1;
    CLI::App* experiment = app.add_subcommand("experiment", "Run a multi-seed grid");
    experiment->add_option("--scenario", exp_scenario, "Scenario name");
    experiment->add_option("--axis", exp_axis, "Sweep axis: fraction, budget, accuracy");
    experiment->add_option("--seeds", exp_seeds, "Seeds per cell");
    experiment->add_option("--budget-per-item", exp_bpi, "Votes per item");
    experiment->add_option("--fraction", exp_fraction, "Learn fraction for budget/accuracy axes");
    experiment->add_option("--seed-base", exp_seed_base, "Base run seed");
    experiment->add_option("--out", exp_out, "Output directory");

    std::string synth_scenario = "amazon-like", synth_out = "dataset.csv";
    int synth_seed_index = 0;
    CLI::App* synth = app.add_subcommand("synth", "Emit a synthetic dataset CSV");
    synth->add_option("--scenario", synth_scenario, "Scenario name");
    synth->add_option("--seed-index", synth_seed_index, "Dataset seed index");
    synth->add_option("--out", synth_out, "Output CSV path");

    std::string metrics_decisions, metrics_dataset;
    std::vector<double> metrics_betas = {1.0, 3.0};
    CLI::App* metrics = app.add_subcommand("metrics", "Score a decisions CSV against gold");
    metrics->add_option("--decisions", metrics_decisions, "Decisions CSV")->required();
    metrics->add_option("--dataset", metrics_dataset, "Dataset CSV with gold columns")->required();
    metrics->add_option("--betas", metrics_betas, "F-beta values to report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) {
            return cmd_run(config_path, out_dir, seed_override, budget_override, policy_override);
        }
        if (experiment->parsed()) {
            return cmd_experiment(exp_scenario, exp_axis, exp_seeds, exp_bpi, exp_fraction,
                                  exp_seed_base, exp_out);
        }
        if (synth->parsed()) {
            return cmd_synth(synth_scenario, synth_seed_index, synth_out);
        }
        if (metrics->parsed()) {
            return cmd_metrics(metrics_decisions, metrics_dataset, metrics_betas);
        }
    } catch (const ahc::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return 2;
    } catch (const ahc::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const ahc::ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
