#include "ahc/experiment.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string_view>
#include <tuple>

namespace ahc {

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

std::vector<ScenarioSpec> builtin_scenarios() {
    std::vector<ScenarioSpec> out;

    ScenarioSpec amazon;
    amazon.name = "amazon-like";
    amazon.synth.pool_size = 5000;
    amazon.synth.selectivity = {0.61, 0.10};
    amazon.synth.noise = {0.05, 0.05};
    amazon.crowd_accuracy = {0.94, 0.94};
    out.push_back(amazon);

    ScenarioSpec med;
    med.name = "med-like";
    med.synth.pool_size = 5000;
    med.synth.selectivity = {0.18, 0.28};
    med.synth.noise = {0.10, 0.10};
    med.accuracy_range = {0.6, 1.0};  // drawn per seed
    out.push_back(med);

    ScenarioSpec slr;
    slr.name = "slr-like";
    slr.synth.pool_size = 825;
    slr.synth.selectivity = {0.58, 0.20};
    slr.synth.noise = {0.02, 0.02};
    slr.synth.background_tokens_jitter = 16;
    slr.crowd_accuracy = {0.8, 0.6};
    out.push_back(slr);

    return out;
}

ScenarioSpec scenario_by_name(const std::string& name) {
    for (ScenarioSpec& s : builtin_scenarios()) {
        if (s.name == name) return std::move(s);
    }
    throw ConfigInvalid("unknown scenario '" + name +
                        "'; expected amazon-like, med-like, or slr-like");
}

Dataset scenario_dataset(const ScenarioSpec& scenario, int seed_index) {
    SynthesisSpec spec = scenario.synth;
    spec.seed = mix_seed(fnv1a(scenario.name), static_cast<std::uint64_t>(seed_index));
    return synthesize_dataset(spec);
}

std::vector<double> scenario_accuracies(const ScenarioSpec& scenario, int seed_index) {
    if (!scenario.crowd_accuracy.empty()) return scenario.crowd_accuracy;
    Rng rng(mix_seed(mix_seed(fnv1a(scenario.name), 77), static_cast<std::uint64_t>(seed_index)));
    std::vector<double> out(scenario.synth.selectivity.size());
    for (double& a : out) {
        a = rng.uniform(scenario.accuracy_range.first, scenario.accuracy_range.second);
    }
    return out;
}

GridCell make_cell(const std::string& scenario, const std::string& policy, double param,
                   double budget_per_item, double crowd_acc) {
    GridCell cell;
    cell.scenario = scenario;
    cell.policy = policy;
    cell.param = param;
    cell.budget_per_item = budget_per_item;
    cell.crowd_acc = crowd_acc;
    cell.base.budget = -1;
    cell.base.budget_per_item = budget_per_item;

    PolicyConfig& pc = cell.base.policy;
    if (policy == "baseline_learn") {
        pc.kind = PolicyKind::Baseline;
        pc.baseline_arm = Arm::Learn;
    } else if (policy == "baseline_exploit") {
        pc.kind = PolicyKind::Baseline;
        pc.baseline_arm = Arm::Exploit;
    } else if (policy == "crowd_only") {
        pc.kind = PolicyKind::Baseline;
        pc.baseline_arm = Arm::Exploit;
        cell.base.ml.enabled = false;
    } else if (policy == "fixed_switch") {
        pc.kind = PolicyKind::FixedSwitch;
        pc.learn_fraction = param;
    } else if (policy == "stochastic") {
        pc.kind = PolicyKind::Stochastic;
        pc.p_learn = param;
    } else if (policy == "adaptive") {
        pc.kind = PolicyKind::Adaptive;
    } else if (policy == "adaptive_soft") {
        pc.kind = PolicyKind::Adaptive;
        pc.soft_adaptive = true;
    } else if (policy == "exp3") {
        pc.kind = PolicyKind::Exp3;
        if (param > 0.0) pc.gamma_x = param;
    } else {
        throw ConfigInvalid("unknown policy '" + policy + "'");
    }
    return cell;
}

ExperimentGrid fraction_grid(const std::string& scenario, const std::vector<double>& fractions,
                             double budget_per_item, int seeds) {
    ExperimentGrid grid;
    grid.seeds = seeds;
    for (double f : fractions) {
        grid.cells.push_back(make_cell(scenario, "fixed_switch", f, budget_per_item));
    }
    grid.cells.push_back(make_cell(scenario, "crowd_only", 0.0, budget_per_item));
    return grid;
}

ExperimentGrid budget_grid(const std::string& scenario, const std::vector<double>& budgets,
                           double fraction, int seeds) {
    ExperimentGrid grid;
    grid.seeds = seeds;
    for (double b : budgets) {
        grid.cells.push_back(make_cell(scenario, "fixed_switch", fraction, b));
        grid.cells.push_back(make_cell(scenario, "crowd_only", 0.0, b));
    }
    return grid;
}

ExperimentGrid accuracy_grid(const std::string& scenario, const std::vector<double>& accuracies,
                             double fraction, double budget_per_item, int seeds) {
    ExperimentGrid grid;
    grid.seeds = seeds;
    for (double a : accuracies) {
        grid.cells.push_back(make_cell(scenario, "fixed_switch", fraction, budget_per_item, a));
        grid.cells.push_back(make_cell(scenario, "crowd_only", 0.0, budget_per_item, a));
    }
    return grid;
}

RunResult run_cell_seed(const GridCell& cell, int seed_index, std::uint64_t seed_base) {
    const ScenarioSpec scenario = scenario_by_name(cell.scenario);
    const Dataset data = scenario_dataset(scenario, seed_index);
    RunConfig cfg = cell.base;
    cfg.seed = mix_seed(seed_base, static_cast<std::uint64_t>(seed_index));
    std::vector<double> accs;
    if (cell.crowd_acc > 0.0) {
        accs.assign(data.predicates.size(), cell.crowd_acc);
    } else {
        accs = scenario_accuracies(scenario, seed_index);
    }
    cfg.crowd.accuracy.clear();
    for (std::size_t p = 0; p < data.predicates.size(); ++p) {
        cfg.crowd.accuracy[data.predicates[p].id] = accs[p];
    }
    return run(data, cfg);
}

namespace {

struct Stats {
    double mean = 0.0;
    double std_dev = 0.0;
};

Stats stats_of(const std::vector<double>& xs) {
    Stats s;
    if (xs.empty()) return s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return s;
    double sq = 0.0;
    for (double x : xs) sq += (x - s.mean) * (x - s.mean);
    s.std_dev = std::sqrt(sq / (static_cast<double>(xs.size()) - 1.0));
    return s;
}

}  // namespace

ResultRow run_cell(const GridCell& cell, int seeds, std::uint64_t seed_base) {
    ResultRow row;
    row.scenario = cell.scenario;
    row.policy = cell.policy;
    row.param = cell.param;
    row.budget_per_item = cell.budget_per_item;
    row.crowd_acc = cell.crowd_acc;
    row.seed_count = seeds;
    std::vector<double> cost, f1, f3, precision, recall;
    for (int s = 0; s < seeds; ++s) {
        const RunResult r = run_cell_seed(cell, s, seed_base);
        cost.push_back(r.cost_per_item);
        f1.push_back(r.metrics.f(1.0));
        f3.push_back(r.metrics.f(3.0));
        precision.push_back(r.metrics.precision);
        recall.push_back(r.metrics.recall);
    }
    const Stats cs = stats_of(cost), f1s = stats_of(f1), f3s = stats_of(f3);
    row.cost_mean = cs.mean;
    row.cost_std = cs.std_dev;
    row.f1_mean = f1s.mean;
    row.f1_std = f1s.std_dev;
    row.f3_mean = f3s.mean;
    row.f3_std = f3s.std_dev;
    row.precision_mean = stats_of(precision).mean;
    row.recall_mean = stats_of(recall).mean;
    return row;
}

std::vector<ResultRow> run_experiment(const ExperimentGrid& grid) {
    if (grid.cells.empty()) throw ConfigInvalid("experiment grid has no cells");
    if (grid.seeds < 1) throw ConfigInvalid("experiment grid needs at least one seed");
    std::vector<ResultRow> rows;
    rows.reserve(grid.cells.size());
    for (const GridCell& cell : grid.cells) {
        try {
            rows.push_back(run_cell(cell, grid.seeds, grid.seed_base));
        } catch (const std::exception& e) {
            ResultRow row;
            row.scenario = cell.scenario;
            row.policy = cell.policy;
            row.param = cell.param;
            row.budget_per_item = cell.budget_per_item;
            row.crowd_acc = cell.crowd_acc;
            row.failed = true;
            row.error = e.what();
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

namespace {

constexpr const char* kResultsHeader =
    "scenario,policy,param,budget_per_item,crowd_acc,seed_count,cost_mean,cost_std,"
    "f1_mean,f1_std,f3_mean,f3_std,precision_mean,recall_mean";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const char* what, int line_no) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty()) {
        throw ParseError(std::string("bad ") + what + " '" + s + "'", line_no);
    }
    return v;
}

}  // namespace

void emit_results_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << kResultsHeader << '\n';
    for (const ResultRow& r : rows) {
        if (r.failed) continue;
        out << r.scenario << ',' << r.policy << ',' << fmt(r.param) << ','
            << fmt(r.budget_per_item) << ',' << fmt(r.crowd_acc) << ',' << r.seed_count << ','
            << fmt(r.cost_mean) << ',' << fmt(r.cost_std) << ',' << fmt(r.f1_mean) << ','
            << fmt(r.f1_std) << ',' << fmt(r.f3_mean) << ',' << fmt(r.f3_std) << ','
            << fmt(r.precision_mean) << ',' << fmt(r.recall_mean) << '\n';
    }
    if (!out) throw IoError("failed writing " + path);
}

std::vector<ResultRow> parse_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<ResultRow> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            if (line != kResultsHeader) throw ParseError("unexpected results header", line_no);
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                f.push_back(std::move(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        f.push_back(std::move(cur));
        if (f.size() != 14) throw ParseError("expected 14 fields", line_no);
        ResultRow r;
        r.scenario = f[0];
        r.policy = f[1];
        r.param = parse_double(f[2], "param", line_no);
        r.budget_per_item = parse_double(f[3], "budget_per_item", line_no);
        r.crowd_acc = parse_double(f[4], "crowd_acc", line_no);
        r.seed_count = static_cast<int>(parse_double(f[5], "seed_count", line_no));
        r.cost_mean = parse_double(f[6], "cost_mean", line_no);
        r.cost_std = parse_double(f[7], "cost_std", line_no);
        r.f1_mean = parse_double(f[8], "f1_mean", line_no);
        r.f1_std = parse_double(f[9], "f1_std", line_no);
        r.f3_mean = parse_double(f[10], "f3_mean", line_no);
        r.f3_std = parse_double(f[11], "f3_std", line_no);
        r.precision_mean = parse_double(f[12], "precision_mean", line_no);
        r.recall_mean = parse_double(f[13], "recall_mean", line_no);
        rows.push_back(std::move(r));
    }
    return rows;
}

void emit_plot_json(const std::vector<ResultRow>& rows, const std::string& path) {
    using nlohmann::json;
    json doc;
    doc["cost_vs_f3"] = json::array();
    doc["f3_vs_budget"] = json::array();
    doc["f3_vs_accuracy"] = json::array();

    using Key = std::tuple<std::string, std::string, double, double>;
    std::map<Key, std::vector<const ResultRow*>> by_param, by_budget, by_acc;
    for (const ResultRow& r : rows) {
        if (r.failed) continue;
        by_param[{r.scenario, r.policy, r.budget_per_item, r.crowd_acc}].push_back(&r);
        by_budget[{r.scenario, r.policy, r.param, r.crowd_acc}].push_back(&r);
        by_acc[{r.scenario, r.policy, r.param, r.budget_per_item}].push_back(&r);
    }

    for (auto& [key, group] : by_param) {
        std::sort(group.begin(), group.end(),
                  [](const ResultRow* a, const ResultRow* b) { return a->param < b->param; });
        json curve;
        curve["scenario"] = std::get<0>(key);
        curve["policy"] = std::get<1>(key);
        curve["budget_per_item"] = std::get<2>(key);
        curve["crowd_acc"] = std::get<3>(key);
        json points = json::array();
        for (const ResultRow* r : group) {
            points.push_back({{"param", r->param},
                              {"x", r->cost_mean},
                              {"y", r->f3_mean},
                              {"f1", r->f1_mean}});
        }
        curve["points"] = std::move(points);
        doc["cost_vs_f3"].push_back(std::move(curve));
    }
    for (auto& [key, group] : by_budget) {
        if (group.size() < 2) continue;
        std::sort(group.begin(), group.end(), [](const ResultRow* a, const ResultRow* b) {
            return a->budget_per_item < b->budget_per_item;
        });
        json curve;
        curve["scenario"] = std::get<0>(key);
        curve["policy"] = std::get<1>(key);
        curve["param"] = std::get<2>(key);
        curve["crowd_acc"] = std::get<3>(key);
        json points = json::array();
        for (const ResultRow* r : group) {
            points.push_back(
                {{"x", r->budget_per_item}, {"y", r->f3_mean}, {"cost", r->cost_mean}});
        }
        curve["points"] = std::move(points);
        doc["f3_vs_budget"].push_back(std::move(curve));
    }
    for (auto& [key, group] : by_acc) {
        if (group.size() < 2) continue;
        std::sort(group.begin(), group.end(), [](const ResultRow* a, const ResultRow* b) {
            return a->crowd_acc < b->crowd_acc;
        });
        json curve;
        curve["scenario"] = std::get<0>(key);
        curve["policy"] = std::get<1>(key);
        curve["param"] = std::get<2>(key);
        curve["budget_per_item"] = std::get<3>(key);
        json points = json::array();
        for (const ResultRow* r : group) {
            points.push_back({{"x", r->crowd_acc}, {"y", r->f3_mean}, {"cost", r->cost_mean}});
        }
        curve["points"] = std::move(points);
        doc["f3_vs_accuracy"].push_back(std::move(curve));
    }

    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace ahc
