// Command-line front end: gen, plan, bench, render.
//
// Exit codes: 0 success, 1 planning failure, 2 invalid input.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rearrange/bench.hpp"
#include "rearrange/io.hpp"
#include "rearrange/render.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPlanFailed = 1;
constexpr int kExitBadInput = 2;

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace rearrange;

  CLI::App app{"Tabletop rearrangement planners and benchmark harness"};
  app.require_subcommand(1);

  double width = 10.0, height = 10.0;
  app.add_option("--width", width, "Workspace width")->capture_default_str();
  app.add_option("--height", height, "Workspace height")->capture_default_str();

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random instance");
  std::string gen_scenario = "RAND", gen_out;
  int gen_n = 10;
  double gen_rho = 0.3;
  std::uint64_t gen_seed = 0;
  gen->add_option("--scenario", gen_scenario, "RAND or SQ")->capture_default_str();
  gen->add_option("-n,--objects", gen_n, "Object count")->capture_default_str();
  gen->add_option("--rho", gen_rho, "Density")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_option("-o,--out", gen_out, "Instance JSON path")->required();

  // plan
  auto* plan = app.add_subcommand("plan", "Plan one instance");
  std::string plan_instance, plan_mode = "ERBM", plan_objective = "PP", plan_out;
  std::uint64_t plan_seed = 0;
  double plan_limit = 600.0;
  plan->add_option("-i,--instance", plan_instance, "Instance JSON")->required();
  plan->add_option("-m,--mode", plan_mode, "ETBM, ERBM, TBM, RBM, EMCTS or MCTS")
      ->capture_default_str();
  plan->add_option("--objective", plan_objective, "PP or TI")->capture_default_str();
  plan->add_option("--seed", plan_seed, "Planner seed")->capture_default_str();
  plan->add_option("--time-limit", plan_limit, "Seconds")->capture_default_str();
  plan->add_option("-o,--out", plan_out, "Plan JSON path");

  // bench
  auto* bench = app.add_subcommand("bench", "Run a benchmark grid");
  std::string bench_scenario = "RAND", bench_ns = "20", bench_rhos = "0.4",
              bench_modes = "ETBM,TBM,ERBM,RBM,EMCTS,MCTS",
              bench_objective = "PP", bench_csv;
  int bench_trials = 5, bench_jobs = 1;
  double bench_limit = 600.0;
  std::uint64_t bench_seed = 0;
  bench->add_option("--scenario", bench_scenario, "RAND or SQ")->capture_default_str();
  bench->add_option("--n", bench_ns, "Comma-separated object counts")
      ->capture_default_str();
  bench->add_option("--rho", bench_rhos, "Comma-separated densities")
      ->capture_default_str();
  bench->add_option("--modes", bench_modes, "Comma-separated planners")
      ->capture_default_str();
  bench->add_option("--objective", bench_objective, "PP or TI")->capture_default_str();
  bench->add_option("--trials", bench_trials, "Trials per cell")->capture_default_str();
  bench->add_option("--time-limit", bench_limit, "Seconds per planner run")
      ->capture_default_str();
  bench->add_option("--seed", bench_seed, "Master seed")->capture_default_str();
  bench->add_option("-j,--jobs", bench_jobs, "Worker threads")->capture_default_str();
  bench->add_option("--csv", bench_csv, "CSV output path (stdout if omitted)");

  // render
  auto* render_cmd = app.add_subcommand("render", "Draw an instance or plan as SVG");
  std::string render_instance, render_plan, render_out;
  render_cmd->add_option("-i,--instance", render_instance, "Instance JSON")->required();
  render_cmd->add_option("-p,--plan", render_plan, "Plan JSON");
  render_cmd->add_option("-o,--out", render_out, "SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  try {
    const Workspace ws(width, height);

    if (*gen) {
      const Instance inst =
          generate(parse_scenario(gen_scenario), gen_n, gen_rho, gen_seed, ws);
      save_instance(inst, gen_out);
      std::cout << "wrote " << gen_out << " (" << inst.size()
                << " objects, density " << density(inst) << ")\n";
      return kExitOk;
    }

    if (*plan) {
      const Instance inst = load_instance(plan_instance);
      const PlanOutcome out = run_planner(inst, parse_planner(plan_mode),
                                          parse_objective(plan_objective),
                                          plan_seed, plan_limit);
      if (!out.success) {
        std::cerr << "planning failed: " << out.failure << '\n';
        return kExitPlanFailed;
      }
      if (!plan_out.empty()) save_plan(out.plan, plan_out);
      std::cout << "actions " << out.plan.size() << ", task impedance "
                << plan_cost(out.plan, inst, Objective::kTaskImpedance)
                << ", seconds " << out.seconds << '\n';
      if (plan_out.empty()) std::cout << plan_to_json(out.plan) << '\n';
      return kExitOk;
    }

    if (*bench) {
      SuiteConfig cfg;
      cfg.scenario = parse_scenario(bench_scenario);
      cfg.ns.clear();
      for (const auto& s : split(bench_ns)) cfg.ns.push_back(std::stoi(s));
      cfg.rhos.clear();
      for (const auto& s : split(bench_rhos)) cfg.rhos.push_back(std::stod(s));
      cfg.modes.clear();
      for (const auto& s : split(bench_modes)) cfg.modes.push_back(parse_planner(s));
      cfg.objective = parse_objective(bench_objective);
      cfg.trials = bench_trials;
      cfg.time_limit = bench_limit;
      cfg.seed = bench_seed;
      cfg.jobs = bench_jobs;
      cfg.workspace = ws;
      const SuiteResult result = run_suite(cfg);
      if (bench_csv.empty()) {
        write_csv(result, std::cout);
      } else {
        std::ofstream out(bench_csv);
        if (!out) throw std::runtime_error("cannot write " + bench_csv);
        write_csv(result, out);
      }
      return kExitOk;
    }

    if (*render_cmd) {
      const Instance inst = load_instance(render_instance);
      std::optional<RearrangementPlan> p;
      if (!render_plan.empty()) p = load_plan(render_plan);
      const auto files = render(inst, p ? &*p : nullptr, render_out);
      std::cout << "wrote " << files.size() << " SVG file(s)\n";
      return kExitOk;
    }
  } catch (const ParseError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitOk;
}
