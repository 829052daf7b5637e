#include "rearrange/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "rearrange/mcts.hpp"
#include "rearrange/rng.hpp"
#include "rearrange/trlb.hpp"

namespace rearrange {

const char* to_string(Planner p) {
  switch (p) {
    case Planner::kEtbm: return "ETBM";
    case Planner::kErbm: return "ERBM";
    case Planner::kTbm: return "TBM";
    case Planner::kRbm: return "RBM";
    case Planner::kEmcts: return "EMCTS";
    case Planner::kMcts: return "MCTS";
  }
  return "?";
}

const char* to_string(Scenario s) { return s == Scenario::kRand ? "RAND" : "SQ"; }

const char* to_string(Objective o) {
  return o == Objective::kPickPlace ? "PP" : "TI";
}

namespace {

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

Planner parse_planner(const std::string& name) {
  const std::string u = upper(name);
  for (Planner p : all_planners()) {
    if (u == to_string(p)) return p;
  }
  throw std::invalid_argument("unknown planner '" + name + "'");
}

Scenario parse_scenario(const std::string& name) {
  const std::string u = upper(name);
  if (u == "RAND") return Scenario::kRand;
  if (u == "SQ") return Scenario::kSq;
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

Objective parse_objective(const std::string& name) {
  const std::string u = upper(name);
  if (u == "PP") return Objective::kPickPlace;
  if (u == "TI") return Objective::kTaskImpedance;
  throw std::invalid_argument("unknown objective '" + name + "'");
}

std::vector<Planner> all_planners() {
  return {Planner::kEtbm, Planner::kTbm,   Planner::kErbm,
          Planner::kRbm,  Planner::kEmcts, Planner::kMcts};
}

Instance generate(Scenario scenario, int n, double rho, std::uint64_t seed,
                  const Workspace& ws) {
  return scenario == Scenario::kRand ? gen_rand(n, rho, seed, ws)
                                     : gen_sq(n, rho, seed, ws);
}

PlanOutcome run_planner(const Instance& inst, Planner planner,
                        Objective objective, std::uint64_t seed,
                        double time_limit) {
  const auto t0 = std::chrono::steady_clock::now();
  PlanOutcome out;
  try {
    if (planner == Planner::kEmcts || planner == Planner::kMcts) {
      MctsConfig cfg;
      cfg.mode = planner == Planner::kEmcts ? MctsMode::kEmcts : MctsMode::kMcts;
      cfg.objective = objective;
      cfg.time_budget = time_limit;
      cfg.seed = seed;
      MctsResult r = search_mcts(inst, cfg);
      out.success = r.success;
      out.plan = std::move(r.plan);
      out.failure = std::move(r.failure);
    } else {
      TrlbOptions opt;
      opt.objective = objective;
      opt.seed = seed;
      opt.time_budget = time_limit;
      switch (planner) {
        case Planner::kEtbm: opt.mode = TrlbMode::kEtbm; break;
        case Planner::kTbm: opt.mode = TrlbMode::kTbm; break;
        case Planner::kErbm: opt.mode = TrlbMode::kErbm; break;
        default: opt.mode = TrlbMode::kRbm; break;
      }
      TrlbResult r = plan_trlb(inst, opt);
      out.success = r.success;
      out.plan = std::move(r.plan);
      out.failure = std::move(r.failure);
    }
  } catch (const std::exception& e) {
    out.success = false;
    out.plan = {};
    out.failure = e.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
  return out;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t cell, int trial) {
  return derive_seed(master, cell, static_cast<std::uint64_t>(trial));
}

namespace {

constexpr int kGenerationRetries = 20;

struct Job {
  std::size_t cell = 0;
  int trial = 0;
  std::optional<Instance> instance;
  std::uint64_t seed = 0;
};

}  // namespace

SuiteResult run_suite(const SuiteConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (config.modes.empty()) throw std::invalid_argument("no planner modes");
  struct Cell {
    int n;
    double rho;
  };
  std::vector<Cell> cells;
  for (int n : config.ns) {
    for (double rho : config.rhos) cells.push_back({n, rho});
  }

  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (int t = 0; t < config.trials; ++t) {
      Job job{c, t, std::nullopt, trial_seed(config.seed, c, t)};
      for (int retry = 0; retry < kGenerationRetries && !job.instance; ++retry) {
        const std::uint64_t s =
            retry == 0 ? job.seed : derive_seed(job.seed, retry);
        try {
          job.instance = generate(config.scenario, cells[c].n, cells[c].rho, s,
                                  config.workspace);
          job.seed = s;
        } catch (const GenerationError&) {
        }
      }
      jobs.push_back(std::move(job));
    }
  }

  const std::size_t m = config.modes.size();
  SuiteResult result;
  result.trials.resize(jobs.size() * m);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < result.trials.size(); k = next++) {
      const Job& job = jobs[k / m];
      const Planner mode = config.modes[k % m];
      TrialRecord rec;
      rec.scenario = config.scenario;
      rec.n = cells[job.cell].n;
      rec.rho = cells[job.cell].rho;
      rec.mode = mode;
      rec.objective = config.objective;
      rec.trial = job.trial;
      rec.seed = job.seed;
      if (job.instance) {
        const PlanOutcome out = run_planner(*job.instance, mode, config.objective,
                                            job.seed, config.time_limit);
        rec.time_s = out.seconds;
        rec.success = out.success;
        if (out.success) {
          rec.plan_len = out.plan.size();
          rec.len_per_obj = static_cast<double>(out.plan.size()) / rec.n;
          rec.ti_cost =
              plan_cost(out.plan, *job.instance, Objective::kTaskImpedance);
        }
      }
      result.trials[k] = std::move(rec);
    }
  };
  const int threads = std::max(1, config.jobs);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t mi = 0; mi < m; ++mi) {
      AggregateRecord agg;
      agg.scenario = config.scenario;
      agg.n = cells[c].n;
      agg.rho = cells[c].rho;
      agg.mode = config.modes[mi];
      agg.objective = config.objective;
      double len = 0, per = 0, ti = 0, time = 0;
      for (const TrialRecord& r : result.trials) {
        if (r.n != agg.n || r.rho != agg.rho || r.mode != agg.mode) continue;
        ++agg.trials;
        if (!r.success) continue;
        ++agg.successes;
        len += static_cast<double>(*r.plan_len);
        per += *r.len_per_obj;
        ti += *r.ti_cost;
        time += r.time_s;
      }
      if (agg.successes > 0) {
        const double s = agg.successes;
        agg.plan_len = len / s;
        agg.len_per_obj = per / s;
        agg.ti_cost = ti / s;
        agg.time_s = time / s;
      }
      result.aggregates.push_back(agg);
    }
  }
  return result;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

template <typename T, typename F>
std::string opt(const std::optional<T>& v, F&& fmt) {
  return v ? fmt(*v) : std::string();
}

}  // namespace

void write_csv(const SuiteResult& result, std::ostream& out) {
  out << kCsvHeader << '\n';
  auto six = [](double v) { return fixed(v, 6); };
  std::size_t t = 0;
  for (std::size_t a = 0; a < result.aggregates.size();) {
    const AggregateRecord& head = result.aggregates[a];
    for (; t < result.trials.size() && result.trials[t].n == head.n &&
           result.trials[t].rho == head.rho;
         ++t) {
      const TrialRecord& r = result.trials[t];
      out << to_string(r.scenario) << ',' << r.n << ',' << general(r.rho) << ','
          << to_string(r.mode) << ',' << to_string(r.objective) << ',' << r.trial
          << ',' << r.seed << ',' << (r.success ? 1 : 0) << ','
          << opt(r.plan_len, [](std::size_t v) { return std::to_string(v); })
          << ',' << opt(r.len_per_obj, six) << ',' << opt(r.ti_cost, six) << ','
          << fixed(r.time_s, 3) << '\n';
    }
    for (; a < result.aggregates.size() && result.aggregates[a].n == head.n &&
           result.aggregates[a].rho == head.rho;
         ++a) {
      const AggregateRecord& g = result.aggregates[a];
      out << to_string(g.scenario) << ',' << g.n << ',' << general(g.rho) << ','
          << to_string(g.mode) << ',' << to_string(g.objective) << ",mean,,"
          << six(g.success_rate()) << ',' << opt(g.plan_len, six) << ','
          << opt(g.len_per_obj, six) << ',' << opt(g.ti_cost, six) << ','
          << opt(g.time_s, [](double v) { return fixed(v, 3); }) << '\n';
    }
  }
}

}  // namespace rearrange
