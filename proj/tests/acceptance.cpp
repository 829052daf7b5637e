// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
//   acceptance [--only N[,N...]] [--cli PATH] [--work DIR]

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rearrange/bench.hpp"
#include "rearrange/depgraph.hpp"
#include "rearrange/mcts.hpp"
#include "rearrange/trlb.hpp"

using namespace rearrange;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome fvs_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(20240101);
  int match = 0;
  const int graphs = 200;
  for (int t = 0; t < graphs; ++t) {
    const int n = 2 + static_cast<int>(rng.below(11));
    const double density = rng.uniform(0.15, 0.35);
    const DependencyGraph g = oracle::random_digraph(rng, n, density, 0.1, 2.0);
    const auto fvs = min_weight_fvs(g);
    std::uint32_t mask = 0;
    for (int v : fvs) mask |= 1u << v;
    if (oracle::acyclic(g, mask) &&
        std::abs(total_weight(g, fvs) - oracle::brute_force_fvs_weight(g)) <= 1e-9) {
      ++match;
    }
  }
  const double secs = seconds_since(t0);
  return {match == graphs && secs < 60,
          fmt("%d/%d graphs match brute force, %.1f s (limit 60 s)", match, graphs, secs)};
}

// Distance from p to a convex CCW polygon (0 inside).
double distance_to(const std::vector<Vec2>& poly, Vec2 p) {
  if (oracle::strictly_inside(poly, p)) return 0;
  double best = 1e300;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
    const Vec2 ab = b - a, ap = p - a;
    const double t = std::clamp(dot(ap, ab) / dot(ab, ab), 0.0, 1.0);
    best = std::min(best, norm(p - (a + t * ab)));
  }
  return best;
}

Outcome collision_formula() {
  const auto t0 = std::chrono::steady_clock::now();
  const Workspace ws;
  Rng rng(777);
  double worst = 0;
  int within = 0, total = 0;
  for (int k = 0; k < 20; ++k) {
    // Random convex polygon: sorted angles on a random ellipse.
    const int m = 3 + static_cast<int>(rng.below(6));
    std::vector<double> ang(m);
    for (double& a : ang) a = rng.uniform(0, kTwoPi);
    std::sort(ang.begin(), ang.end());
    const double rx = rng.uniform(0.3, 1.5), ry = rng.uniform(0.3, 1.5);
    std::vector<Vec2> pts;
    for (double a : ang) pts.push_back({rx * std::cos(a), ry * std::sin(a)});
    std::optional<Footprint> fp;
    try {
      fp = Footprint::polygon(pts);
    } catch (const std::invalid_argument&) {
      --k;  // near-degenerate draw
      continue;
    }
    const std::vector<Vec2> poly = fp->vertices();
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (Vec2 v : poly) {
      x0 = std::min(x0, v.x);
      x1 = std::max(x1, v.x);
      y0 = std::min(y0, v.y);
      y1 = std::max(y1, v.y);
    }
    for (double r : {0.1, 0.5, 1.0}) {
      // Disc centres that touch the polygon fill its Minkowski sum with the
      // disc; estimate that area inside the padded bounding box.
      const double bx0 = x0 - r, bx1 = x1 + r, by0 = y0 - r, by1 = y1 + r;
      const int samples = 1000000;
      int hit = 0;
      for (int s = 0; s < samples; ++s) {
        const Vec2 p{rng.uniform(bx0, bx1), rng.uniform(by0, by1)};
        if (distance_to(poly, p) <= r) ++hit;
      }
      const double area = (bx1 - bx0) * (by1 - by0) * hit / samples;
      const double estimate = area / ((ws.width - 2 * r) * (ws.height - 2 * r));
      const double rel = std::abs(collision_probability(*fp, r, ws) - estimate) / estimate;
      worst = std::max(worst, rel);
      within += rel <= 0.01;
      ++total;
    }
  }
  const double secs = seconds_since(t0);
  return {within == total && secs < 120,
          fmt("%d/%d cases within 1%%, worst %.4f%%, %.1f s (limit 120 s)", within,
              total, 100 * worst, secs)};
}

Outcome running_buffer_optimality() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(4242);
  int match = 0;
  const int graphs = 100;
  for (int t = 0; t < graphs; ++t) {
    const int n = 2 + static_cast<int>(rng.below(7));
    const DependencyGraph raw =
        oracle::random_digraph(rng, n, rng.uniform(0.15, 0.5), 1, 1);
    DependencyGraph g(uniform_weights(n));
    for (int v = 0; v < n; ++v) {
      for (int s : raw.successors(v)) g.add_arc(v, s);
    }
    const PrimitivePlan pp = primitive_plan_erbm(g);
    const std::vector<int> w = integerize_weights(g.weights(), 4);
    if (is_consistent(pp, g) && pp.metric == oracle::min_running_buffer(g, w)) ++match;
  }
  const double secs = seconds_since(t0);
  return {match == graphs && secs < 300,
          fmt("%d/%d graphs at the exhaustive minimum, %.1f s (limit 300 s)", match,
              graphs, secs)};
}

Outcome validity_and_lower_bound() {
  int runs = 0, invalid = 0, short_plans = 0, failures = 0;
  for (double rho : {0.2, 0.3}) {
    for (int t = 0; t < 100; ++t) {
      const Instance inst = gen_rand(10, rho, derive_seed(404, t, rho == 0.2 ? 1 : 2));
      const DependencyGraph g = build_dependency_graph(inst, uniform_weights(10));
      const std::size_t bound = 10 + min_weight_fvs(g).size();
      for (Planner p : all_planners()) {
        ++runs;
        const PlanOutcome out = run_planner(inst, p, Objective::kPickPlace, t, 600);
        if (!out.success) {
          ++failures;
          continue;
        }
        if (!validate_plan(out.plan, inst).valid || !oracle::replay_ok(out.plan, inst)) {
          ++invalid;
        }
        if (out.plan.size() < bound) ++short_plans;
      }
    }
  }
  return {invalid == 0 && short_plans == 0 && failures == 0,
          fmt("%d runs: %d invalid, %d below n + min FVS, %d unsolved", runs, invalid,
              short_plans, failures)};
}

struct Paired {
  std::vector<PlanOutcome> a, b;
  std::vector<Instance> inst;
};

Paired run_pairs(Scenario sc, int n, double rho, Objective obj, Planner pa, Planner pb,
                 std::uint64_t seed, double limit) {
  Paired out;
  for (int t = 0; t < 20; ++t) {
    out.inst.push_back(generate(sc, n, rho, derive_seed(seed, t)));
    out.a.push_back(run_planner(out.inst.back(), pa, obj, t, limit));
    out.b.push_back(run_planner(out.inst.back(), pb, obj, t, limit));
  }
  return out;
}

// Means of `metric` over the instances both planners solved.
std::pair<double, double> joint_means(const Paired& p,
                                      const std::function<double(const PlanOutcome&,
                                                                 const Instance&)>& metric,
                                      int* joint) {
  double sa = 0, sb = 0;
  *joint = 0;
  for (std::size_t i = 0; i < p.a.size(); ++i) {
    if (!p.a[i].success || !p.b[i].success) continue;
    ++*joint;
    sa += metric(p.a[i], p.inst[i]);
    sb += metric(p.b[i], p.inst[i]);
  }
  return *joint ? std::make_pair(sa / *joint, sb / *joint) : std::make_pair(0.0, 0.0);
}

int solved(const std::vector<PlanOutcome>& v) {
  int k = 0;
  for (const auto& o : v) k += o.success;
  return k;
}

Outcome length_trend() {
  auto len = [](const PlanOutcome& o, const Instance&) {
    return static_cast<double>(o.plan.size());
  };
  const Paired tb = run_pairs(Scenario::kRand, 20, 0.4, Objective::kPickPlace,
                              Planner::kEtbm, Planner::kTbm, 5005, 120);
  const Paired rb = run_pairs(Scenario::kRand, 20, 0.4, Objective::kPickPlace,
                              Planner::kErbm, Planner::kRbm, 5005, 120);
  int jt = 0, jr = 0;
  const auto [etbm, tbm] = joint_means(tb, len, &jt);
  const auto [erbm, rbm] = joint_means(rb, len, &jr);
  return {jt > 0 && jr > 0 && etbm <= tbm && erbm <= rbm,
          fmt("mean length ETBM %.2f vs TBM %.2f (%d joint), ERBM %.2f vs RBM %.2f "
              "(%d joint)",
              etbm, tbm, jt, erbm, rbm, jr)};
}

Outcome square_success_trend() {
  const Paired tb = run_pairs(Scenario::kSq, 20, 0.4, Objective::kPickPlace,
                              Planner::kEtbm, Planner::kTbm, 6006, 120);
  const Paired rb = run_pairs(Scenario::kSq, 20, 0.4, Objective::kPickPlace,
                              Planner::kErbm, Planner::kRbm, 6006, 120);
  const int e = solved(tb.a), t = solved(tb.b), er = solved(rb.a), r = solved(rb.b);
  return {e >= t && er >= r,
          fmt("solved of 20: ETBM %d vs TBM %d, ERBM %d vs RBM %d", e, t, er, r)};
}

Outcome impedance_trend() {
  auto ti = [](const PlanOutcome& o, const Instance& inst) {
    return plan_cost(o.plan, inst, Objective::kTaskImpedance);
  };
  const Paired tb = run_pairs(Scenario::kSq, 20, 0.3, Objective::kTaskImpedance,
                              Planner::kEtbm, Planner::kTbm, 7007, 120);
  const Paired rb = run_pairs(Scenario::kSq, 20, 0.3, Objective::kTaskImpedance,
                              Planner::kErbm, Planner::kRbm, 7007, 120);
  int jt = 0, jr = 0;
  const auto [etbm, tbm] = joint_means(tb, ti, &jt);
  const auto [erbm, rbm] = joint_means(rb, ti, &jr);
  return {jt > 0 && jr > 0 && etbm <= 0.9 * tbm && erbm <= 0.9 * rbm,
          fmt("mean impedance ETBM %.2f vs TBM %.2f (ratio %.3f, %d joint), ERBM %.2f "
              "vs RBM %.2f (ratio %.3f, %d joint)",
              etbm, tbm, etbm / tbm, jt, erbm, rbm, erbm / rbm, jr)};
}

Outcome argmax_invariance() {
  Rng rng(8080);
  int same = 0, same_unscaled = 0;
  const int tables = 1000;
  for (int t = 0; t < tables; ++t) {
    SearchNode node;
    node.expanded = true;
    const int m = 2 + static_cast<int>(rng.below(12));
    const int n = m + static_cast<int>(rng.below(10));
    std::uint64_t total = 0;
    for (int a = 0; a < m; ++a) {
      node.actions.push_back(
          {{a, Pose(0, 0, 0), ActionTag::kToGoal}, static_cast<int>(rng.below(n))});
      auto child = std::make_unique<SearchNode>();
      child->visits = 1 + rng.below(100);
      child->value = rng.uniform() * static_cast<double>(child->visits);
      total += child->visits;
      node.children.push_back(std::move(child));
    }
    node.visits = total + rng.below(10);
    const WeightVector w = uniform_weights(n);
    const double c = rng.uniform(0.1, 3);
    const int weighted = ucb_select(node, w, c, true);
    // Uniform weights give every arm the single constant C (1 + 1/n).
    same += weighted == ucb_select(node, w, c * (1 + 1.0 / n), false);
    same_unscaled += weighted == ucb_select(node, w, c, false);
  }
  return {same == tables,
          fmt("%d/%d tables select identically to UCT with the shared constant; "
              "%d/%d also agree with the unscaled constant",
              same, tables, same_unscaled, tables)};
}

Outcome search_solve_rate() {
  int ok = 0, invalid = 0;
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    const Instance inst = gen_rand(10, 0.2, derive_seed(909, t));
    const PlanOutcome out = run_planner(inst, Planner::kEmcts, Objective::kPickPlace, t, 60);
    worst = std::max(worst, out.seconds);
    if (!out.success) continue;
    ++ok;
    if (!validate_plan(out.plan, inst).valid) ++invalid;
  }
  return {ok >= 18 && invalid == 0,
          fmt("%d/20 solved (need 18), %d invalid, slowest %.2f s", ok, invalid, worst)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string drop_last_column(const std::string& csv) {
  std::istringstream in(csv);
  std::string out;
  for (std::string line; std::getline(in, line);) {
    out += line.substr(0, line.rfind(',')) + "\n";
  }
  return out;
}

Outcome determinism(const std::string& cli, const std::filesystem::path& work) {
  namespace fs = std::filesystem;
  fs::create_directories(work);
  auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  int mismatches = 0, errors = 0;
  const fs::path inst = work / "inst.json";
  if (run("gen --scenario RAND -n 12 --rho 0.35 --seed 31 -o \"" + inst.string() + "\"") !=
      0) {
    return {false, "instance generation failed"};
  }
  for (Planner p : all_planners()) {
    for (const char* obj : {"PP", "TI"}) {
      std::string first;
      for (int rep = 0; rep < 2; ++rep) {
        const fs::path out = work / ("plan_" + std::to_string(rep) + ".json");
        fs::remove(out);
        if (run("plan -i \"" + inst.string() + "\" -m " + to_string(p) +
                " --objective " + obj + " --seed 5 --time-limit 120 -o \"" +
                out.string() + "\"") != 0) {
          ++errors;
          break;
        }
        if (rep == 0) {
          first = slurp(out);
        } else if (slurp(out) != first) {
          ++mismatches;
        }
      }
    }
  }
  std::string csv[2];
  for (int rep = 0; rep < 2; ++rep) {
    const fs::path out = work / ("bench_" + std::to_string(rep) + ".csv");
    if (run("bench --scenario SQ --n 8,10 --rho 0.25,0.3 --trials 2 --seed 17 "
            "--time-limit 60 --jobs " +
            std::to_string(rep + 1) + " --csv \"" + out.string() + "\"") != 0) {
      ++errors;
    }
    csv[rep] = drop_last_column(slurp(out));
  }
  const bool csv_same = !csv[0].empty() && csv[0] == csv[1];
  fs::remove_all(work);
  return {mismatches == 0 && errors == 0 && csv_same,
          fmt("12 plan pairs: %d differ, %d command errors; bench CSV %s", mismatches,
              errors, csv_same ? "identical apart from time_s" : "differs")};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  std::string cli;
  std::filesystem::path work =
      std::filesystem::temp_directory_path() / "rearrange_acceptance";
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string tok; std::getline(ss, tok, ',');) only.insert(std::stoi(tok));
    } else if (a == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else if (a == "--work" && i + 1 < argc) {
      work = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--only N,...] [--cli PATH] [--work DIR]\n",
                   argv[0]);
      return 2;
    }
  }
#ifdef REARRANGE_CLI_PATH
  if (cli.empty()) cli = REARRANGE_CLI_PATH;
#endif

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"feedback vertex set exactness", fvs_exactness},
      {"collision probability formula", collision_formula},
      {"running-buffer optimality", running_buffer_optimality},
      {"plan validity and lower bound", validity_and_lower_bound},
      {"weighted planners shorten RAND plans", length_trend},
      {"weighted planners solve more SQ cases", square_success_trend},
      {"weighted planners cut task impedance", impedance_trend},
      {"uniform-weight selection invariance", argmax_invariance},
      {"weighted tree search solve rate", search_solve_rate},
      {"determinism of plan and bench",
       [&] {
         if (cli.empty()) return Outcome{false, "no CLI path given (--cli)"};
         return determinism(cli, work);
       }},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id,
                criteria[k].first.c_str(), o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
