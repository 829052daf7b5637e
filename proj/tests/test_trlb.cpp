#include <algorithm>

#include "doctest.h"
#include "oracles.hpp"
#include "rearrange/io.hpp"
#include "rearrange/trlb.hpp"

using namespace rearrange;

namespace {

using PA = PrimitiveAction;
constexpr auto kGoal = PrimitiveKind::kToGoal;
constexpr auto kBuffer = PrimitiveKind::kToBuffer;

DependencyGraph two_cycle(WeightVector w) {
  DependencyGraph g(std::move(w));
  g.add_arc(0, 1);
  g.add_arc(1, 0);
  return g;
}

DependencyGraph path(int n) {
  DependencyGraph g(uniform_weights(n));
  for (int i = 0; i + 1 < n; ++i) g.add_arc(i, i + 1);
  return g;
}

int buffered(const PrimitivePlan& pp) {
  return static_cast<int>(std::count_if(pp.actions.begin(), pp.actions.end(),
                                        [](const PA& a) { return a.kind == kBuffer; }));
}

// Peak integer weight held in buffers while replaying a primitive plan.
int running_peak(const PrimitivePlan& pp, const std::vector<int>& w) {
  int held = 0, peak = 0;
  std::vector<bool> in_buffer(w.size(), false);
  for (const PA& a : pp.actions) {
    if (a.kind == kBuffer) {
      in_buffer[a.object] = true;
      held += w[a.object];
    } else if (in_buffer[a.object]) {
      in_buffer[a.object] = false;
      held -= w[a.object];
    }
    peak = std::max(peak, held);
  }
  return peak;
}

}  // namespace

TEST_CASE("total-buffer primitive plans") {
  SUBCASE("acyclic graph needs no buffer") {
    const PrimitivePlan pp = primitive_plan_etbm(path(4));
    CHECK(pp.actions.size() == 4);
    CHECK(buffered(pp) == 0);
    CHECK(pp.metric == 0);
    // Dependencies first: the last vertex of the path leaves before the rest.
    CHECK(pp.actions.front() == PA{3, kGoal});
    CHECK(is_consistent(pp, path(4)));
  }
  SUBCASE("two-cycle buffers the lighter object") {
    const DependencyGraph g = two_cycle({1, 5});
    const PrimitivePlan pp = primitive_plan_etbm(g);
    CHECK(pp.actions == std::vector<PA>{{0, kBuffer}, {1, kGoal}, {0, kGoal}});
    CHECK(pp.metric == 1);
    CHECK(is_consistent(pp, g));
  }
  SUBCASE("uniform weights recover the unweighted minimum") {
    Rng rng(17);
    for (int t = 0; t < 100; ++t) {
      const int n = 2 + static_cast<int>(rng.below(9));
      DependencyGraph g = oracle::random_digraph(rng, n, 0.3, 1, 1);
      g = [&] {
        DependencyGraph u(uniform_weights(n));
        for (int v = 0; v < n; ++v) {
          for (int s : g.successors(v)) u.add_arc(v, s);
        }
        return u;
      }();
      const PrimitivePlan pp = primitive_plan_etbm(g);
      CHECK(is_consistent(pp, g));
      CHECK(buffered(pp) == oracle::brute_force_fvs_size(g));
      CHECK(pp.metric == doctest::Approx(buffered(pp)));
    }
  }
}

TEST_CASE("consistency checker rejects broken plans") {
  const DependencyGraph g = two_cycle({1, 1});
  CHECK_FALSE(is_consistent({{{1, kGoal}, {0, kGoal}}, 0}, g));
  CHECK_FALSE(is_consistent({{{0, kBuffer}, {1, kGoal}}, 0}, g));
  CHECK_FALSE(is_consistent({{{0, kBuffer}, {0, kBuffer}, {1, kGoal}, {0, kGoal}}, 0}, g));
  CHECK(is_consistent({{{1, kBuffer}, {0, kGoal}, {1, kGoal}}, 0}, g));
}

TEST_CASE("weight integerization") {
  CHECK(integerize_weights({1, 1, 1}, 4) == std::vector<int>{4, 4, 4});
  // Mean 2: 0.1 rounds to 0 and is lifted to 1; 4.9 -> round(9.8) = 10.
  CHECK(integerize_weights({0.1, 1.0, 4.9}, 4) == std::vector<int>{1, 2, 10});
  CHECK(integerize_weights({2, 2}, 1) == std::vector<int>{1, 1});
}

TEST_CASE("running-buffer primitive plans") {
  SUBCASE("acyclic graph") {
    const PrimitivePlan pp = primitive_plan_erbm(path(5));
    CHECK(pp.metric == 0);
    CHECK(pp.actions.size() == 5);
    CHECK(buffered(pp) == 0);
  }
  SUBCASE("two-cycle with unit resolution") {
    const PrimitivePlan pp = primitive_plan_erbm(two_cycle({1, 1}), 1);
    CHECK(pp.metric == 1);
    CHECK(pp.actions.size() == 3);
  }
  SUBCASE("budget is the exhaustive minimum") {
    Rng rng(23);
    for (int t = 0; t < 60; ++t) {
      const int n = 2 + static_cast<int>(rng.below(7));
      DependencyGraph raw = oracle::random_digraph(rng, n, rng.uniform(0.2, 0.5), 1, 1);
      DependencyGraph g(uniform_weights(n));
      for (int v = 0; v < n; ++v) {
        for (int s : raw.successors(v)) g.add_arc(v, s);
      }
      const PrimitivePlan pp = primitive_plan_erbm(g, 1);
      CHECK(is_consistent(pp, g));
      const std::vector<int> ones(n, 1);
      CHECK(pp.metric == oracle::min_running_buffer(g, ones));
      CHECK(running_peak(pp, ones) == pp.metric);
    }
  }
  SUBCASE("weighted budget is the exhaustive minimum") {
    Rng rng(29);
    for (int t = 0; t < 40; ++t) {
      const int n = 2 + static_cast<int>(rng.below(6));
      const DependencyGraph g = oracle::random_digraph(rng, n, 0.35, 0.2, 3.0);
      const PrimitivePlan pp = primitive_plan_erbm(g, 4);
      const std::vector<int> w = integerize_weights(g.weights(), 4);
      CHECK(is_consistent(pp, g));
      CHECK(pp.metric == oracle::min_running_buffer(g, w));
      CHECK(running_peak(pp, w) == pp.metric);
    }
  }
}

TEST_CASE("buffer allocation") {
  SUBCASE("plans without buffers bind verbatim") {
    const Instance inst = load_instance(FIXTURE_DIR "/chain4.json");
    const PrimitivePlan pp{{{3, kGoal}, {2, kGoal}, {1, kGoal}, {0, kGoal}}, 0};
    const AllocationResult r = allocate_buffers(inst, pp, 1);
    REQUIRE(r.success);
    REQUIRE(r.plan.size() == 4);
    for (int k = 0; k < 4; ++k) {
      CHECK(r.plan.actions[k].object == 3 - k);
      CHECK(r.plan.actions[k].target == inst.goal[3 - k]);
    }
  }
  SUBCASE("swap in an open workspace") {
    const Instance inst = load_instance(FIXTURE_DIR "/swap2.json");
    const PrimitivePlan pp{{{0, kBuffer}, {1, kGoal}, {0, kGoal}}, 1};
    const AllocationResult r = allocate_buffers(inst, pp, 1);
    REQUIRE(r.success);
    CHECK(validate_plan(r.plan, inst).valid);
    const Pose buffer = r.plan.actions[0].target;
    for (int i = 0; i < 2; ++i) {
      CHECK_FALSE(collide(inst.objects[0].footprint, buffer, inst.objects[i].footprint,
                          inst.goal[i]));
    }
  }
  SUBCASE("swap on a table the two objects tile") {
    Instance inst;
    inst.workspace = Workspace(2, 1);
    inst.objects.assign(2, {Footprint::square(1), {}, {}});
    inst.start = {Pose(0.5, 0.5, 0), Pose(1.5, 0.5, 0)};
    inst.goal = {Pose(1.5, 0.5, 0), Pose(0.5, 0.5, 0)};
    const PrimitivePlan pp{{{0, kBuffer}, {1, kGoal}, {0, kGoal}}, 1};
    const AllocationResult r = allocate_buffers(inst, pp, 1);
    CHECK_FALSE(r.success);
    CHECK(r.failed_action == 0);
    CHECK(r.partial.actions.empty());
    CHECK(r.partial.reached == inst.start);
  }
}

TEST_CASE("end-to-end planning on small cases") {
  for (TrlbMode mode : {TrlbMode::kEtbm, TrlbMode::kErbm, TrlbMode::kTbm, TrlbMode::kRbm}) {
    CAPTURE(to_string(mode));
    TrlbOptions opt;
    opt.mode = mode;
    SUBCASE("already solved") {
      Instance inst = gen_rand(6, 0.3, 9);
      inst.goal = inst.start;
      const TrlbResult r = plan_trlb(inst, opt);
      CHECK(r.success);
      CHECK(r.plan.empty());
    }
    SUBCASE("swap takes three actions") {
      const Instance inst = load_instance(FIXTURE_DIR "/swap2.json");
      const TrlbResult r = plan_trlb(inst, opt);
      REQUIRE(r.success);
      CHECK(r.plan.size() == 3);
      CHECK(validate_plan(r.plan, inst).valid);
    }
    SUBCASE("tiled swap fails cleanly") {
      Instance inst;
      inst.workspace = Workspace(2, 1);
      inst.objects.assign(2, {Footprint::square(1), {}, {}});
      inst.start = {Pose(0.5, 0.5, 0), Pose(1.5, 0.5, 0)};
      inst.goal = {Pose(1.5, 0.5, 0), Pose(0.5, 0.5, 0)};
      opt.max_bidirectional_iterations = 50;
      const TrlbResult r = plan_trlb(inst, opt);
      CHECK_FALSE(r.success);
      CHECK_FALSE(r.failure.empty());
    }
  }
}

TEST_CASE("plans on random instances are valid, bounded below, and deterministic") {
  for (int t = 0; t < 25; ++t) {
    const Instance inst = gen_rand(8, 0.3, 300 + t);
    const auto fvs = min_weight_fvs(build_dependency_graph(inst, uniform_weights(8)));
    int away = 0;
    for (int i = 0; i < 8; ++i) away += !at_goal(inst, i, inst.start[i]);
    for (TrlbMode mode :
         {TrlbMode::kEtbm, TrlbMode::kErbm, TrlbMode::kTbm, TrlbMode::kRbm}) {
      for (Objective obj : {Objective::kPickPlace, Objective::kTaskImpedance}) {
        TrlbOptions opt;
        opt.mode = mode;
        opt.objective = obj;
        opt.seed = t;
        const TrlbResult r = plan_trlb(inst, opt);
        REQUIRE(r.success);
        CHECK(oracle::replay_ok(r.plan, inst));
        CHECK(r.plan.size() >= away + fvs.size());
        CHECK(plan_trlb(inst, opt).plan == r.plan);
      }
    }
  }
}

TEST_CASE("planner weights by mode and objective") {
  const Instance inst = gen_sq(6, 0.3, 1);
  CHECK(planner_weights(inst, Objective::kPickPlace, false) == uniform_weights(6));
  CHECK(planner_weights(inst, Objective::kPickPlace, true) ==
        hecp_weights(inst.objects, inst.workspace));
  CHECK(planner_weights(inst, Objective::kTaskImpedance, true) ==
        heti_weights(inst.objects));

  Instance cramped;
  cramped.workspace = Workspace(2, 1);
  cramped.objects.assign(2, {Footprint::square(1), {}, {}});
  cramped.start = {Pose(0.5, 0.5, 0), Pose(1.5, 0.5, 0)};
  cramped.goal = cramped.start;
  CHECK(planner_weights(cramped, Objective::kPickPlace, true) == uniform_weights(2));
}

TEST_CASE("planner reports a timeout") {
  TrlbOptions opt;
  opt.time_budget = 1e-9;
  const TrlbResult r = plan_trlb(gen_rand(30, 0.4, 2), opt);
  CHECK_FALSE(r.success);
  CHECK(r.failure == "timeout");
}
