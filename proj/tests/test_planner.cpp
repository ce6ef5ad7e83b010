#include <doctest.h>

#include "support.hpp"

using namespace goalrec;
using testing::action;
using testing::fact;

namespace {

GroundTask chain_task() {
  DomainSchema d = parse_domain("(define (domain chain) (:predicates (f1) (f2) (g))"
                                " (:action a1 :parameters () :precondition (and) :effect (f1))"
                                " (:action a2 :parameters () :precondition (and (f1)) :effect (f2)))");
  ProblemSpec p;
  p.hypotheses = {{"two", 1.0, {{"f2", {}}}}};
  return ground(d, p);
}

}  // namespace

TEST_SUITE("planner") {

TEST_CASE("two-step chain levels and costs") {
  GroundTask t = chain_task();
  auto rpg = build_rpg(t, t.init());
  CHECK(rpg.fact_levels[fact(t, "(f1)")] == 1);
  CHECK(rpg.fact_levels[fact(t, "(f2)")] == 2);
  CHECK(h_add(rpg, {fact(t, "(f2)")}) == 2.0);
  CHECK(h_max(rpg, {fact(t, "(f2)")}) == 2.0);
  CHECK(rpg.best_supporter[fact(t, "(f2)")] == action(t, "(a2)"));
}

TEST_CASE("goal already in the seed costs nothing") {
  GroundTask t = testing::ground_three_blocks({{{"ontable", "a"}, {"clear", "b"}}});
  auto rpg = build_rpg(t, t.init());
  for (FactId f : t.hypothesis(0).facts) CHECK(rpg.fact_levels[f] == 0);
  CHECK(h_add(rpg, t.hypothesis(0).facts) == 0.0);
  CHECK(gbfs_plan(t, t.hypothesis(0), 1).actions.empty());
}

TEST_CASE("levels agree with a brute-force relaxed exploration") {
  GroundTask t = testing::ground_three_blocks({{{"on", "a", "b"}, {"on", "b", "c"}}});
  std::mt19937_64 rng(7);
  State s = t.init();
  for (int step = 0; step < 30; ++step) {
    auto rpg = build_rpg(t, s);
    auto oracle = testing::brute_relaxed_levels(t, s);
    for (FactId f = 0; f < t.num_facts(); ++f) {
      int expected = oracle[f] == std::numeric_limits<int>::max() ? kUnreachableLevel : oracle[f];
      CHECK(rpg.fact_levels[f] == expected);
    }
    for (ActionId a = 0; a < t.num_actions(); ++a) {
      int lvl = rpg.action_levels[a];
      if (lvl == kUnreachableLevel) continue;
      for (FactId p : t.action(a).pre) CHECK(rpg.fact_levels[p] <= lvl);
    }
    std::vector<ActionId> app;
    for (ActionId a = 0; a < t.num_actions(); ++a) {
      if (applicable(t, s, a)) app.push_back(a);
    }
    s = apply(t, s, app[rng() % app.size()]);
  }
}

TEST_CASE("h_add and h_max match an independent fixpoint") {
  GroundTask t = testing::ground_three_blocks({{{"on", "a", "b"}}});
  AdditiveHeuristic fast(t);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    State s = t.init();
    for (int k = static_cast<int>(rng() % 6); k > 0; --k) {
      std::vector<ActionId> app;
      for (ActionId a = 0; a < t.num_actions(); ++a) {
        if (applicable(t, s, a)) app.push_back(a);
      }
      s = apply(t, s, app[rng() % app.size()]);
    }
    std::vector<FactId> goal;
    while (goal.size() < 4) {
      auto f = static_cast<FactId>(rng() % t.num_facts());
      if (std::find(goal.begin(), goal.end(), f) == goal.end()) goal.push_back(f);
    }
    auto dp = testing::dp_costs(t, s);
    double add = 0.0, mx = 0.0;
    for (FactId f : goal) {
      add += dp.add[f];
      mx = std::max(mx, dp.max[f]);
    }
    auto rpg = build_rpg(t, s);
    CHECK(h_add(rpg, goal) == add);
    CHECK(h_max(rpg, goal) == mx);
    CHECK(h_add(rpg, goal) >= h_max(rpg, goal));
    CHECK(static_cast<double>(fast.evaluate(s, goal)) == add);
  }
}

TEST_CASE("unreachable goals") {
  DomainSchema d = parse_domain("(define (domain d) (:predicates (p) (q) (r))"
                                " (:action a :parameters () :precondition (and (p)) :effect (q)))");
  ProblemSpec p;
  p.init = {{"p", {}}};
  p.hypotheses = {{"g", 1.0, {{"r", {}}}}};
  GroundTask t = ground(d, p, {false});
  auto rpg = build_rpg(t, t.init());
  CHECK_FALSE(rpg.reachable(fact(t, "(r)")));
  CHECK(h_add(rpg, {fact(t, "(r)")}) == kInfiniteCost);
  CHECK_FALSE(relaxed_reachable(t, t.init(), {fact(t, "(r)")}));
  CHECK_THROWS_AS(gbfs_plan(t, t.hypothesis(0), 1), Unsolvable);
}

TEST_CASE("stacking a on b takes two steps") {
  GroundTask t = testing::ground_three_blocks({{{"on", "a", "b"}}});
  Plan plan = gbfs_plan(t, t.hypothesis(0), 3);
  REQUIRE(plan.cost() == 2);
  CHECK(plan.actions[0] == action(t, "(pick-up a)"));
  CHECK(plan.actions[1] == action(t, "(stack a b)"));
  CHECK(testing::bfs_distance(t, t.hypothesis(0).facts, 4) == 2);
}

TEST_CASE("plans validate and seeds diversify") {
  GeneratorConfig cfg{Family::blockwords, Setting::set2, 5, 1.0};
  std::set<std::vector<ActionId>> distinct;
  for (std::uint64_t i = 0; i < 10; ++i) {
    auto gt = gen_blockwords(cfg, i);
    const auto& goal = gt.task.hypothesis(*gt.task.true_goal());
    Plan plan = gbfs_plan(gt.task, goal, i, 1.0);
    CHECK(validate(gt.task, plan, goal).ok);
  }
  auto gt = gen_blockwords(cfg, 0);
  const auto& goal = gt.task.hypothesis(*gt.task.true_goal());
  for (std::uint64_t seed = 0; seed < 20; ++seed) distinct.insert(gbfs_plan(gt.task, goal, seed, 1.0).actions);
  CHECK(distinct.size() > 1);
  CHECK(gbfs_plan(gt.task, goal, 4, 1.0).actions == gbfs_plan(gt.task, goal, 4, 1.0).actions);
}

TEST_CASE("expansion budget") {
  GeneratorConfig cfg{Family::logistics, Setting::set2, 1, 0.5};
  auto gt = gen_logistics(cfg, 0);
  PlannerOptions tiny;
  tiny.max_expansions = 1;
  CHECK_THROWS_AS(gbfs_plan(gt.task, gt.task.hypothesis(0), 1, 0.0, tiny), NodeBudgetExceeded);
}

TEST_CASE("validate reports the failing step") {
  GroundTask t = testing::ground_three_blocks({{{"on", "a", "b"}}});
  Plan bad{{action(t, "(pick-up a)"), action(t, "(stack b a)")}};
  auto v = validate(t, bad, t.hypothesis(0));
  CHECK_FALSE(v.ok);
  CHECK(v.failed_step == 1);
  Plan short_plan{{action(t, "(pick-up a)")}};
  v = validate(t, short_plan, t.hypothesis(0));
  CHECK_FALSE(v.ok);
  CHECK(v.failed_step == 1);
  Plan good{{action(t, "(pick-up a)"), action(t, "(stack a b)")}};
  CHECK(validate(t, good, t.hypothesis(0)).ok);
}

}  // TEST_SUITE
