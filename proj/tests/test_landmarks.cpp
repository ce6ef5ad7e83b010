#include <doctest.h>

#include "goalrec/landmarks.hpp"
#include "support.hpp"

using namespace goalrec;
using testing::action;
using testing::fact;

TEST_SUITE("landmarks") {

TEST_CASE("goal already true yields only trivial landmarks") {
  GroundTask t = testing::ground_three_blocks({{{"ontable", "a"}, {"clear", "c"}}});
  auto lg = extract_landmarks(t, 0);
  CHECK(lg.landmarks == t.hypothesis(0).facts);
  CHECK(lg.trivial == lg.landmarks);
  CHECK(lg.nontrivial().empty());
}

TEST_CASE("holding a is a landmark of on a b") {
  GroundTask t = testing::ground_three_blocks({{{"on", "a", "b"}}});
  auto lg = extract_landmarks(t, 0);
  const FactId holding = fact(t, "(holding a)");
  CHECK(lg.is_landmark(holding));
  CHECK_FALSE(lg.is_trivial(holding));
  CHECK(lg.is_landmark(fact(t, "(on a b)")));
  // Exhaustive oracle: no plan of length <= 6 reaches the goal avoiding it.
  CHECK_FALSE(testing::goal_reachable_avoiding(t, t.hypothesis(0).facts, holding, 6));
  // And a fact that plans can avoid is not reported.
  CHECK_FALSE(lg.is_landmark(fact(t, "(holding c)")));
}

TEST_CASE("structure invariants") {
  GeneratorConfig cfg{Family::blockwords, Setting::set2, 3, 1.0};
  auto gt = gen_blockwords(cfg, 2);
  for (std::size_t h = 0; h < gt.task.hypotheses().size(); ++h) {
    auto lg = extract_landmarks(gt.task, h);
    CHECK(std::is_sorted(lg.landmarks.begin(), lg.landmarks.end()));
    for (FactId g : gt.task.hypothesis(h).facts) CHECK(lg.is_landmark(g));
    for (FactId f : lg.trivial) {
      CHECK(gt.task.init().contains(f));
      CHECK(lg.is_landmark(f));
    }
    for (const auto& [goal, lms] : lg.per_subgoal) {
      for (FactId f : lms) CHECK_FALSE(lg.is_trivial(f));
    }
    // Orderings acyclic: a topological order exists.
    std::map<FactId, int> indegree;
    std::multimap<FactId, FactId> out;
    for (auto [a, b] : lg.orderings) {
      ++indegree[b];
      indegree.emplace(a, 0);
      out.emplace(a, b);
    }
    std::vector<FactId> ready;
    for (auto [f, d] : indegree) {
      if (d == 0) ready.push_back(f);
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
      FactId f = ready.back();
      ready.pop_back();
      ++visited;
      auto [lo, hi] = out.equal_range(f);
      for (auto it = lo; it != hi; ++it) {
        if (--indegree[it->second] == 0) ready.push_back(it->second);
      }
    }
    CHECK(visited == indegree.size());
    // Deterministic.
    auto again = extract_landmarks(gt.task, h);
    CHECK(again.landmarks == lg.landmarks);
    CHECK(again.orderings == lg.orderings);
  }
}

TEST_CASE("every landmark is relaxed-necessary") {
  GeneratorConfig cfg{Family::logistics, Setting::set2, 2, 0.3};
  auto gt = gen_logistics(cfg, 1);
  const auto& t = gt.task;
  for (std::size_t h = 0; h < 3; ++h) {
    auto lg = extract_landmarks(t, h);
    for (FactId f : lg.nontrivial()) {
      std::vector<std::uint8_t> disabled(t.num_actions(), 0);
      for (ActionId a : t.achievers(f)) disabled[a] = 1;
      CHECK_FALSE(relaxed_reachable(t, t.init(), t.hypothesis(h).facts, disabled));
    }
  }
}

TEST_CASE("unreachable goal") {
  DomainSchema d = parse_domain("(define (domain d) (:predicates (p) (q) (r))"
                                " (:action a :parameters () :precondition (and (p)) :effect (q)))");
  ProblemSpec p;
  p.init = {{"p", {}}};
  p.hypotheses = {{"g", 1.0, {{"r", {}}}}};
  GroundTask t = ground(d, p, {false});
  CHECK_THROWS_AS(extract_landmarks(t, 0), UnreachableGoal);
}

TEST_CASE("achieved landmarks") {
  GroundTask t = testing::ground_three_blocks({{{"on", "a", "b"}}});
  auto lg = extract_landmarks(t, 0);
  SUBCASE("no observations") {
    CHECK(achieved_landmarks(t, lg, ObservationTrace{}).empty());
  }
  SUBCASE("pick-up a") {
    ObservationTrace o{{action(t, "(pick-up a)")}, std::nullopt};
    CHECK(achieved_landmarks(t, lg, o) == std::vector<FactId>{fact(t, "(holding a)")});
  }
  SUBCASE("full plan achieves everything") {
    ObservationTrace o{{action(t, "(pick-up a)"), action(t, "(stack a b)")}, std::nullopt};
    CHECK(achieved_landmarks(t, lg, o) == lg.nontrivial());
  }
  SUBCASE("broken prefix") {
    ObservationTrace o{{action(t, "(pick-up a)"), action(t, "(pick-up b)")}, std::nullopt};
    try {
      achieved_landmarks(t, lg, o);
      FAIL("expected BrokenPrefix");
    } catch (const BrokenPrefix& e) {
      CHECK(e.step() == 1);
    }
  }
}

TEST_CASE("achieved landmarks grow with the prefix") {
  GeneratorConfig cfg{Family::blockwords, Setting::set2, 9, 1.0};
  auto gt = gen_blockwords(cfg, 4);
  const auto& t = gt.task;
  std::size_t label = *t.true_goal();
  Plan plan = gbfs_plan(t, t.hypothesis(label), 2, 1.0);
  auto lg = extract_landmarks(t, label);
  std::vector<FactId> previous;
  for (std::size_t k = 0; k <= plan.actions.size(); ++k) {
    ObservationTrace o{{plan.actions.begin(), plan.actions.begin() + static_cast<std::ptrdiff_t>(k)}, label};
    auto now = achieved_landmarks(t, lg, o);
    CHECK(std::includes(now.begin(), now.end(), previous.begin(), previous.end()));
    previous = now;
  }
  CHECK(previous == lg.nontrivial());
}

TEST_CASE("dump lists every landmark") {
  GroundTask t = testing::ground_three_blocks({{{"on", "a", "b"}}});
  auto lg = extract_landmarks(t, 0);
  std::string text = dump(t, lg);
  CHECK(text.find("(holding a)") != std::string::npos);
  CHECK(text.find("(on a b)") != std::string::npos);
}

}  // TEST_SUITE
