#include <doctest.h>

#include "goalrec/domains.hpp"
#include "support.hpp"

using namespace goalrec;
using testing::fact;

TEST_SUITE("domains") {

TEST_CASE("family and setting names") {
  for (auto f : {Family::blockwords, Family::logistics, Family::grid, Family::buy}) {
    CHECK(parse_family(to_string(f)) == f);
  }
  CHECK(parse_setting(to_string(Setting::set2)) == Setting::set2);
  CHECK_THROWS(parse_family("chess"));
}

TEST_CASE("block-words set1: two long towers differing at the top") {
  GeneratorConfig cfg{Family::blockwords, Setting::set1, 1, 1.0};
  auto gt = gen_blockwords(cfg, 0);
  const auto& t = gt.task;
  REQUIRE(t.hypotheses().size() == 2);
  CHECK(gt.problem.objects.size() == 24);
  const auto& a = t.hypothesis(0).facts;
  const auto& b = t.hypothesis(1).facts;
  CHECK(a.size() == 24);
  CHECK(b.size() == 24);
  std::vector<FactId> only_a;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a));
  CHECK(only_a.size() == 2);  // clear and on for the top block
  CHECK(t.priors()[0] == doctest::Approx(kSkewedPriorMajor));
  // Same hypotheses on every instance, different starting towers.
  auto other = gen_blockwords(cfg, 1);
  CHECK(other.task.hypothesis(0).facts == a);
  CHECK_FALSE(other.problem.init == gt.problem.init);
}

TEST_CASE("block-words set2: five words") {
  GeneratorConfig cfg{Family::blockwords, Setting::set2, 1, 1.0};
  auto gt = gen_blockwords(cfg, 0);
  REQUIRE(gt.task.hypotheses().size() == 5);
  for (const auto& h : gt.task.hypotheses()) {
    CHECK(h.facts.size() >= 4);  // 3 letters: clear, 2 on, ontable
    CHECK(h.facts.size() <= 7);
  }
  for (double p : gt.task.priors()) CHECK(p == doctest::Approx(0.2));
  CHECK_THROWS_AS(gen_blockwords({Family::blockwords, Setting::set2, 1, 0.2}, 0), ScaleTooSmall);
}

TEST_CASE("word goals") {
  auto g = word_goal({"c", "a", "t"});
  REQUIRE(g.size() == 4);
  CHECK(g[0] == Atom{"clear", {"c"}});
  CHECK(g[1] == Atom{"on", {"c", "a"}});
  CHECK(g[3] == Atom{"ontable", {"t"}});
}

TEST_CASE("logistics set1 shares one initial state") {
  GeneratorConfig cfg{Family::logistics, Setting::set1, 3, 0.3};
  auto a = gen_logistics(cfg, 0);
  auto b = gen_logistics(cfg, 7);
  CHECK(a.problem.init == b.problem.init);
  CHECK(a.problem.hypotheses == b.problem.hypotheses);
  CHECK(a.task.hypotheses().size() == 2);
}

TEST_CASE("logistics set2 has ten distinct assignments") {
  GeneratorConfig cfg{Family::logistics, Setting::set2, 3, 0.3};
  auto a = gen_logistics(cfg, 0);
  REQUIRE(a.task.hypotheses().size() == 10);
  std::set<std::vector<FactId>> distinct;
  for (const auto& h : a.task.hypotheses()) distinct.insert(h.facts);
  CHECK(distinct.size() == 10);
  CHECK(hypothesis_count(cfg) == 10);
}

TEST_CASE("open 3x3 grid: the far corner is four moves away") {
  GridLayout layout;
  layout.side = 3;
  layout.goals = {{2, 2}, {1, 2}};
  GroundTask t = ground(*grid_domain(), make_grid_problem(layout));
  CHECK(testing::bfs_distance(t, t.hypothesis(0).facts, 6) == 4);
  CHECK(testing::bfs_distance(t, t.hypothesis(1).facts, 6) == 3);
}

TEST_CASE("a locked cell needs the key first") {
  GridLayout layout;
  layout.side = 3;
  layout.locked = {{1, 0}, {1, 1}, {1, 2}};  // wall of locks down the middle
  layout.keys = {{0, 2}};
  layout.goals = {{2, 0}};
  GroundTask t = ground(*grid_domain(), make_grid_problem(layout));
  // Walk to the key (2), pick it up, walk back (2), unlock + enter, step: 8.
  // The unlocked neighbour route: key at (0,2), unlock (1,2) from there.
  int d = testing::bfs_distance(t, t.hypothesis(0).facts, 10);
  CHECK(d > 2);
  GridLayout open = layout;
  open.locked.clear();
  CHECK(testing::bfs_distance(ground(*grid_domain(), make_grid_problem(open)), t.hypothesis(0).facts, 10) == 2);
}

TEST_CASE("grid generators") {
  GeneratorConfig set1{Family::grid, Setting::set1, 2, 1.0};
  auto g1 = gen_grid(set1, 0);
  CHECK(g1.task.hypotheses().size() == 2);
  CHECK(g1.problem.hypotheses[0].name == "goal-" + grid_cell(11, 11));
  GeneratorConfig set2{Family::grid, Setting::set2, 2, 1.0};
  auto g2 = gen_grid(set2, 0);
  CHECK(g2.task.hypotheses().size() == 10);
  CHECK(gen_grid(set2, 1).problem.hypotheses == g2.problem.hypotheses);
}

TEST_CASE("generators are deterministic") {
  for (auto f : {Family::blockwords, Family::logistics, Family::grid}) {
    GeneratorConfig cfg{f, Setting::set2, 5, 0.4};
    CHECK(generate_task(cfg, 3).problem == generate_task(cfg, 3).problem);
  }
}

TEST_CASE("buy set1: the savings marker appears exactly for the house") {
  GeneratorConfig cfg{Family::buy, Setting::set1, 1, 1.0};
  auto data = gen_buy(cfg, 300);
  CHECK(data.vocabulary.size() == 6);
  CHECK(data.hypotheses.size() == 2);
  for (const auto& tr : data.traces) {
    bool marker = std::find(tr.actions.begin(), tr.actions.end(), 1u) != tr.actions.end();
    CHECK(marker == (tr.label == 0));
    CHECK(tr.actions.back() == 4 + tr.label);
    for (auto a : tr.actions) CHECK(a < data.vocabulary.size());
  }
}

TEST_CASE("buy set2") {
  GeneratorConfig cfg{Family::buy, Setting::set2, 1, 1.0};
  auto data = gen_buy(cfg, 100);
  CHECK(data.vocabulary.size() == 25);
  CHECK(data.hypotheses.size() == 10);
  for (const auto& tr : data.traces) CHECK(tr.actions.back() == 15 + tr.label);
}

TEST_CASE("set1 goal draws follow the skewed prior") {
  GeneratorConfig buy{Family::buy, Setting::set1, 21, 1.0};
  auto data = gen_buy(buy, 1000);
  double house = 0;
  for (const auto& tr : data.traces) house += tr.label == 0;
  CHECK(house / 1000.0 >= 0.75);
  CHECK(house / 1000.0 <= 0.85);
}

TEST_CASE("seed mixing") {
  CHECK(mix_seed(1, 2) == mix_seed(1, 2));
  CHECK(mix_seed(1, 2) != mix_seed(2, 1));
  CHECK(mix_seed(0, 0) != 0);
}

}  // TEST_SUITE
