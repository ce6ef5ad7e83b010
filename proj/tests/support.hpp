// Fixtures and brute-force oracles shared by the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <unordered_map>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "goalrec/domains.hpp"
#include "goalrec/planner.hpp"
#include "goalrec/strips.hpp"

namespace testing {

using namespace goalrec;

/// 3-block instance with every block on the table and the given goals, each
/// goal a list of atoms written as {"on", "a", "b"}.
inline ProblemSpec three_blocks(const std::vector<std::vector<std::vector<std::string>>>& goals,
                                const std::vector<double>& priors = {}) {
  ProblemSpec p;
  p.name = "three";
  p.domain = "blocksworld";
  for (std::string b : {"a", "b", "c"}) {
    p.objects.push_back({b, "block"});
    p.init.push_back({"ontable", {b}});
    p.init.push_back({"clear", {b}});
  }
  p.init.push_back({"handempty", {}});
  for (std::size_t h = 0; h < goals.size(); ++h) {
    HypothesisSpec hs;
    hs.name = "g" + std::to_string(h);
    hs.prior = priors.empty() ? 1.0 : priors[h];
    for (const auto& atom : goals[h]) {
      hs.facts.push_back({atom.front(), {atom.begin() + 1, atom.end()}});
    }
    p.hypotheses.push_back(std::move(hs));
  }
  return p;
}

inline GroundTask ground_three_blocks(const std::vector<std::vector<std::vector<std::string>>>& goals,
                                      const std::vector<double>& priors = {}) {
  return ground(*blocksworld_domain(), three_blocks(goals, priors));
}

inline FactId fact(const GroundTask& t, const std::string& name) { return t.find_fact(name).value(); }
inline ActionId action(const GroundTask& t, const std::string& name) { return t.find_action(name).value(); }

/// Relaxed exploration by repeated sweeps: level of a fact is the first
/// sweep in which some action with all preconditions known adds it.
inline std::vector<int> brute_relaxed_levels(const GroundTask& task, const State& seed) {
  const int inf = std::numeric_limits<int>::max();
  std::vector<int> level(task.num_facts(), inf);
  for (FactId f : seed.facts()) level[f] = 0;
  for (int layer = 1;; ++layer) {
    std::vector<FactId> fresh;
    for (const auto& a : task.actions()) {
      bool ok = std::all_of(a.pre.begin(), a.pre.end(), [&](FactId p) { return level[p] < layer; });
      if (!ok) continue;
      for (FactId f : a.add) {
        if (level[f] == inf) fresh.push_back(f);
      }
    }
    if (fresh.empty()) break;
    for (FactId f : fresh) level[f] = layer;
  }
  return level;
}

/// Additive and max costs by Bellman-Ford style fixpoint iteration.
struct DpCosts {
  std::vector<double> add, max;
};

inline DpCosts dp_costs(const GroundTask& task, const State& seed) {
  const double inf = std::numeric_limits<double>::infinity();
  DpCosts c{std::vector<double>(task.num_facts(), inf), std::vector<double>(task.num_facts(), inf)};
  for (FactId f : seed.facts()) c.add[f] = c.max[f] = 0.0;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& a : task.actions()) {
      double sum = 0.0, mx = 0.0;
      for (FactId p : a.pre) {
        sum += c.add[p];
        mx = std::max(mx, c.max[p]);
      }
      for (FactId f : a.add) {
        if (sum + 1.0 < c.add[f]) c.add[f] = sum + 1.0, changed = true;
        if (mx + 1.0 < c.max[f]) c.max[f] = mx + 1.0, changed = true;
      }
    }
  }
  return c;
}

/// Shortest plan length by breadth-first search, or -1 within `bound`.
inline int bfs_distance(const GroundTask& task, const std::vector<FactId>& goal, int bound) {
  std::unordered_map<State, int, StateHash> dist{{task.init(), 0}};
  std::deque<State> queue{task.init()};
  while (!queue.empty()) {
    State s = queue.front();
    queue.pop_front();
    int d = dist[s];
    if (holds(s, goal)) return d;
    if (d == bound) continue;
    for (ActionId a = 0; a < task.num_actions(); ++a) {
      if (!applicable(task, s, a)) continue;
      State n = apply(task, s, a);
      if (dist.emplace(n, d + 1).second) queue.push_back(std::move(n));
    }
  }
  return -1;
}

/// True when some plan of length <= bound reaches `goal` without any state
/// on the way (initial state included) containing `avoid`. A fact that no
/// such plan can avoid is a landmark up to the bound.
inline bool goal_reachable_avoiding(const GroundTask& task, const std::vector<FactId>& goal, FactId avoid,
                                    int bound) {
  if (task.init().contains(avoid)) return false;
  std::unordered_map<State, int, StateHash> dist{{task.init(), 0}};
  std::deque<State> queue{task.init()};
  while (!queue.empty()) {
    State s = queue.front();
    queue.pop_front();
    int d = dist[s];
    if (holds(s, goal)) return true;
    if (d == bound) continue;
    for (ActionId a = 0; a < task.num_actions(); ++a) {
      if (!applicable(task, s, a)) continue;
      State n = apply(task, s, a);
      if (n.contains(avoid)) continue;
      if (dist.emplace(n, d + 1).second) queue.push_back(std::move(n));
    }
  }
  return false;
}

/// Small random propositional task: `n_facts` facts p0..pN, random actions
/// with 1-2 preconditions, 1-2 adds and up to one delete, a random initial
/// state and one goal of 1-2 facts. Built through the parser and grounder
/// with 0-ary predicates so the whole front end is exercised.
inline std::pair<DomainSchema, ProblemSpec> random_propositional(std::mt19937_64& rng, std::size_t n_facts,
                                                                 std::size_t n_actions) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto name = [](std::size_t i) { return "p" + std::to_string(i); };
  DomainSchema d;
  d.name = "random";
  for (std::size_t i = 0; i < n_facts; ++i) d.predicates.push_back({name(i), {}});
  for (std::size_t k = 0; k < n_actions; ++k) {
    ActionSchema a;
    a.name = "a" + std::to_string(k);
    std::set<std::size_t> pre, add, del;
    for (std::size_t j = 1 + pick(2); j > 0; --j) pre.insert(pick(n_facts));
    for (std::size_t j = 1 + pick(2); j > 0; --j) add.insert(pick(n_facts));
    if (pick(2)) del.insert(*std::next(pre.begin(), static_cast<std::ptrdiff_t>(pick(pre.size()))));
    for (auto f : add) del.erase(f);
    for (auto f : pre) a.pre.push_back({name(f), {}});
    for (auto f : add) a.add.push_back({name(f), {}});
    for (auto f : del) a.del.push_back({name(f), {}});
    d.actions.push_back(std::move(a));
  }
  ProblemSpec p;
  p.name = "random";
  p.domain = "random";
  std::set<std::size_t> init{pick(n_facts)};
  for (std::size_t j = pick(3); j > 0; --j) init.insert(pick(n_facts));
  for (auto f : init) p.init.push_back({name(f), {}});
  HypothesisSpec g;
  g.name = "goal";
  std::set<std::size_t> goal{pick(n_facts)};
  if (pick(2)) goal.insert(pick(n_facts));
  for (auto f : goal) g.facts.push_back({name(f), {}});
  p.hypotheses.push_back(std::move(g));
  return {std::move(d), std::move(p)};
}

}  // namespace testing
