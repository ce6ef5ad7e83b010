#include "goalrec/planner.hpp"

#include <algorithm>
#include <array>
#include <queue>
#include <random>
#include <unordered_map>

namespace goalrec {

RelaxedPlanningGraph build_rpg(const GroundTask& task, const State& seed,
                               const std::vector<std::uint8_t>& disabled) {
  const std::size_t nf = task.num_facts();
  const std::size_t na = task.num_actions();
  auto is_disabled = [&](ActionId a) { return !disabled.empty() && disabled[a]; };

  RelaxedPlanningGraph g;
  g.fact_levels.assign(nf, kUnreachableLevel);
  g.action_levels.assign(na, kUnreachableLevel);
  g.best_supporter.assign(nf, std::nullopt);
  g.add_cost.assign(nf, kInfiniteCost);

  std::vector<std::uint32_t> pending(na);
  for (ActionId a = 0; a < na; ++a) pending[a] = static_cast<std::uint32_t>(task.action(a).pre.size());

  // Layered breadth-first propagation.
  std::vector<FactId> layer = seed.facts();
  for (FactId f : layer) g.fact_levels[f] = 0;
  std::vector<ActionId> ready;
  for (ActionId a = 0; a < na; ++a) {
    if (pending[a] == 0 && !is_disabled(a)) ready.push_back(a);
  }
  int level = 0;
  while (!layer.empty() || !ready.empty()) {
    for (FactId f : layer) {
      for (ActionId a : task.consumers(f)) {
        if (--pending[a] == 0 && !is_disabled(a)) ready.push_back(a);
      }
    }
    std::vector<FactId> next;
    for (ActionId a : ready) {
      g.action_levels[a] = level;
      for (FactId f : task.action(a).add) {
        if (g.fact_levels[f] == kUnreachableLevel) {
          g.fact_levels[f] = level + 1;
          next.push_back(f);
        }
      }
    }
    ready.clear();
    layer = std::move(next);
    ++level;
  }

  for (FactId f = 0; f < nf; ++f) {
    if (g.fact_levels[f] == 0 || g.fact_levels[f] == kUnreachableLevel) continue;
    for (ActionId a : task.achievers(f)) {  // ascending ids
      if (g.action_levels[a] == g.fact_levels[f] - 1) {
        g.best_supporter[f] = a;
        break;
      }
    }
  }

  // Additive costs by generalized Dijkstra.
  using Entry = std::pair<double, FactId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::vector<double> pre_sum(na, 0.0);
  for (ActionId a = 0; a < na; ++a) pending[a] = static_cast<std::uint32_t>(task.action(a).pre.size());
  std::vector<std::uint8_t> settled(nf, 0);
  auto fire = [&](ActionId a) {
    double c = 1.0 + pre_sum[a];
    for (FactId f : task.action(a).add) {
      if (c < g.add_cost[f]) {
        g.add_cost[f] = c;
        open.emplace(c, f);
      }
    }
  };
  for (FactId f : seed.facts()) {
    g.add_cost[f] = 0.0;
    open.emplace(0.0, f);
  }
  for (ActionId a = 0; a < na; ++a) {
    if (pending[a] == 0 && !is_disabled(a)) fire(a);
  }
  while (!open.empty()) {
    auto [c, f] = open.top();
    open.pop();
    if (settled[f] || c > g.add_cost[f]) continue;
    settled[f] = 1;
    for (ActionId a : task.consumers(f)) {
      pre_sum[a] += c;
      if (--pending[a] == 0 && !is_disabled(a)) fire(a);
    }
  }
  return g;
}

double h_add(const RelaxedPlanningGraph& rpg, const std::vector<FactId>& goal) {
  double total = 0.0;
  for (FactId f : goal) {
    if (rpg.add_cost[f] == kInfiniteCost) return kInfiniteCost;
    total += rpg.add_cost[f];
  }
  return total;
}

double h_max(const RelaxedPlanningGraph& rpg, const std::vector<FactId>& goal) {
  double best = 0.0;
  for (FactId f : goal) {
    if (rpg.fact_levels[f] == kUnreachableLevel) return kInfiniteCost;
    best = std::max(best, static_cast<double>(rpg.fact_levels[f]));
  }
  return best;
}

bool relaxed_reachable(const GroundTask& task, const State& seed, const std::vector<FactId>& goal,
                       const std::vector<std::uint8_t>& disabled) {
  const std::size_t nf = task.num_facts();
  std::vector<std::uint8_t> reached(nf, 0);
  std::vector<std::uint32_t> pending(task.num_actions());
  std::vector<FactId> stack;
  std::size_t goals_left = 0;
  std::vector<std::uint8_t> is_goal(nf, 0);
  for (FactId f : goal) {
    if (!is_goal[f]) {
      is_goal[f] = 1;
      ++goals_left;
    }
  }
  auto reach = [&](FactId f) {
    if (reached[f]) return;
    reached[f] = 1;
    if (is_goal[f]) --goals_left;
    stack.push_back(f);
  };
  auto fire = [&](ActionId a) {
    for (FactId f : task.action(a).add) reach(f);
  };
  for (FactId f : seed.facts()) reach(f);
  for (ActionId a = 0; a < task.num_actions(); ++a) {
    pending[a] = static_cast<std::uint32_t>(task.action(a).pre.size());
    if (pending[a] == 0 && (disabled.empty() || !disabled[a])) fire(a);
  }
  while (!stack.empty() && goals_left > 0) {
    FactId f = stack.back();
    stack.pop_back();
    for (ActionId a : task.consumers(f)) {
      if (--pending[a] == 0 && (disabled.empty() || !disabled[a])) fire(a);
    }
  }
  return goals_left == 0;
}

AdditiveHeuristic::AdditiveHeuristic(const GroundTask& task)
    : task_(task),
      fact_cost_(task.num_facts()),
      action_cost_(task.num_actions()),
      unsatisfied_(task.num_actions()),
      supporter_(task.num_facts(), -1),
      is_goal_(task.num_facts(), 0) {
  for (ActionId a = 0; a < task.num_actions(); ++a) {
    if (task.action(a).pre.empty()) no_pre_actions_.push_back(a);
  }
}

long long AdditiveHeuristic::evaluate(const State& s, const std::vector<FactId>& goal) {
  constexpr long long kInf = std::numeric_limits<long long>::max();
  std::fill(fact_cost_.begin(), fact_cost_.end(), kInf);
  std::fill(action_cost_.begin(), action_cost_.end(), 0);
  std::fill(supporter_.begin(), supporter_.end(), -1);
  for (ActionId a = 0; a < task_.num_actions(); ++a) {
    unsatisfied_[a] = static_cast<std::uint32_t>(task_.action(a).pre.size());
  }
  std::size_t goals_left = 0;
  for (FactId f : goal) {
    if (!is_goal_[f]) {
      is_goal_[f] = 1;
      ++goals_left;
    }
  }
  for (auto& b : buckets_) b.clear();
  auto push = [&](FactId f, long long c, std::int64_t via) {
    if (c >= fact_cost_[f]) return;
    fact_cost_[f] = c;
    supporter_[f] = via;
    auto idx = static_cast<std::size_t>(c);
    if (buckets_.size() <= idx) buckets_.resize(idx + 1);
    buckets_[idx].push_back(f);
  };
  for (FactId f : s.facts()) push(f, 0, -1);
  for (ActionId a : no_pre_actions_) {
    for (FactId f : task_.action(a).add) push(f, 1, a);
  }
  long long total = 0;
  for (std::size_t c = 0; c < buckets_.size() && goals_left > 0; ++c) {
    for (std::size_t i = 0; i < buckets_[c].size() && goals_left > 0; ++i) {
      FactId f = buckets_[c][i];
      if (fact_cost_[f] != static_cast<long long>(c)) continue;  // stale entry
      if (is_goal_[f] == 1) {
        is_goal_[f] = 2;
        total += static_cast<long long>(c);
        --goals_left;
      }
      for (ActionId a : task_.consumers(f)) {
        action_cost_[a] += static_cast<long long>(c);
        if (--unsatisfied_[a] == 0) {
          long long ac = action_cost_[a] + 1;
          for (FactId g : task_.action(a).add) push(g, ac, a);
        }
      }
    }
  }
  for (FactId f : goal) is_goal_[f] = 0;
  return goals_left == 0 ? total : -1;
}

std::vector<ActionId> AdditiveHeuristic::helpful_actions(const std::vector<FactId>& goal) const {
  std::vector<ActionId> helpful;
  std::vector<std::uint8_t> seen_fact(task_.num_facts(), 0), seen_action(task_.num_actions(), 0);
  std::vector<FactId> stack(goal.begin(), goal.end());
  while (!stack.empty()) {
    FactId f = stack.back();
    stack.pop_back();
    if (seen_fact[f]) continue;
    seen_fact[f] = 1;
    std::int64_t via = supporter_[f];
    if (via < 0 || seen_action[static_cast<std::size_t>(via)]) continue;
    auto a = static_cast<ActionId>(via);
    seen_action[a] = 1;
    bool applicable_now = true;
    for (FactId p : task_.action(a).pre) {
      if (fact_cost_[p] != 0) applicable_now = false;
      stack.push_back(p);
    }
    if (applicable_now) helpful.push_back(a);
  }
  std::sort(helpful.begin(), helpful.end());
  return helpful;
}

namespace {

struct SearchNode {
  State state;
  std::int64_t parent;
  ActionId via;
};

struct OpenEntry {
  double key;
  std::uint64_t tie;
  std::size_t node;
  bool operator>(const OpenEntry& o) const {
    if (key != o.key) return key > o.key;
    if (tie != o.tie) return tie > o.tie;
    return node > o.node;
  }
};

}  // namespace

Plan gbfs_plan(const GroundTask& task, const std::vector<FactId>& goal, std::uint64_t seed,
               double noise, const PlannerOptions& options) {
  if (holds(task.init(), goal)) return {};
  AdditiveHeuristic heuristic(task);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  long long h0 = heuristic.evaluate(task.init(), goal);
  if (h0 < 0) throw Unsolvable("goal is not reachable under delete relaxation");

  using OpenList = std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>>;
  std::vector<SearchNode> nodes;
  std::vector<std::uint8_t> closed;
  std::unordered_map<State, std::size_t, StateHash> seen;
  // open[0] holds every successor, open[1] those reached by helpful actions.
  std::array<OpenList, 2> open;
  std::array<long long, 2> priority{0, 0};
  constexpr long long kBoost = 1000;
  long long best_h = h0;
  nodes.push_back({task.init(), -1, 0});
  closed.push_back(0);
  seen.emplace(task.init(), 0);
  open[0].push({static_cast<double>(h0) + noise * unit(rng), rng(), 0});

  std::vector<ActionId> successors;
  std::size_t expansions = 0;
  while (!open[0].empty() || !open[1].empty()) {
    std::size_t q = 0;
    if (options.preferred_operators && !open[1].empty() && (open[0].empty() || priority[1] < priority[0])) q = 1;
    ++priority[q];
    std::size_t current = open[q].top().node;
    open[q].pop();
    if (closed[current]) continue;
    closed[current] = 1;
    if (++expansions > options.max_expansions) {
      throw NodeBudgetExceeded("search exceeded " + std::to_string(options.max_expansions) +
                               " expansions");
    }
    std::vector<ActionId> helpful;
    if (options.preferred_operators) {
      heuristic.evaluate(nodes[current].state, goal);
      helpful = heuristic.helpful_actions(goal);
    }
    successors.clear();
    for (ActionId a = 0; a < task.num_actions(); ++a) {
      if (applicable(task, nodes[current].state, a)) successors.push_back(a);
    }
    std::shuffle(successors.begin(), successors.end(), rng);
    for (ActionId a : successors) {
      State next = apply(task, nodes[current].state, a);
      if (seen.count(next)) continue;
      std::size_t id = nodes.size();
      nodes.push_back({next, static_cast<std::int64_t>(current), a});
      closed.push_back(0);
      seen.emplace(std::move(next), id);
      if (holds(nodes[id].state, goal)) {
        Plan plan;
        for (std::int64_t n = static_cast<std::int64_t>(id); nodes[static_cast<std::size_t>(n)].parent >= 0;
             n = nodes[static_cast<std::size_t>(n)].parent) {
          plan.actions.push_back(nodes[static_cast<std::size_t>(n)].via);
        }
        std::reverse(plan.actions.begin(), plan.actions.end());
        return plan;
      }
      long long h = heuristic.evaluate(nodes[id].state, goal);
      if (h < 0) continue;
      if (h < best_h) {
        best_h = h;
        priority[1] -= kBoost;
      }
      OpenEntry entry{static_cast<double>(h) + noise * unit(rng), rng(), id};
      open[0].push(entry);
      if (std::binary_search(helpful.begin(), helpful.end(), a)) open[1].push(entry);
    }
  }
  throw Unsolvable("search space exhausted without reaching the goal");
}

Plan gbfs_plan(const GroundTask& task, const GoalHypothesis& goal, std::uint64_t seed, double noise,
               const PlannerOptions& options) {
  return gbfs_plan(task, goal.facts, seed, noise, options);
}

Validation validate(const GroundTask& task, const Plan& plan, const std::vector<FactId>& goal) {
  State s = task.init();
  for (std::size_t i = 0; i < plan.actions.size(); ++i) {
    ActionId a = plan.actions[i];
    if (a >= task.num_actions() || !applicable(task, s, a)) return {false, i};
    s = apply(task, s, a);
  }
  if (!holds(s, goal)) return {false, plan.actions.size()};
  return {true, plan.actions.size()};
}

Validation validate(const GroundTask& task, const Plan& plan, const GoalHypothesis& goal) {
  return validate(task, plan, goal.facts);
}

}  // namespace goalrec
