#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "goalrec/strips.hpp"

namespace goalrec {

inline constexpr int kUnreachableLevel = std::numeric_limits<int>::max();
inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

class Unsolvable : public Error {
 public:
  using Error::Error;
};

class NodeBudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Delete-relaxed exploration from a seed state. Levels are layer indices;
/// unreachable facts and actions hold kUnreachableLevel.
struct RelaxedPlanningGraph {
  std::vector<int> fact_levels;
  std::vector<int> action_levels;
  /// Lowest-id achiever among those applicable at the layer before the fact
  /// first appears; nullopt for seed and unreachable facts.
  std::vector<std::optional<ActionId>> best_supporter;
  /// Additive cost per fact: 0 in the seed, else min over achievers of
  /// 1 + sum of precondition costs.
  std::vector<double> add_cost;

  bool reachable(FactId f) const { return fact_levels[f] != kUnreachableLevel; }
};

/// `disabled`, when nonempty, has one entry per action; nonzero entries are
/// left out of the exploration.
RelaxedPlanningGraph build_rpg(const GroundTask& task, const State& seed,
                               const std::vector<std::uint8_t>& disabled = {});

double h_add(const RelaxedPlanningGraph& rpg, const std::vector<FactId>& goal);
double h_max(const RelaxedPlanningGraph& rpg, const std::vector<FactId>& goal);

/// True iff every goal fact is reachable under delete relaxation.
bool relaxed_reachable(const GroundTask& task, const State& seed, const std::vector<FactId>& goal,
                       const std::vector<std::uint8_t>& disabled = {});

/// Reusable h_add evaluator for search: integer unit costs, bucket queue,
/// stops once every goal fact is settled.
class AdditiveHeuristic {
 public:
  explicit AdditiveHeuristic(const GroundTask& task);
  /// Returns -1 when some goal fact is relaxed-unreachable.
  long long evaluate(const State& s, const std::vector<FactId>& goal);
  /// Actions applicable in `s` on the relaxed plan traced back from the goal
  /// through cheapest supporters; uses the tables of the last evaluate(s, goal).
  std::vector<ActionId> helpful_actions(const std::vector<FactId>& goal) const;

 private:
  const GroundTask& task_;
  std::vector<long long> fact_cost_;
  std::vector<long long> action_cost_;
  std::vector<std::uint32_t> unsatisfied_;
  std::vector<std::int64_t> supporter_;
  std::vector<std::uint8_t> is_goal_;
  std::vector<std::vector<FactId>> buckets_;
  std::vector<ActionId> no_pre_actions_;
};

struct Plan {
  std::vector<ActionId> actions;
  std::size_t cost() const { return actions.size(); }
};

struct PlannerOptions {
  std::size_t max_expansions = 1'000'000;
  /// Second open list of successors reached by helpful actions, boosted
  /// whenever the best h improves.
  bool preferred_operators = true;
};

/// Greedy best-first search on h_add. Open-list keys are h + noise * U[0,1)
/// with a random secondary key, so distinct seeds give distinct plans.
Plan gbfs_plan(const GroundTask& task, const std::vector<FactId>& goal, std::uint64_t seed,
               double noise = 0.0, const PlannerOptions& options = {});
Plan gbfs_plan(const GroundTask& task, const GoalHypothesis& goal, std::uint64_t seed,
               double noise = 0.0, const PlannerOptions& options = {});

struct Validation {
  bool ok = false;
  /// Index of the first inapplicable step, or the plan length when the
  /// final state misses the goal. Equal to the plan length on success.
  std::size_t failed_step = 0;
  explicit operator bool() const { return ok; }
};

Validation validate(const GroundTask& task, const Plan& plan, const std::vector<FactId>& goal);
Validation validate(const GroundTask& task, const Plan& plan, const GoalHypothesis& goal);

}  // namespace goalrec
