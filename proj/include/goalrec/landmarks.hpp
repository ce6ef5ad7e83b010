#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "goalrec/strips.hpp"

namespace goalrec {

class UnreachableGoal : public Error {
 public:
  using Error::Error;
};

class BrokenPrefix : public Error {
 public:
  BrokenPrefix(std::size_t step, const std::string& what) : Error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Fact landmarks of one goal hypothesis with greedy-necessary orderings.
struct LandmarkGraph {
  std::size_t goal_index = 0;
  /// All landmarks, trivial ones included. Sorted.
  std::vector<FactId> landmarks;
  /// Landmarks already true in the initial state. Sorted subset of landmarks.
  std::vector<FactId> trivial;
  /// (before, after): `before` must hold before `after` is first achieved.
  std::vector<std::pair<FactId, FactId>> orderings;
  /// Goal fact -> non-trivial landmarks found by back-chaining from it
  /// (the goal fact itself included unless it is trivial).
  std::map<FactId, std::vector<FactId>> per_subgoal;

  bool is_landmark(FactId f) const;
  bool is_trivial(FactId f) const;
  std::vector<FactId> nontrivial() const;
};

LandmarkGraph extract_landmarks(const GroundTask& task, std::size_t hypothesis);

/// Every fact true in some state while replaying `trace` from the initial
/// state (the initial state included). Throws BrokenPrefix.
State observed_facts(const GroundTask& task, const std::vector<ActionId>& trace);

std::vector<FactId> achieved_landmarks(const GroundTask& task, const LandmarkGraph& graph,
                                       const ObservationTrace& trace);
std::vector<FactId> achieved_landmarks(const LandmarkGraph& graph, const State& observed);

/// One `landmark`/`trivial`/`order`/`subgoal` record per line.
std::string dump(const GroundTask& task, const LandmarkGraph& graph);

}  // namespace goalrec
