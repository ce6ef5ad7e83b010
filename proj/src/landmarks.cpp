#include "goalrec/landmarks.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "goalrec/planner.hpp"

namespace goalrec {

namespace {

/// Facts reachable from `seed` under delete relaxation without `disabled`.
std::vector<std::uint8_t> relaxed_closure(const GroundTask& task, const State& seed,
                                          const std::vector<std::uint8_t>& disabled) {
  std::vector<std::uint8_t> reached(task.num_facts(), 0);
  std::vector<std::uint32_t> pending(task.num_actions());
  std::vector<FactId> stack;
  auto fire = [&](ActionId a) {
    for (FactId f : task.action(a).add) {
      if (!reached[f]) {
        reached[f] = 1;
        stack.push_back(f);
      }
    }
  };
  for (FactId f : seed.facts()) {
    reached[f] = 1;
    stack.push_back(f);
  }
  for (ActionId a = 0; a < task.num_actions(); ++a) {
    pending[a] = static_cast<std::uint32_t>(task.action(a).pre.size());
    if (pending[a] == 0 && !disabled[a]) fire(a);
  }
  while (!stack.empty()) {
    FactId f = stack.back();
    stack.pop_back();
    for (ActionId a : task.consumers(f)) {
      if (--pending[a] == 0 && !disabled[a]) fire(a);
    }
  }
  return reached;
}

class Extractor {
 public:
  Extractor(const GroundTask& task, std::size_t hypothesis)
      : task_(task), mask_(task.num_actions(), 0) {
    graph_.goal_index = hypothesis;
  }

  LandmarkGraph run() {
    const auto& goal = task_.hypothesis(graph_.goal_index).facts;
    if (!relaxed_reachable(task_, task_.init(), goal)) {
      throw UnreachableGoal("hypothesis '" + task_.hypothesis(graph_.goal_index).name +
                            "' is not reachable under delete relaxation");
    }
    for (FactId g : goal) back_chain(g);

    graph_.landmarks.assign(all_.begin(), all_.end());
    for (FactId f : graph_.landmarks) {
      if (task_.init().contains(f)) graph_.trivial.push_back(f);
    }
    graph_.orderings.assign(edges_.begin(), edges_.end());
    return std::move(graph_);
  }

 private:
  void back_chain(FactId subgoal) {
    all_.insert(subgoal);
    auto& mine = graph_.per_subgoal[subgoal];
    if (task_.init().contains(subgoal)) return;
    std::set<FactId> found{subgoal};
    std::deque<FactId> queue{subgoal};
    while (!queue.empty()) {
      FactId lm = queue.front();
      queue.pop_front();
      for (FactId c : shared_first_achiever_preconditions(lm)) {
        if (task_.init().contains(c)) {
          all_.insert(c);
          add_ordering(c, lm);
          continue;
        }
        if (found.count(c)) {
          add_ordering(c, lm);
          continue;
        }
        if (!necessary(c, subgoal)) continue;
        found.insert(c);
        all_.insert(c);
        add_ordering(c, lm);
        queue.push_back(c);
      }
    }
    mine.assign(found.begin(), found.end());
  }

  /// Intersection of preconditions over achievers of `lm` that are
  /// applicable before `lm` can first become true.
  std::vector<FactId> shared_first_achiever_preconditions(FactId lm) {
    const auto& achievers = task_.achievers(lm);
    for (ActionId a : achievers) mask_[a] = 1;
    auto reached = relaxed_closure(task_, task_.init(), mask_);
    for (ActionId a : achievers) mask_[a] = 0;

    std::vector<FactId> shared;
    bool first = true;
    for (ActionId a : achievers) {
      const auto& pre = task_.action(a).pre;
      if (!std::all_of(pre.begin(), pre.end(), [&](FactId f) { return reached[f]; })) continue;
      if (first) {
        shared = pre;
        first = false;
      } else {
        std::vector<FactId> next;
        std::set_intersection(shared.begin(), shared.end(), pre.begin(), pre.end(),
                              std::back_inserter(next));
        shared = std::move(next);
      }
      if (shared.empty()) break;
    }
    shared.erase(std::remove(shared.begin(), shared.end(), lm), shared.end());
    return shared;
  }

  /// Relaxed necessity: without any achiever of `f`, `subgoal` is unreachable.
  bool necessary(FactId f, FactId subgoal) {
    auto key = std::make_pair(f, subgoal);
    if (auto it = verdicts_.find(key); it != verdicts_.end()) return it->second;
    const auto& achievers = task_.achievers(f);
    for (ActionId a : achievers) mask_[a] = 1;
    bool reachable = relaxed_reachable(task_, task_.init(), {subgoal}, mask_);
    for (ActionId a : achievers) mask_[a] = 0;
    verdicts_[key] = !reachable;
    return !reachable;
  }

  void add_ordering(FactId before, FactId after) {
    if (before == after || edges_.count({before, after})) return;
    if (path_exists(after, before)) return;
    edges_.insert({before, after});
  }

  bool path_exists(FactId from, FactId to) const {
    std::vector<FactId> stack{from};
    std::set<FactId> visited{from};
    while (!stack.empty()) {
      FactId f = stack.back();
      stack.pop_back();
      if (f == to) return true;
      for (auto it = edges_.lower_bound({f, 0}); it != edges_.end() && it->first == f; ++it) {
        if (visited.insert(it->second).second) stack.push_back(it->second);
      }
    }
    return false;
  }

  const GroundTask& task_;
  std::vector<std::uint8_t> mask_;
  LandmarkGraph graph_;
  std::set<FactId> all_;
  std::set<std::pair<FactId, FactId>> edges_;
  std::map<std::pair<FactId, FactId>, bool> verdicts_;
};

}  // namespace

bool LandmarkGraph::is_landmark(FactId f) const {
  return std::binary_search(landmarks.begin(), landmarks.end(), f);
}

bool LandmarkGraph::is_trivial(FactId f) const {
  return std::binary_search(trivial.begin(), trivial.end(), f);
}

std::vector<FactId> LandmarkGraph::nontrivial() const {
  std::vector<FactId> out;
  std::set_difference(landmarks.begin(), landmarks.end(), trivial.begin(), trivial.end(),
                      std::back_inserter(out));
  return out;
}

LandmarkGraph extract_landmarks(const GroundTask& task, std::size_t hypothesis) {
  if (hypothesis >= task.hypotheses().size()) throw Error("hypothesis index out of range");
  return Extractor(task, hypothesis).run();
}

State observed_facts(const GroundTask& task, const std::vector<ActionId>& trace) {
  State seen = task.init();
  State s = task.init();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    ActionId a = trace[i];
    if (a >= task.num_actions() || !applicable(task, s, a)) {
      throw BrokenPrefix(i, "observation " + std::to_string(i) + " is not applicable in replay");
    }
    s = apply(task, s, a);
    seen.unite(s);
  }
  return seen;
}

std::vector<FactId> achieved_landmarks(const LandmarkGraph& graph, const State& observed) {
  std::vector<FactId> out;
  for (FactId f : graph.landmarks) {
    if (!graph.is_trivial(f) && observed.contains(f)) out.push_back(f);
  }
  return out;
}

std::vector<FactId> achieved_landmarks(const GroundTask& task, const LandmarkGraph& graph,
                                       const ObservationTrace& trace) {
  return achieved_landmarks(graph, observed_facts(task, trace.actions));
}

std::string dump(const GroundTask& task, const LandmarkGraph& graph) {
  std::ostringstream out;
  out << "goal " << task.hypothesis(graph.goal_index).name << '\n';
  for (FactId f : graph.landmarks) {
    out << (graph.is_trivial(f) ? "trivial " : "landmark ") << task.fact(f).str() << '\n';
  }
  for (const auto& [a, b] : graph.orderings) {
    out << "order " << task.fact(a).str() << ' ' << task.fact(b).str() << '\n';
  }
  for (const auto& [g, lms] : graph.per_subgoal) {
    out << "subgoal " << task.fact(g).str();
    for (FactId f : lms) out << ' ' << task.fact(f).str();
    out << '\n';
  }
  return out.str();
}

}  // namespace goalrec
