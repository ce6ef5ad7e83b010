#include "goalrec/strips.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

namespace goalrec {

namespace {

std::string atom_string(const std::string& head, const std::vector<std::string>& args) {
  std::string out = "(" + head;
  for (const auto& a : args) {
    out += ' ';
    out += a;
  }
  out += ')';
  return out;
}

void require_sorted_ids(std::vector<FactId>& ids, std::size_t universe, const char* what) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (!ids.empty() && ids.back() >= universe) {
    throw Error(std::string(what) + " references fact id out of range");
  }
}

}  // namespace

SyntaxError::SyntaxError(std::size_t line, std::size_t col, std::string expected)
    : Error("syntax error at " + std::to_string(line) + ":" + std::to_string(col) + ": expected " +
            expected),
      line_(line),
      col_(col),
      expected_(std::move(expected)) {}

NotApplicable::NotApplicable(ActionId action, std::vector<FactId> missing, const std::string& what)
    : Error(what), action_(action), missing_(std::move(missing)) {}

std::string Fact::str() const { return atom_string(predicate, args); }
std::string GroundAction::str() const { return atom_string(name, args); }

State::State(std::size_t universe, const std::vector<FactId>& facts) : State(universe) {
  for (FactId f : facts) {
    if (f >= universe) throw Error("state fact id out of range");
    insert(f);
  }
}

std::size_t State::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<FactId> State::facts() const {
  std::vector<FactId> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits) {
      int b = std::countr_zero(bits);
      out.push_back(static_cast<FactId>(w * 64 + static_cast<std::size_t>(b)));
      bits &= bits - 1;
    }
  }
  return out;
}

void State::unite(const State& other) {
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
}

std::size_t State::hash() const {
  // FNV-1a over the words
  std::uint64_t h = 1469598103934665603ull;
  for (auto w : words_) {
    h ^= w;
    h *= 1099511628211ull;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

GroundTask::GroundTask(std::vector<Fact> facts, std::vector<GroundAction> actions,
                       std::vector<FactId> init, std::vector<GoalHypothesis> hypotheses,
                       std::optional<std::size_t> true_goal)
    : facts_(std::move(facts)),
      actions_(std::move(actions)),
      hypotheses_(std::move(hypotheses)),
      true_goal_(true_goal) {
  const std::size_t n = facts_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (facts_[i].id != i) throw Error("fact ids must be contiguous from 0");
    if (!fact_by_name_.emplace(facts_[i].str(), static_cast<FactId>(i)).second) {
      throw Error("duplicate fact " + facts_[i].str());
    }
  }
  consumers_.resize(n);
  achievers_.resize(n);
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    auto& a = actions_[i];
    if (a.id != i) throw Error("action ids must be contiguous from 0");
    require_sorted_ids(a.pre, n, "precondition");
    require_sorted_ids(a.add, n, "add effect");
    require_sorted_ids(a.del, n, "delete effect");
    std::vector<FactId> del;
    std::set_difference(a.del.begin(), a.del.end(), a.add.begin(), a.add.end(),
                         std::back_inserter(del));
    a.del = std::move(del);
    for (FactId f : a.pre) consumers_[f].push_back(a.id);
    for (FactId f : a.add) achievers_[f].push_back(a.id);
    action_by_name_.emplace(a.str(), a.id);
  }
  init_ = State(n, init);
  if (hypotheses_.empty()) throw EmptyHypothesisSet("task has no goal hypotheses");
  double total = 0.0;
  for (auto& h : hypotheses_) {
    if (h.facts.empty()) throw Error("goal hypothesis '" + h.name + "' has no facts");
    if (!(h.prior >= 0.0) || !std::isfinite(h.prior)) {
      throw Error("goal hypothesis '" + h.name + "' has a negative prior");
    }
    require_sorted_ids(h.facts, n, "goal hypothesis");
    total += h.prior;
  }
  if (total <= 0.0) throw Error("hypothesis priors sum to zero");
  for (auto& h : hypotheses_) h.prior /= total;
  if (true_goal_ && *true_goal_ >= hypotheses_.size()) {
    throw Error("true goal index out of range");
  }
}

std::vector<double> GroundTask::priors() const {
  std::vector<double> p;
  p.reserve(hypotheses_.size());
  for (const auto& h : hypotheses_) p.push_back(h.prior);
  return p;
}

std::optional<FactId> GroundTask::find_fact(std::string_view name) const {
  auto it = fact_by_name_.find(std::string(name));
  if (it == fact_by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<ActionId> GroundTask::find_action(std::string_view name) const {
  auto it = action_by_name_.find(std::string(name));
  if (it == action_by_name_.end()) return std::nullopt;
  return it->second;
}

bool applicable(const GroundTask& task, const State& s, ActionId a) {
  const auto& act = task.action(a);
  return std::all_of(act.pre.begin(), act.pre.end(), [&](FactId f) { return s.contains(f); });
}

State apply(const GroundTask& task, const State& s, ActionId a) {
  if (a >= task.num_actions()) throw Error("action id out of range");
  const auto& act = task.action(a);
  std::vector<FactId> missing;
  for (FactId f : act.pre) {
    if (!s.contains(f)) missing.push_back(f);
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << act.str() << " is not applicable; missing";
    for (FactId f : missing) msg << ' ' << task.fact(f).str();
    throw NotApplicable(a, std::move(missing), msg.str());
  }
  State next = s;
  for (FactId f : act.del) next.erase(f);
  for (FactId f : act.add) next.insert(f);
  return next;
}

bool holds(const State& s, const std::vector<FactId>& facts) {
  return std::all_of(facts.begin(), facts.end(), [&](FactId f) { return s.contains(f); });
}

bool holds(const State& s, const GoalHypothesis& g) { return holds(s, g.facts); }

const PredicateSchema* DomainSchema::find_predicate(std::string_view pname) const {
  for (const auto& p : predicates) {
    if (p.name == pname) return &p;
  }
  return nullptr;
}

}  // namespace goalrec
