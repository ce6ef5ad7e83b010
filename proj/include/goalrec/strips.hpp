#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace goalrec {

using FactId = std::uint32_t;
using ActionId = std::uint32_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t col, std::string expected);
  std::size_t line() const { return line_; }
  std::size_t col() const { return col_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t line_;
  std::size_t col_;
  std::string expected_;
};

class UnknownType : public Error {
 public:
  using Error::Error;
};

class ArityMismatch : public Error {
 public:
  using Error::Error;
};

class UnknownPredicate : public ArityMismatch {
 public:
  using ArityMismatch::ArityMismatch;
};

class UndeclaredConstant : public Error {
 public:
  using Error::Error;
};

class EmptyHypothesisSet : public Error {
 public:
  using Error::Error;
};

class NotApplicable : public Error {
 public:
  NotApplicable(ActionId action, std::vector<FactId> missing, const std::string& what);
  ActionId action() const { return action_; }
  const std::vector<FactId>& missing() const { return missing_; }

 private:
  ActionId action_;
  std::vector<FactId> missing_;
};

struct Fact {
  std::string predicate;
  std::vector<std::string> args;
  FactId id = 0;

  /// "(on a b)"
  std::string str() const;
};

struct GroundAction {
  std::string name;
  std::vector<std::string> args;
  std::vector<FactId> pre;  // sorted, unique
  std::vector<FactId> add;
  std::vector<FactId> del;
  ActionId id = 0;

  std::string str() const;
};

/// Fixed-universe fact set stored as a packed bitset.
class State {
 public:
  State() = default;
  explicit State(std::size_t universe) : size_(universe), words_((universe + 63) / 64, 0) {}
  State(std::size_t universe, const std::vector<FactId>& facts);

  std::size_t universe() const { return size_; }
  bool contains(FactId f) const { return (words_[f >> 6] >> (f & 63)) & 1u; }
  void insert(FactId f) { words_[f >> 6] |= std::uint64_t{1} << (f & 63); }
  void erase(FactId f) { words_[f >> 6] &= ~(std::uint64_t{1} << (f & 63)); }
  std::size_t count() const;
  std::vector<FactId> facts() const;
  void unite(const State& other);

  bool operator==(const State& other) const = default;
  std::size_t hash() const;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct StateHash {
  std::size_t operator()(const State& s) const { return s.hash(); }
};

struct GoalHypothesis {
  std::string name;
  std::vector<FactId> facts;  // sorted, unique, nonempty
  double prior = 1.0;
};

/// Immutable grounded recognition environment: facts, actions, initial
/// state and the candidate goal set.
class GroundTask {
 public:
  GroundTask(std::vector<Fact> facts, std::vector<GroundAction> actions, std::vector<FactId> init,
             std::vector<GoalHypothesis> hypotheses, std::optional<std::size_t> true_goal);

  const std::vector<Fact>& facts() const { return facts_; }
  const std::vector<GroundAction>& actions() const { return actions_; }
  const Fact& fact(FactId f) const { return facts_.at(f); }
  const GroundAction& action(ActionId a) const { return actions_.at(a); }
  std::size_t num_facts() const { return facts_.size(); }
  std::size_t num_actions() const { return actions_.size(); }
  const State& init() const { return init_; }
  const std::vector<GoalHypothesis>& hypotheses() const { return hypotheses_; }
  const GoalHypothesis& hypothesis(std::size_t h) const { return hypotheses_.at(h); }
  std::optional<std::size_t> true_goal() const { return true_goal_; }
  std::vector<double> priors() const;

  /// Actions that list f as a precondition / add effect.
  const std::vector<ActionId>& consumers(FactId f) const { return consumers_[f]; }
  const std::vector<ActionId>& achievers(FactId f) const { return achievers_[f]; }

  std::optional<FactId> find_fact(std::string_view name) const;
  std::optional<ActionId> find_action(std::string_view name) const;

 private:
  std::vector<Fact> facts_;
  std::vector<GroundAction> actions_;
  State init_;
  std::vector<GoalHypothesis> hypotheses_;
  std::optional<std::size_t> true_goal_;
  std::vector<std::vector<ActionId>> consumers_;
  std::vector<std::vector<ActionId>> achievers_;
  std::unordered_map<std::string, FactId> fact_by_name_;
  std::unordered_map<std::string, ActionId> action_by_name_;
};

struct ObservationTrace {
  std::vector<ActionId> actions;
  std::optional<std::size_t> label;
};

/// Throws NotApplicable when a precondition is missing.
State apply(const GroundTask& task, const State& s, ActionId a);
bool applicable(const GroundTask& task, const State& s, ActionId a);
bool holds(const State& s, const GoalHypothesis& g);
bool holds(const State& s, const std::vector<FactId>& facts);

// ---------------------------------------------------------------------------
// Lifted model language

struct TypedName {
  std::string name;
  std::string type = "object";
  bool operator==(const TypedName&) const = default;
};

/// Predicate applied to variables ("?x") or constants.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;
  bool operator==(const Atom&) const = default;
};

struct PredicateSchema {
  std::string name;
  std::vector<TypedName> params;
  bool operator==(const PredicateSchema&) const = default;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedName> params;
  std::vector<Atom> pre;
  std::vector<Atom> add;
  std::vector<Atom> del;
  bool operator==(const ActionSchema&) const = default;
};

struct DomainSchema {
  std::string name;
  std::vector<TypedName> types;  // name + parent type
  std::vector<TypedName> constants;
  std::vector<PredicateSchema> predicates;
  std::vector<ActionSchema> actions;
  bool operator==(const DomainSchema&) const = default;

  const PredicateSchema* find_predicate(std::string_view name) const;
};

struct HypothesisSpec {
  std::string name;
  double prior = 1.0;
  std::vector<Atom> facts;
  bool operator==(const HypothesisSpec&) const = default;
};

struct ProblemSpec {
  std::string name;
  std::string domain;
  std::vector<TypedName> objects;
  std::vector<Atom> init;
  std::vector<HypothesisSpec> hypotheses;
  std::optional<std::size_t> true_goal;
  bool operator==(const ProblemSpec&) const = default;
};

DomainSchema parse_domain(std::string_view text);
ProblemSpec parse_problem(std::string_view text);
std::string to_text(const DomainSchema& domain);
std::string to_text(const ProblemSpec& problem);

struct GroundingOptions {
  bool prune_unreachable = true;
  /// Bind distinct objects to distinct parameters, as in (stack ?x ?y)
  /// never meaning (stack a a).
  bool distinct_parameters = true;
};

GroundTask ground(const DomainSchema& domain, const ProblemSpec& problem,
                  const GroundingOptions& options = {});

}  // namespace goalrec
