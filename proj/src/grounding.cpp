#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "goalrec/strips.hpp"

namespace goalrec {

namespace {

using AtomKey = std::pair<std::string, std::vector<std::string>>;

struct AtomKeyHash {
  std::size_t operator()(const AtomKey& k) const {
    std::size_t h = std::hash<std::string>{}(k.first);
    for (const auto& a : k.second) h = h * 1000003u ^ std::hash<std::string>{}(a);
    return h;
  }
};

class TypeHierarchy {
 public:
  explicit TypeHierarchy(const std::vector<TypedName>& types) {
    parent_["object"] = "";
    for (const auto& t : types) parent_[t.name] = t.type;
  }

  bool known(const std::string& t) const { return parent_.count(t) > 0; }

  bool is_subtype(std::string t, const std::string& target) const {
    for (int guard = 0; guard < 1000 && !t.empty(); ++guard) {
      if (t == target) return true;
      auto it = parent_.find(t);
      if (it == parent_.end()) return false;
      t = it->second;
    }
    return false;
  }

 private:
  std::map<std::string, std::string> parent_;
};

/// Interns ground atoms and remembers which ones are reachable.
class AtomTable {
 public:
  int intern(AtomKey key) {
    auto [it, inserted] = ids_.emplace(std::move(key), static_cast<int>(keys_.size()));
    if (inserted) keys_.push_back(&it->first);
    return it->second;
  }
  const AtomKey& key(int id) const { return *keys_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return keys_.size(); }

 private:
  std::unordered_map<AtomKey, int, AtomKeyHash> ids_;
  std::vector<const AtomKey*> keys_;
};

struct RawAction {
  const ActionSchema* schema;
  std::vector<std::string> args;
  std::vector<int> pre;
  std::vector<int> add;
  std::vector<int> del;
};

void check_ground_atom(const DomainSchema& d, const Atom& a,
                       const std::unordered_map<std::string, std::string>& object_types,
                       const TypeHierarchy& types, const std::string& where) {
  const auto* p = d.find_predicate(a.predicate);
  if (!p) throw UnknownPredicate("undeclared predicate '" + a.predicate + "' in " + where);
  if (p->params.size() != a.args.size()) {
    throw ArityMismatch("predicate '" + a.predicate + "' expects " +
                        std::to_string(p->params.size()) + " arguments in " + where);
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    auto it = object_types.find(a.args[i]);
    if (it == object_types.end()) {
      throw UndeclaredConstant("undeclared constant '" + a.args[i] + "' in " + where);
    }
    if (!types.is_subtype(it->second, p->params[i].type)) {
      throw UnknownType("constant '" + a.args[i] + "' is not of type " + p->params[i].type +
                        " in " + where);
    }
  }
}

class ActionGrounder {
 public:
  ActionGrounder(const ActionSchema& schema,
                 const std::map<std::string, std::vector<std::string>>& objects_by_type,
                 const std::set<std::string>& static_predicates,
                 const std::unordered_set<AtomKey, AtomKeyHash>& init, bool distinct)
      : schema_(schema), init_(init), distinct_(distinct) {
    for (std::size_t i = 0; i < schema.params.size(); ++i) {
      var_index_[schema.params[i].name] = i;
      auto it = objects_by_type.find(schema.params[i].type);
      domains_.push_back(it == objects_by_type.end() ? nullptr : &it->second);
    }
    // Static preconditions are checked as soon as their last variable is bound.
    checks_.resize(schema.params.size() + 1);
    for (const auto& atom : schema.pre) {
      if (!static_predicates.count(atom.predicate)) continue;
      std::size_t last = 0;
      for (const auto& arg : atom.args) {
        auto it = var_index_.find(arg);
        if (it != var_index_.end()) last = std::max(last, it->second + 1);
      }
      checks_[last].push_back(&atom);
    }
  }

  template <typename Emit>
  void run(Emit&& emit) {
    binding_.assign(schema_.params.size(), nullptr);
    for (const Atom* a : checks_[0]) {
      if (!static_holds(*a)) return;
    }
    recurse(0, emit);
  }

  std::vector<std::string> instantiate(const Atom& a) const {
    std::vector<std::string> args;
    args.reserve(a.args.size());
    for (const auto& arg : a.args) {
      auto it = var_index_.find(arg);
      args.push_back(it == var_index_.end() ? arg : *binding_[it->second]);
    }
    return args;
  }

  std::vector<std::string> bound_args() const {
    std::vector<std::string> out;
    for (const auto* b : binding_) out.push_back(*b);
    return out;
  }

 private:
  bool static_holds(const Atom& a) const {
    return init_.count(AtomKey{a.predicate, instantiate(a)}) > 0;
  }

  template <typename Emit>
  void recurse(std::size_t i, Emit& emit) {
    if (i == binding_.size()) {
      emit(*this);
      return;
    }
    if (!domains_[i]) return;
    for (const auto& obj : *domains_[i]) {
      if (distinct_ && std::find(binding_.begin(), binding_.begin() + static_cast<std::ptrdiff_t>(i), &obj) !=
                           binding_.begin() + static_cast<std::ptrdiff_t>(i)) {
        continue;
      }
      binding_[i] = &obj;
      bool ok = true;
      for (const Atom* a : checks_[i + 1]) {
        if (!static_holds(*a)) {
          ok = false;
          break;
        }
      }
      if (ok) recurse(i + 1, emit);
    }
    binding_[i] = nullptr;
  }

  const ActionSchema& schema_;
  const std::unordered_set<AtomKey, AtomKeyHash>& init_;
  std::map<std::string, std::size_t> var_index_;
  std::vector<const std::vector<std::string>*> domains_;
  std::vector<std::vector<const Atom*>> checks_;
  std::vector<const std::string*> binding_;
  bool distinct_ = true;
};

}  // namespace

GroundTask ground(const DomainSchema& domain, const ProblemSpec& problem,
                  const GroundingOptions& options) {
  if (problem.hypotheses.empty()) {
    throw EmptyHypothesisSet("problem '" + problem.name + "' declares no goal hypotheses");
  }
  TypeHierarchy types(domain.types);

  std::unordered_map<std::string, std::string> object_types;
  std::vector<TypedName> objects = domain.constants;
  objects.insert(objects.end(), problem.objects.begin(), problem.objects.end());
  for (const auto& o : objects) {
    if (!types.known(o.type)) throw UnknownType("unknown type '" + o.type + "' of " + o.name);
    auto [it, inserted] = object_types.emplace(o.name, o.type);
    if (!inserted && it->second != o.type) {
      throw UnknownType("object '" + o.name + "' declared with two types");
    }
  }
  std::map<std::string, std::vector<std::string>> objects_by_type;
  std::vector<std::string> type_names{"object"};
  for (const auto& t : domain.types) type_names.push_back(t.name);
  std::vector<std::string> sorted_objects;
  for (const auto& [name, type] : object_types) sorted_objects.push_back(name);
  std::sort(sorted_objects.begin(), sorted_objects.end());
  for (const auto& t : type_names) {
    auto& bucket = objects_by_type[t];
    for (const auto& o : sorted_objects) {
      if (types.is_subtype(object_types.at(o), t)) bucket.push_back(o);
    }
  }

  for (const auto& a : problem.init) check_ground_atom(domain, a, object_types, types, "init");
  for (const auto& h : problem.hypotheses) {
    if (h.facts.empty()) throw Error("hypothesis '" + h.name + "' has no facts");
    for (const auto& a : h.facts) {
      check_ground_atom(domain, a, object_types, types, "hypothesis " + h.name);
    }
  }

  std::set<std::string> fluent_predicates;
  for (const auto& a : domain.actions) {
    for (const auto& at : a.add) fluent_predicates.insert(at.predicate);
    for (const auto& at : a.del) fluent_predicates.insert(at.predicate);
  }
  std::set<std::string> static_predicates;
  for (const auto& p : domain.predicates) {
    if (!fluent_predicates.count(p.name)) static_predicates.insert(p.name);
  }

  std::unordered_set<AtomKey, AtomKeyHash> init_atoms;
  for (const auto& a : problem.init) init_atoms.insert({a.predicate, a.args});

  AtomTable atoms;
  std::vector<RawAction> raw;
  for (const auto& schema : domain.actions) {
    ActionGrounder grounder(schema, objects_by_type, static_predicates, init_atoms, options.distinct_parameters);
    grounder.run([&](const ActionGrounder& g) {
      RawAction ra{&schema, g.bound_args(), {}, {}, {}};
      for (const auto& at : schema.pre) {
        if (static_predicates.count(at.predicate)) continue;
        ra.pre.push_back(atoms.intern({at.predicate, g.instantiate(at)}));
      }
      for (const auto& at : schema.add) ra.add.push_back(atoms.intern({at.predicate, g.instantiate(at)}));
      for (const auto& at : schema.del) ra.del.push_back(atoms.intern({at.predicate, g.instantiate(at)}));
      raw.push_back(std::move(ra));
    });
  }

  std::vector<int> init_ids;
  for (const auto& a : problem.init) init_ids.push_back(atoms.intern({a.predicate, a.args}));
  std::vector<std::vector<int>> hyp_ids;
  for (const auto& h : problem.hypotheses) {
    std::vector<int> ids;
    for (const auto& a : h.facts) ids.push_back(atoms.intern({a.predicate, a.args}));
    hyp_ids.push_back(std::move(ids));
  }

  // Delete-relaxed reachability from init.
  std::vector<char> keep(raw.size(), 1);
  if (options.prune_unreachable) {
    std::vector<char> reached(atoms.size(), 0);
    std::vector<std::vector<std::size_t>> consumers(atoms.size());
    std::vector<std::size_t> pending(raw.size());
    std::vector<int> frontier;
    std::fill(keep.begin(), keep.end(), 0);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      auto& pre = raw[i].pre;
      std::sort(pre.begin(), pre.end());
      pre.erase(std::unique(pre.begin(), pre.end()), pre.end());
      pending[i] = pre.size();
      for (int f : pre) consumers[static_cast<std::size_t>(f)].push_back(i);
    }
    auto fire = [&](std::size_t i) {
      keep[i] = 1;
      for (int f : raw[i].add) {
        if (!reached[static_cast<std::size_t>(f)]) {
          reached[static_cast<std::size_t>(f)] = 1;
          frontier.push_back(f);
        }
      }
    };
    for (int f : init_ids) {
      if (!reached[static_cast<std::size_t>(f)]) {
        reached[static_cast<std::size_t>(f)] = 1;
        frontier.push_back(f);
      }
    }
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (pending[i] == 0) fire(i);
    }
    while (!frontier.empty()) {
      int f = frontier.back();
      frontier.pop_back();
      for (std::size_t i : consumers[static_cast<std::size_t>(f)]) {
        if (--pending[i] == 0) fire(i);
      }
    }
  }

  // Fact universe: facts used by kept actions, init facts and goal facts.
  std::vector<char> used(atoms.size(), 0);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!keep[i]) continue;
    for (int f : raw[i].pre) used[static_cast<std::size_t>(f)] = 1;
    for (int f : raw[i].add) used[static_cast<std::size_t>(f)] = 1;
  }
  for (int f : init_ids) {
    if (!static_predicates.count(atoms.key(f).first)) used[static_cast<std::size_t>(f)] = 1;
  }
  for (const auto& ids : hyp_ids) {
    for (int f : ids) used[static_cast<std::size_t>(f)] = 1;
  }

  std::vector<int> order;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (used[i]) order.push_back(static_cast<int>(i));
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) { return atoms.key(a) < atoms.key(b); });
  std::vector<int> remap(atoms.size(), -1);
  std::vector<Fact> facts;
  facts.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    remap[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    const auto& key = atoms.key(order[i]);
    facts.push_back(Fact{key.first, key.second, static_cast<FactId>(i)});
  }
  auto translate = [&](const std::vector<int>& ids) {
    std::vector<FactId> out;
    for (int f : ids) {
      int m = remap[static_cast<std::size_t>(f)];
      if (m >= 0) out.push_back(static_cast<FactId>(m));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };

  std::vector<GroundAction> actions;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!keep[i]) continue;
    GroundAction ga;
    ga.name = raw[i].schema->name;
    ga.args = raw[i].args;
    ga.pre = translate(raw[i].pre);
    ga.add = translate(raw[i].add);
    ga.del = translate(raw[i].del);
    actions.push_back(std::move(ga));
  }
  std::sort(actions.begin(), actions.end(), [](const GroundAction& a, const GroundAction& b) {
    return std::tie(a.name, a.args) < std::tie(b.name, b.args);
  });
  for (std::size_t i = 0; i < actions.size(); ++i) actions[i].id = static_cast<ActionId>(i);

  std::vector<GoalHypothesis> hypotheses;
  for (std::size_t h = 0; h < problem.hypotheses.size(); ++h) {
    hypotheses.push_back(
        {problem.hypotheses[h].name, translate(hyp_ids[h]), problem.hypotheses[h].prior});
  }
  return GroundTask(std::move(facts), std::move(actions), translate(init_ids),
                    std::move(hypotheses), problem.true_goal);
}

}  // namespace goalrec
