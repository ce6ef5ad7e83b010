// Reader and printer for the STRIPS model language: a PDDL subset with typed
// objects, positive conjunctive preconditions and add/delete effects. Problem
// files carry a weighted hypothesis list instead of a single goal.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

#include "goalrec/strips.hpp"

namespace goalrec {

namespace {

struct Node {
  bool is_list = false;
  std::string atom;
  std::vector<Node> items;
  std::size_t line = 0;
  std::size_t col = 0;

  bool is(std::string_view s) const { return !is_list && atom == s; }
};

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  Node read_document() {
    skip_space();
    if (pos_ >= text_.size()) throw SyntaxError(line_, col_, "'('");
    Node root = read_node();
    skip_space();
    if (pos_ < text_.size()) throw SyntaxError(line_, col_, "end of input");
    return root;
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Node read_node() {
    Node n;
    n.line = line_;
    n.col = col_;
    if (text_[pos_] == '(') {
      n.is_list = true;
      advance();
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) throw SyntaxError(line_, col_, "')'");
        if (text_[pos_] == ')') {
          advance();
          return n;
        }
        n.items.push_back(read_node());
      }
    }
    if (text_[pos_] == ')') throw SyntaxError(line_, col_, "symbol or '('");
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c))) break;
      n.atom += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      advance();
    }
    return n;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

[[noreturn]] void expected(const Node& at, const std::string& what) {
  throw SyntaxError(at.line, at.col, what);
}

const Node& expect_list(const Node& n, const std::string& what) {
  if (!n.is_list) expected(n, what);
  return n;
}

const std::string& expect_symbol(const Node& n, const std::string& what) {
  if (n.is_list || n.atom.empty()) expected(n, what);
  return n.atom;
}

void expect_keyword(const Node& n, std::string_view kw) {
  if (!n.is(kw)) expected(n, "'" + std::string(kw) + "'");
}

/// `a b - t c - u d` -> [(a,t) (b,t) (c,u) (d,object)]
std::vector<TypedName> read_typed_list(const std::vector<Node>& items, std::size_t from,
                                       bool variables) {
  std::vector<TypedName> out;
  std::vector<std::string> pending;
  for (std::size_t i = from; i < items.size(); ++i) {
    const auto& sym = expect_symbol(items[i], variables ? "variable" : "name");
    if (sym == "-") {
      if (pending.empty() || i + 1 >= items.size()) expected(items[i], "name before '-'");
      const auto& type = expect_symbol(items[i + 1], "type name");
      for (auto& p : pending) out.push_back({std::move(p), type});
      pending.clear();
      ++i;
      continue;
    }
    if (variables && sym.front() != '?') expected(items[i], "variable starting with '?'");
    if (!variables && sym.front() == '?') expected(items[i], "name");
    pending.push_back(sym);
  }
  for (auto& p : pending) out.push_back({std::move(p), "object"});
  return out;
}

Atom read_atom(const Node& n) {
  expect_list(n, "atom");
  if (n.items.empty()) expected(n, "predicate name");
  Atom a;
  a.predicate = expect_symbol(n.items[0], "predicate name");
  if (a.predicate == "and" || a.predicate == "not" || a.predicate == "or") {
    expected(n, "atom");
  }
  for (std::size_t i = 1; i < n.items.size(); ++i) {
    a.args.push_back(expect_symbol(n.items[i], "argument"));
  }
  return a;
}

std::vector<Atom> read_conjunction(const Node& n) {
  expect_list(n, "formula");
  if (n.items.empty()) return {};
  if (n.items[0].is("and")) {
    std::vector<Atom> out;
    for (std::size_t i = 1; i < n.items.size(); ++i) {
      const auto& item = expect_list(n.items[i], "atom");
      if (!item.items.empty() && item.items[0].is("not")) {
        expected(item, "positive atom (negative preconditions are not supported)");
      }
      out.push_back(read_atom(item));
    }
    return out;
  }
  if (n.items[0].is("not")) expected(n, "positive atom (negative preconditions are not supported)");
  return {read_atom(n)};
}

void read_effect(const Node& n, std::vector<Atom>& add, std::vector<Atom>& del) {
  expect_list(n, "effect");
  if (n.items.empty()) return;
  auto literal = [&](const Node& lit) {
    expect_list(lit, "literal");
    if (!lit.items.empty() && lit.items[0].is("not")) {
      if (lit.items.size() != 2) expected(lit, "(not <atom>)");
      del.push_back(read_atom(lit.items[1]));
    } else {
      add.push_back(read_atom(lit));
    }
  };
  if (n.items[0].is("and")) {
    for (std::size_t i = 1; i < n.items.size(); ++i) literal(n.items[i]);
  } else {
    literal(n);
  }
}

const Node& read_header(const Node& root, std::string_view kind, std::string& name) {
  expect_list(root, "'(define'");
  if (root.items.size() < 2) expected(root, "'(define (" + std::string(kind) + " <name>)'");
  expect_keyword(root.items[0], "define");
  const auto& head = expect_list(root.items[1], "(" + std::string(kind) + " <name>)");
  if (head.items.size() != 2) expected(head, "(" + std::string(kind) + " <name>)");
  expect_keyword(head.items[0], kind);
  name = expect_symbol(head.items[1], std::string(kind) + " name");
  return root;
}

class TypeTable {
 public:
  explicit TypeTable(const std::vector<TypedName>& types) {
    known_.insert("object");
    for (const auto& t : types) known_.insert(t.name);
  }
  bool known(const std::string& t) const { return known_.count(t) > 0; }

 private:
  std::set<std::string> known_;
};

void check_atom(const DomainSchema& d, const Atom& a, const std::set<std::string>& vars,
                const std::set<std::string>& constants, const std::string& where) {
  const auto* p = d.find_predicate(a.predicate);
  if (!p) throw UnknownPredicate("undeclared predicate '" + a.predicate + "' in " + where);
  if (p->params.size() != a.args.size()) {
    throw ArityMismatch("predicate '" + a.predicate + "' expects " +
                        std::to_string(p->params.size()) + " arguments, got " +
                        std::to_string(a.args.size()) + " in " + where);
  }
  for (const auto& arg : a.args) {
    if (arg.front() == '?') {
      if (!vars.count(arg)) throw UndeclaredConstant("unbound variable " + arg + " in " + where);
    } else if (!constants.count(arg)) {
      throw UndeclaredConstant("undeclared constant '" + arg + "' in " + where);
    }
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void print_typed(std::ostream& out, const std::vector<TypedName>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out << ' ';
    out << names[i].name << " - " << names[i].type;
  }
}

void print_atom(std::ostream& out, const Atom& a) {
  out << '(' << a.predicate;
  for (const auto& arg : a.args) out << ' ' << arg;
  out << ')';
}

void print_conjunction(std::ostream& out, const std::vector<Atom>& atoms) {
  out << "(and";
  for (const auto& a : atoms) {
    out << ' ';
    print_atom(out, a);
  }
  out << ')';
}

}  // namespace

DomainSchema parse_domain(std::string_view text) {
  Node root = Reader(text).read_document();
  DomainSchema d;
  read_header(root, "domain", d.name);

  std::vector<const Node*> action_nodes;
  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const auto& sec = expect_list(root.items[i], "domain section");
    if (sec.items.empty()) expected(sec, "section keyword");
    const auto& kw = expect_symbol(sec.items[0], "section keyword");
    if (kw == ":requirements") {
      continue;
    } else if (kw == ":types") {
      d.types = read_typed_list(sec.items, 1, false);
    } else if (kw == ":constants") {
      d.constants = read_typed_list(sec.items, 1, false);
    } else if (kw == ":predicates") {
      for (std::size_t j = 1; j < sec.items.size(); ++j) {
        const auto& p = expect_list(sec.items[j], "predicate declaration");
        if (p.items.empty()) expected(p, "predicate name");
        PredicateSchema ps;
        ps.name = expect_symbol(p.items[0], "predicate name");
        ps.params = read_typed_list(p.items, 1, true);
        d.predicates.push_back(std::move(ps));
      }
    } else if (kw == ":action") {
      action_nodes.push_back(&sec);
    } else {
      expected(sec.items[0], "one of :requirements :types :constants :predicates :action");
    }
  }

  for (const Node* node : action_nodes) {
    const auto& sec = *node;
    if (sec.items.size() < 2) expected(sec, "action name");
    ActionSchema a;
    a.name = expect_symbol(sec.items[1], "action name");
    for (std::size_t j = 2; j < sec.items.size(); j += 2) {
      const auto& key = expect_symbol(sec.items[j], ":parameters, :precondition or :effect");
      if (j + 1 >= sec.items.size()) expected(sec.items[j], "value after " + key);
      const auto& val = sec.items[j + 1];
      if (key == ":parameters") {
        a.params = read_typed_list(expect_list(val, "parameter list").items, 0, true);
      } else if (key == ":precondition") {
        a.pre = read_conjunction(val);
      } else if (key == ":effect") {
        read_effect(val, a.add, a.del);
      } else {
        expected(sec.items[j], ":parameters, :precondition or :effect");
      }
    }
    d.actions.push_back(std::move(a));
  }

  // A parent named only in the :types section is an implicit subtype of object.
  {
    std::set<std::string> declared{"object"};
    for (const auto& t : d.types) declared.insert(t.name);
    std::vector<TypedName> implicit;
    for (const auto& t : d.types) {
      if (declared.insert(t.type).second) implicit.push_back({t.type, "object"});
    }
    d.types.insert(d.types.end(), implicit.begin(), implicit.end());
  }

  // Semantic checks.
  TypeTable types(d.types);
  for (const auto& t : d.types) {
    if (!types.known(t.type)) throw UnknownType("unknown parent type '" + t.type + "'");
  }
  std::set<std::string> constants;
  for (const auto& c : d.constants) {
    if (!types.known(c.type)) throw UnknownType("unknown type '" + c.type + "' of " + c.name);
    constants.insert(c.name);
  }
  for (const auto& p : d.predicates) {
    for (const auto& prm : p.params) {
      if (!types.known(prm.type)) {
        throw UnknownType("unknown type '" + prm.type + "' in predicate " + p.name);
      }
    }
  }
  for (const auto& a : d.actions) {
    std::set<std::string> vars;
    for (const auto& prm : a.params) {
      if (!types.known(prm.type)) {
        throw UnknownType("unknown type '" + prm.type + "' in action " + a.name);
      }
      vars.insert(prm.name);
    }
    for (const auto* atoms : {&a.pre, &a.add, &a.del}) {
      for (const auto& at : *atoms) check_atom(d, at, vars, constants, "action " + a.name);
    }
  }
  return d;
}

ProblemSpec parse_problem(std::string_view text) {
  Node root = Reader(text).read_document();
  ProblemSpec p;
  read_header(root, "problem", p.name);
  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const auto& sec = expect_list(root.items[i], "problem section");
    if (sec.items.empty()) expected(sec, "section keyword");
    const auto& kw = expect_symbol(sec.items[0], "section keyword");
    if (kw == ":domain") {
      if (sec.items.size() != 2) expected(sec, "(:domain <name>)");
      p.domain = expect_symbol(sec.items[1], "domain name");
    } else if (kw == ":objects") {
      p.objects = read_typed_list(sec.items, 1, false);
    } else if (kw == ":init") {
      for (std::size_t j = 1; j < sec.items.size(); ++j) p.init.push_back(read_atom(sec.items[j]));
    } else if (kw == ":hypotheses") {
      for (std::size_t j = 1; j < sec.items.size(); ++j) {
        const auto& h = expect_list(sec.items[j], "(<name> <prior> <formula>)");
        if (h.items.size() != 3) expected(h, "(<name> <prior> <formula>)");
        HypothesisSpec hs;
        hs.name = expect_symbol(h.items[0], "hypothesis name");
        const auto& prior = expect_symbol(h.items[1], "prior probability");
        auto [end, ec] = std::from_chars(prior.data(), prior.data() + prior.size(), hs.prior);
        if (ec != std::errc() || end != prior.data() + prior.size() || hs.prior < 0.0) {
          expected(h.items[1], "non-negative number");
        }
        hs.facts = read_conjunction(h.items[2]);
        if (hs.facts.empty()) expected(h.items[2], "nonempty goal formula");
        p.hypotheses.push_back(std::move(hs));
      }
    } else if (kw == ":true-goal") {
      if (sec.items.size() != 2) expected(sec, "(:true-goal <index>)");
      const auto& idx = expect_symbol(sec.items[1], "hypothesis index");
      std::size_t v = 0;
      auto [end, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), v);
      if (ec != std::errc() || end != idx.data() + idx.size()) {
        expected(sec.items[1], "hypothesis index");
      }
      p.true_goal = v;
    } else {
      expected(sec.items[0], "one of :domain :objects :init :hypotheses :true-goal");
    }
  }
  return p;
}

std::string to_text(const DomainSchema& d) {
  std::ostringstream out;
  out << "(define (domain " << d.name << ")\n";
  if (!d.types.empty()) {
    out << "  (:types ";
    print_typed(out, d.types);
    out << ")\n";
  }
  if (!d.constants.empty()) {
    out << "  (:constants ";
    print_typed(out, d.constants);
    out << ")\n";
  }
  out << "  (:predicates";
  for (const auto& p : d.predicates) {
    out << "\n    (" << p.name;
    if (!p.params.empty()) out << ' ';
    print_typed(out, p.params);
    out << ')';
  }
  out << ")\n";
  for (const auto& a : d.actions) {
    out << "  (:action " << a.name << "\n    :parameters (";
    print_typed(out, a.params);
    out << ")\n    :precondition ";
    print_conjunction(out, a.pre);
    out << "\n    :effect (and";
    for (const auto& at : a.add) {
      out << ' ';
      print_atom(out, at);
    }
    for (const auto& at : a.del) {
      out << " (not ";
      print_atom(out, at);
      out << ')';
    }
    out << "))\n";
  }
  out << ")\n";
  return out.str();
}

std::string to_text(const ProblemSpec& p) {
  std::ostringstream out;
  out << "(define (problem " << p.name << ")\n  (:domain " << p.domain << ")\n";
  out << "  (:objects ";
  print_typed(out, p.objects);
  out << ")\n  (:init";
  for (const auto& a : p.init) {
    out << "\n    ";
    print_atom(out, a);
  }
  out << ")\n  (:hypotheses";
  for (const auto& h : p.hypotheses) {
    out << "\n    (" << h.name << ' ' << format_double(h.prior) << ' ';
    print_conjunction(out, h.facts);
    out << ')';
  }
  out << ")\n";
  if (p.true_goal) out << "  (:true-goal " << *p.true_goal << ")\n";
  out << ")\n";
  return out.str();
}

}  // namespace goalrec
