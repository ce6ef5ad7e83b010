#include "goalrec/domains.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "goalrec/planner.hpp"

namespace goalrec {

namespace {

constexpr std::string_view kBlocksworldDomain = R"(
(define (domain blocksworld)
  (:types block)
  (:predicates (on ?x - block ?y - block) (ontable ?x - block) (clear ?x - block)
               (handempty) (holding ?x - block))
  (:action pick-up
    :parameters (?x - block)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (holding ?x) (not (ontable ?x)) (not (clear ?x)) (not (handempty))))
  (:action put-down
    :parameters (?x - block)
    :precondition (and (holding ?x))
    :effect (and (ontable ?x) (clear ?x) (handempty) (not (holding ?x))))
  (:action stack
    :parameters (?x - block ?y - block)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (on ?x ?y) (clear ?x) (handempty) (not (holding ?x)) (not (clear ?y))))
  (:action unstack
    :parameters (?x - block ?y - block)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (on ?x ?y)) (not (clear ?x)) (not (handempty)))))
)";

constexpr std::string_view kLogisticsDomain = R"(
(define (domain logistics)
  (:types truck airplane - vehicle
          package vehicle - physobj
          airport - location
          location city)
  (:predicates (in-city ?l - location ?c - city) (at ?o - physobj ?l - location)
               (in ?p - package ?v - vehicle))
  (:action load-truck
    :parameters (?p - package ?t - truck ?l - location)
    :precondition (and (at ?t ?l) (at ?p ?l))
    :effect (and (in ?p ?t) (not (at ?p ?l))))
  (:action unload-truck
    :parameters (?p - package ?t - truck ?l - location)
    :precondition (and (at ?t ?l) (in ?p ?t))
    :effect (and (at ?p ?l) (not (in ?p ?t))))
  (:action load-airplane
    :parameters (?p - package ?a - airplane ?l - airport)
    :precondition (and (at ?a ?l) (at ?p ?l))
    :effect (and (in ?p ?a) (not (at ?p ?l))))
  (:action unload-airplane
    :parameters (?p - package ?a - airplane ?l - airport)
    :precondition (and (at ?a ?l) (in ?p ?a))
    :effect (and (at ?p ?l) (not (in ?p ?a))))
  (:action drive-truck
    :parameters (?t - truck ?from - location ?to - location ?c - city)
    :precondition (and (at ?t ?from) (in-city ?from ?c) (in-city ?to ?c))
    :effect (and (at ?t ?to) (not (at ?t ?from))))
  (:action fly-airplane
    :parameters (?a - airplane ?from - airport ?to - airport)
    :precondition (and (at ?a ?from))
    :effect (and (at ?a ?to) (not (at ?a ?from)))))
)";

constexpr std::string_view kGridDomain = R"(
(define (domain grid)
  (:types cell)
  (:predicates (conn ?a - cell ?b - cell) (open ?c - cell) (locked ?c - cell)
               (at-robot ?c - cell) (key-at ?c - cell) (holding-key) (arm-empty))
  (:action move
    :parameters (?from - cell ?to - cell)
    :precondition (and (at-robot ?from) (conn ?from ?to) (open ?to))
    :effect (and (at-robot ?to) (not (at-robot ?from))))
  (:action pickup
    :parameters (?c - cell)
    :precondition (and (at-robot ?c) (key-at ?c) (arm-empty))
    :effect (and (holding-key) (not (key-at ?c)) (not (arm-empty))))
  (:action putdown
    :parameters (?c - cell)
    :precondition (and (at-robot ?c) (holding-key))
    :effect (and (key-at ?c) (arm-empty) (not (holding-key))))
  (:action unlock
    :parameters (?cur - cell ?loc - cell)
    :precondition (and (at-robot ?cur) (conn ?cur ?loc) (locked ?loc) (holding-key))
    :effect (and (open ?loc) (not (locked ?loc)))))
)";

std::shared_ptr<const DomainSchema> make_domain(std::string_view text) {
  return std::make_shared<const DomainSchema>(parse_domain(text));
}

using Rng = std::mt19937_64;
using Cell = std::pair<std::size_t, std::size_t>;

constexpr std::uint64_t kDatasetStream = 0x9e3779b97f4a7c15ull;

Rng dataset_rng(const GeneratorConfig& cfg) { return Rng(mix_seed(cfg.seed, kDatasetStream)); }
Rng instance_rng(const GeneratorConfig& cfg, std::uint64_t instance) {
  return Rng(mix_seed(cfg.seed, instance));
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

std::vector<double> setting_priors(Setting s, std::size_t n) {
  if (s == Setting::set1) return {kSkewedPriorMajor, kSkewedPriorMinor};
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

std::size_t draw_goal(Rng& rng, const std::vector<double>& priors) {
  return std::discrete_distribution<std::size_t>(priors.begin(), priors.end())(rng);
}

GeneratedTask finish(const std::shared_ptr<const DomainSchema>& domain, ProblemSpec problem) {
  GroundTask task = ground(*domain, problem);
  for (std::size_t h = 0; h < task.hypotheses().size(); ++h) {
    if (!relaxed_reachable(task, task.init(), task.hypothesis(h).facts)) {
      throw UnsolvableLayout("hypothesis '" + task.hypothesis(h).name + "' is unreachable");
    }
  }
  if (problem.true_goal && holds(task.init(), task.hypothesis(*problem.true_goal))) {
    throw UnsolvableLayout("drawn goal already holds in the initial state");
  }
  return {domain, std::move(problem), std::move(task)};
}

std::string block_name(std::size_t i) {
  static constexpr std::string_view letters = "abcdefghijklmnopqrstuvwxyz";
  if (i < letters.size()) return std::string(1, letters[i]);
  return std::string(1, letters[i % letters.size()]) + std::to_string(i / letters.size());
}

/// Random stacking of `blocks` into towers (bottom-up lists).
std::vector<std::vector<std::string>> random_towers(std::vector<std::string> blocks, Rng& rng) {
  std::shuffle(blocks.begin(), blocks.end(), rng);
  std::vector<std::vector<std::string>> towers;
  for (auto& b : blocks) {
    // Start a new tower with probability 1/(towers+1), else stack on a random tower.
    std::size_t choice = uniform_index(rng, towers.size() + 1);
    if (choice == towers.size()) {
      towers.push_back({std::move(b)});
    } else {
      towers[choice].push_back(std::move(b));
    }
  }
  return towers;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a combined word
  std::uint64_t z = a * 0xbf58476d1ce4e5b9ull + b + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::string to_string(Family f) {
  switch (f) {
    case Family::blockwords: return "blockwords";
    case Family::logistics: return "logistics";
    case Family::grid: return "grid";
    case Family::buy: return "buy";
  }
  return "?";
}

std::string to_string(Setting s) { return s == Setting::set1 ? "set1" : "set2"; }

Family parse_family(std::string_view s) {
  if (s == "blockwords" || s == "blocks") return Family::blockwords;
  if (s == "logistics") return Family::logistics;
  if (s == "grid") return Family::grid;
  if (s == "buy") return Family::buy;
  throw Error("unknown domain family '" + std::string(s) + "'");
}

Setting parse_setting(std::string_view s) {
  if (s == "set1" || s == "1") return Setting::set1;
  if (s == "set2" || s == "2") return Setting::set2;
  throw Error("unknown setting '" + std::string(s) + "'");
}

std::size_t hypothesis_count(const GeneratorConfig& cfg) {
  if (cfg.setting == Setting::set1) return 2;
  switch (cfg.family) {
    case Family::blockwords: return 5;
    case Family::grid: return cfg.grid_goal_pool;
    default: return 10;
  }
}

const std::shared_ptr<const DomainSchema>& blocksworld_domain() {
  static const auto d = make_domain(kBlocksworldDomain);
  return d;
}

const std::shared_ptr<const DomainSchema>& logistics_domain() {
  static const auto d = make_domain(kLogisticsDomain);
  return d;
}

const std::shared_ptr<const DomainSchema>& grid_domain() {
  static const auto d = make_domain(kGridDomain);
  return d;
}

const std::shared_ptr<const DomainSchema>& domain_for(Family f) {
  switch (f) {
    case Family::blockwords: return blocksworld_domain();
    case Family::logistics: return logistics_domain();
    case Family::grid: return grid_domain();
    case Family::buy: break;
  }
  throw Error("the buy domain has no propositional model");
}

// ---------------------------------------------------------------------------
// Block-words

std::vector<Atom> word_goal(const std::vector<std::string>& word) {
  std::vector<Atom> facts;
  facts.push_back({"clear", {word.front()}});
  for (std::size_t i = 0; i + 1 < word.size(); ++i) facts.push_back({"on", {word[i], word[i + 1]}});
  facts.push_back({"ontable", {word.back()}});
  return facts;
}

ProblemSpec make_blocks_problem(const std::vector<std::vector<std::string>>& towers,
                                const std::vector<std::pair<std::string, std::vector<std::string>>>& words,
                                const std::vector<double>& priors, const std::string& name) {
  ProblemSpec p;
  p.name = name;
  p.domain = "blocksworld";
  std::vector<std::string> blocks;
  for (const auto& t : towers) blocks.insert(blocks.end(), t.begin(), t.end());
  std::sort(blocks.begin(), blocks.end());
  for (const auto& b : blocks) p.objects.push_back({b, "block"});
  p.init.push_back({"handempty", {}});
  for (const auto& t : towers) {
    if (t.empty()) continue;
    p.init.push_back({"ontable", {t.front()}});
    for (std::size_t i = 1; i < t.size(); ++i) p.init.push_back({"on", {t[i], t[i - 1]}});
    p.init.push_back({"clear", {t.back()}});
  }
  for (std::size_t h = 0; h < words.size(); ++h) {
    p.hypotheses.push_back({words[h].first, priors.empty() ? 1.0 : priors[h], word_goal(words[h].second)});
  }
  return p;
}

static GeneratedTask blockwords_once(const GeneratorConfig& cfg, std::uint64_t instance, Rng& rng) {
  Rng fixed = dataset_rng(cfg);
  std::vector<std::pair<std::string, std::vector<std::string>>> words;
  std::vector<std::string> blocks;

  if (cfg.setting == Setting::set1) {
    const auto n = static_cast<std::size_t>(std::ceil(cfg.scale * 24.0 - 1e-9));
    if (cfg.scale * 24.0 < 3.0) throw ScaleTooSmall("block-words set1 needs at least 3 blocks");
    for (std::size_t i = 0; i < n; ++i) blocks.push_back(block_name(i));
    std::vector<std::string> order = blocks;
    std::shuffle(order.begin(), order.end(), fixed);
    // Shared tower order[2..n-1]; the two goals differ only in the top block.
    for (std::size_t top = 0; top < 2; ++top) {
      std::vector<std::string> word{order[top]};
      word.insert(word.end(), order.begin() + 2, order.end());
      std::string label = "tower";
      for (const auto& b : word) label += "-" + b;
      words.emplace_back(label, std::move(word));
    }
  } else {
    const auto n = static_cast<std::size_t>(std::ceil(cfg.scale * 8.0 - 1e-9));
    if (n < 3) throw ScaleTooSmall("block-words set2 needs at least 3 letters");
    for (std::size_t i = 0; i < std::min<std::size_t>(n, 26 * 4); ++i) blocks.push_back(block_name(i));
    std::set<std::vector<std::string>> distinct;
    const std::size_t max_len = std::min<std::size_t>(blocks.size(), 6);
    while (words.size() < 5) {
      std::vector<std::string> pool = blocks;
      std::shuffle(pool.begin(), pool.end(), fixed);
      std::size_t len = 3 + uniform_index(fixed, max_len - 2);
      std::vector<std::string> word(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(len));
      if (!distinct.insert(word).second) continue;
      std::string label = "word-";
      for (const auto& b : word) label += b;
      words.emplace_back(label, std::move(word));
    }
  }

  auto priors = setting_priors(cfg.setting, words.size());
  auto problem = make_blocks_problem(random_towers(blocks, rng), words, priors,
                                     "blockwords-" + std::to_string(instance));
  problem.true_goal = draw_goal(rng, priors);
  return finish(blocksworld_domain(), std::move(problem));
}

// ---------------------------------------------------------------------------
// Logistics

namespace {

struct LogisticsMap {
  std::size_t cities = 0;
  std::size_t locations_per_city = 4;
  std::size_t packages = 0;

  std::string location(std::size_t c, std::size_t l) const {
    return "l" + std::to_string(c) + "-" + std::to_string(l);
  }
  std::size_t total_locations() const { return cities * locations_per_city; }
  std::string location(std::size_t flat) const {
    return location(flat / locations_per_city, flat % locations_per_city);
  }
};

using PackageGoal = std::vector<std::size_t>;  // package -> flat location

PackageGoal random_assignment(const LogisticsMap& map, Rng& rng) {
  PackageGoal g(map.packages);
  for (auto& loc : g) loc = uniform_index(rng, map.total_locations());
  return g;
}

}  // namespace

static GeneratedTask logistics_once(const GeneratorConfig& cfg, std::uint64_t instance, Rng& rng) {
  if (cfg.scale * 10.0 < 2.0 - 1e-9) throw ScaleTooSmall("logistics needs at least 2 cities");
  LogisticsMap map;
  map.cities = static_cast<std::size_t>(std::ceil(cfg.scale * 10.0 - 1e-9));
  map.packages = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(cfg.scale * 10.0 - 1e-9)));

  Rng fixed = dataset_rng(cfg);
  const std::size_t n_goals = hypothesis_count(cfg);

  // Goal assignments first so both settings draw them identically.
  std::vector<PackageGoal> goals;
  if (cfg.setting == Setting::set1) {
    PackageGoal a = random_assignment(map, fixed);
    PackageGoal b = a;
    std::vector<std::size_t> idx(map.packages);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), fixed);
    for (std::size_t i = 0; i < (map.packages + 1) / 2; ++i) {
      std::size_t p = idx[i];
      std::size_t moved = uniform_index(fixed, map.total_locations() - 1);
      b[p] = moved >= a[p] ? moved + 1 : moved;
    }
    goals = {a, b};
  } else {
    std::set<PackageGoal> distinct;
    while (goals.size() < n_goals) {
      auto g = random_assignment(map, fixed);
      if (distinct.insert(g).second) goals.push_back(std::move(g));
    }
  }

  // Set1 keeps one initial layout for every instance.
  Rng& layout = cfg.setting == Setting::set1 ? fixed : rng;
  std::vector<std::size_t> package_at(map.packages), truck_at(map.cities);
  for (auto& p : package_at) p = uniform_index(layout, map.total_locations());
  for (auto& t : truck_at) t = uniform_index(layout, map.locations_per_city);
  std::size_t plane_at = uniform_index(layout, map.cities);

  ProblemSpec p;
  p.name = "logistics-" + std::to_string(instance);
  p.domain = "logistics";
  for (std::size_t c = 0; c < map.cities; ++c) {
    p.objects.push_back({"city" + std::to_string(c), "city"});
    p.objects.push_back({"truck" + std::to_string(c), "truck"});
    for (std::size_t l = 0; l < map.locations_per_city; ++l) {
      p.objects.push_back({map.location(c, l), l == 0 ? "airport" : "location"});
    }
  }
  p.objects.push_back({"plane0", "airplane"});
  for (std::size_t k = 0; k < map.packages; ++k) p.objects.push_back({"pkg" + std::to_string(k), "package"});

  for (std::size_t c = 0; c < map.cities; ++c) {
    for (std::size_t l = 0; l < map.locations_per_city; ++l) {
      p.init.push_back({"in-city", {map.location(c, l), "city" + std::to_string(c)}});
    }
    p.init.push_back({"at", {"truck" + std::to_string(c), map.location(c, truck_at[c])}});
  }
  p.init.push_back({"at", {"plane0", map.location(plane_at, 0)}});
  for (std::size_t k = 0; k < map.packages; ++k) {
    p.init.push_back({"at", {"pkg" + std::to_string(k), map.location(package_at[k])}});
  }

  auto priors = setting_priors(cfg.setting, goals.size());
  for (std::size_t h = 0; h < goals.size(); ++h) {
    HypothesisSpec hs;
    hs.name = "delivery-" + std::to_string(h);
    hs.prior = priors[h];
    for (std::size_t k = 0; k < map.packages; ++k) {
      hs.facts.push_back({"at", {"pkg" + std::to_string(k), map.location(goals[h][k])}});
    }
    p.hypotheses.push_back(std::move(hs));
  }
  p.true_goal = draw_goal(rng, priors);
  return finish(logistics_domain(), std::move(p));
}

namespace {

/// Redraws the per-instance part until the layout is usable.
template <typename Once>
GeneratedTask with_retries(const GeneratorConfig& cfg, std::uint64_t instance, Once once) {
  Rng rng = instance_rng(cfg, instance);
  for (int attempt = 0;; ++attempt) {
    try {
      return once(cfg, instance, rng);
    } catch (const UnsolvableLayout&) {
      if (attempt == 99) throw;
    }
  }
}

}  // namespace

GeneratedTask gen_blockwords(const GeneratorConfig& cfg, std::uint64_t instance) {
  return with_retries(cfg, instance, blockwords_once);
}

GeneratedTask gen_logistics(const GeneratorConfig& cfg, std::uint64_t instance) {
  return with_retries(cfg, instance, logistics_once);
}

// ---------------------------------------------------------------------------
// Grid

std::string grid_cell(std::size_t x, std::size_t y) {
  return "c" + std::to_string(x) + "-" + std::to_string(y);
}

ProblemSpec make_grid_problem(const GridLayout& layout, const std::string& name) {
  const std::size_t s = layout.side;
  ProblemSpec p;
  p.name = name;
  p.domain = "grid";
  for (std::size_t x = 0; x < s; ++x) {
    for (std::size_t y = 0; y < s; ++y) p.objects.push_back({grid_cell(x, y), "cell"});
  }

  std::set<Cell> locked(layout.locked.begin(), layout.locked.end());
  for (std::size_t x = 0; x < s; ++x) {
    for (std::size_t y = 0; y < s; ++y) {
      auto here = grid_cell(x, y);
      if (x + 1 < s) {
        p.init.push_back({"conn", {here, grid_cell(x + 1, y)}});
        p.init.push_back({"conn", {grid_cell(x + 1, y), here}});
      }
      if (y + 1 < s) {
        p.init.push_back({"conn", {here, grid_cell(x, y + 1)}});
        p.init.push_back({"conn", {grid_cell(x, y + 1), here}});
      }
      p.init.push_back({locked.count({x, y}) ? "locked" : "open", {here}});
    }
  }
  p.init.push_back({"at-robot", {grid_cell(layout.robot.first, layout.robot.second)}});
  p.init.push_back({"arm-empty", {}});
  for (const auto& [x, y] : layout.keys) p.init.push_back({"key-at", {grid_cell(x, y)}});
  for (std::size_t h = 0; h < layout.goals.size(); ++h) {
    const auto& [x, y] = layout.goals[h];
    double prior = layout.priors.empty() ? 1.0 : layout.priors[h];
    p.hypotheses.push_back({"goal-" + grid_cell(x, y), prior, {{"at-robot", {grid_cell(x, y)}}}});
  }
  return p;
}

GeneratedTask gen_grid(const GeneratorConfig& cfg, std::uint64_t instance) {
  const double base = cfg.setting == Setting::set1 ? 12.0 : 16.0;
  const auto side = static_cast<std::size_t>(std::ceil(cfg.scale * base - 1e-9));
  if (side < 3) throw ScaleTooSmall("grid side must be at least 3");

  Rng fixed = dataset_rng(cfg);
  Rng rng = instance_rng(cfg, instance);
  GridLayout layout;
  layout.side = side;
  if (cfg.setting == Setting::set1) {
    layout.robot = {0, 0};
    layout.goals = {{side - 1, side - 1}, {side - 2, side - 1}};
  } else {
    if (cfg.grid_goal_pool < 2 || cfg.grid_goal_pool >= side * side) {
      throw ScaleTooSmall("grid is too small for the goal pool");
    }
    std::vector<Cell> cells;
    for (std::size_t x = 0; x < side; ++x) {
      for (std::size_t y = 0; y < side; ++y) cells.push_back({x, y});
    }
    std::shuffle(cells.begin(), cells.end(), fixed);
    layout.goals.assign(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(cfg.grid_goal_pool));
  }
  layout.priors = setting_priors(cfg.setting, layout.goals.size());

  const std::size_t n_locks = side;
  const std::size_t n_keys = std::max<std::size_t>(1, side / 3);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::set<Cell> reserved(layout.goals.begin(), layout.goals.end());
    if (cfg.setting == Setting::set2) {
      do {
        layout.robot = {uniform_index(rng, side), uniform_index(rng, side)};
      } while (reserved.count(layout.robot));
    }
    reserved.insert(layout.robot);
    std::vector<Cell> free;
    for (std::size_t x = 0; x < side; ++x) {
      for (std::size_t y = 0; y < side; ++y) {
        if (!reserved.count({x, y})) free.push_back({x, y});
      }
    }
    std::shuffle(free.begin(), free.end(), rng);
    const std::size_t locks = std::min(n_locks, free.size() / 2);
    layout.locked.assign(free.begin(), free.begin() + static_cast<std::ptrdiff_t>(locks));
    layout.keys.clear();
    for (std::size_t k = 0; k < n_keys && locks + k < free.size(); ++k) layout.keys.push_back(free[locks + k]);

    auto problem = make_grid_problem(layout, "grid-" + std::to_string(instance));
    problem.true_goal = draw_goal(rng, layout.priors);
    try {
      return finish(grid_domain(), std::move(problem));
    } catch (const UnsolvableLayout&) {
      continue;
    }
  }
  throw UnsolvableLayout("no solvable grid layout after 100 attempts");
}

GeneratedTask generate_task(const GeneratorConfig& cfg, std::uint64_t instance) {
  switch (cfg.family) {
    case Family::blockwords: return gen_blockwords(cfg, instance);
    case Family::logistics: return gen_logistics(cfg, instance);
    case Family::grid: return gen_grid(cfg, instance);
    case Family::buy: break;
  }
  throw Error("the buy domain is simulated directly; use gen_buy");
}

// ---------------------------------------------------------------------------
// Buy

BuyData gen_buy(const GeneratorConfig& cfg, std::size_t n_traces) {
  BuyData out;
  Rng fixed = dataset_rng(cfg);
  const bool two_goals = cfg.setting == Setting::set1;

  // Vocabulary: account/money actions first, goal purchases last.
  std::vector<std::string> generic;
  std::vector<std::string> purchases;
  std::vector<std::pair<double, double>> price_range;  // per goal, in salary units
  if (two_goals) {
    generic = {"(create-account client1 account1)", "(open-savings-account client1 account2)",
               "(payroll client1)", "(transfer-funds client1 account1 account2)"};
    purchases = {"(buy client1 house1)", "(pay-college client1 college1)"};
    out.hypotheses = {"buy-house", "pay-college"};
    price_range = {{120.0, 240.0}, {100.0, 220.0}};
  } else {
    generic = {"(create-account client1 account1)", "(open-savings-account client1 account2)",
               "(payroll client1)",          "(transfer-funds client1 account1 account2)",
               "(deposit-cash client1)",     "(withdraw-cash client1)",
               "(check-balance client1)",    "(pay-bill client1)",
               "(receive-bonus client1)",    "(login-app client1)",
               "(set-alert client1)",        "(apply-credit-card client1)",
               "(pay-credit-card client1)",  "(buy-groceries client1)",
               "(request-statement client1)"};
    for (std::size_t k = 0; k < 10; ++k) {
      bool college = k >= 6;
      std::string target = college ? "college" + std::to_string(k - 5) : "product" + std::to_string(k + 1);
      purchases.push_back(college ? "(pay-college client1 " + target + ")" : "(buy client1 " + target + ")");
      out.hypotheses.push_back(college ? "pay-" + target : "buy-" + target);
      double price = cfg.scale * 220.0 * static_cast<double>(k + 1);
      price_range.emplace_back(0.9 * price, 1.1 * price);
    }
  }
  out.vocabulary = generic;
  out.vocabulary.insert(out.vocabulary.end(), purchases.begin(), purchases.end());
  out.priors = setting_priors(cfg.setting, out.hypotheses.size());
  (void)fixed;

  constexpr std::uint32_t kCreate = 0, kSavings = 1, kPayroll = 2, kTransfer = 3;
  const auto n_generic = static_cast<std::uint32_t>(generic.size());
  for (std::size_t t = 0; t < n_traces; ++t) {
    Rng rng = instance_rng(cfg, t);
    BuyTrace trace;
    trace.label = draw_goal(rng, out.priors);
    const auto [lo, hi] = price_range[trace.label];
    const double price = std::uniform_real_distribution<double>(lo, hi)(rng);
    const double salary = static_cast<double>(std::uniform_int_distribution<int>(8, 12)(rng));

    if (two_goals && trace.label == 0) trace.actions.push_back(kSavings);
    trace.actions.push_back(kCreate);
    double balance = 0.0;
    while (balance < price) {
      trace.actions.push_back(kPayroll);
      balance += salary;
      if (two_goals) {
        if (std::bernoulli_distribution(0.15)(rng)) trace.actions.push_back(kTransfer);
      } else if (std::bernoulli_distribution(0.78)(rng)) {
        // Any account action except opening accounts and payroll.
        trace.actions.push_back(kTransfer + static_cast<std::uint32_t>(uniform_index(rng, n_generic - kTransfer)));
      }
    }
    trace.actions.push_back(n_generic + static_cast<std::uint32_t>(trace.label));
    out.traces.push_back(std::move(trace));
  }
  return out;
}

}  // namespace goalrec
