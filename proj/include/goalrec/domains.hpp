#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "goalrec/strips.hpp"

namespace goalrec {

enum class Family { blockwords, logistics, grid, buy };
enum class Setting { set1, set2 };

std::string to_string(Family f);
std::string to_string(Setting s);
Family parse_family(std::string_view s);
Setting parse_setting(std::string_view s);

/// Priors of the two-goal settings: the likely goal first.
inline constexpr double kSkewedPriorMajor = 0.8;
inline constexpr double kSkewedPriorMinor = 0.2;

class ScaleTooSmall : public Error {
 public:
  using Error::Error;
};

class UnsolvableLayout : public Error {
 public:
  using Error::Error;
};

struct GeneratorConfig {
  Family family = Family::blockwords;
  Setting setting = Setting::set1;
  std::uint64_t seed = 1;
  double scale = 1.0;
  /// Goal-cell pool for the random-goal grid setting.
  std::size_t grid_goal_pool = 10;
};

/// Number of hypotheses a configuration produces.
std::size_t hypothesis_count(const GeneratorConfig& cfg);

struct GeneratedTask {
  std::shared_ptr<const DomainSchema> domain;
  ProblemSpec problem;
  GroundTask task;
};

/// Each generator splits its randomness in two: the hypothesis set (and any
/// fixed layout) depends only on cfg.seed, everything drawn per problem on
/// (cfg.seed, instance).
GeneratedTask gen_blockwords(const GeneratorConfig& cfg, std::uint64_t instance);
GeneratedTask gen_logistics(const GeneratorConfig& cfg, std::uint64_t instance);
GeneratedTask gen_grid(const GeneratorConfig& cfg, std::uint64_t instance);
GeneratedTask generate_task(const GeneratorConfig& cfg, std::uint64_t instance);

const std::shared_ptr<const DomainSchema>& blocksworld_domain();
const std::shared_ptr<const DomainSchema>& logistics_domain();
const std::shared_ptr<const DomainSchema>& grid_domain();
const std::shared_ptr<const DomainSchema>& domain_for(Family f);

/// Explicit grid instance description; cells are (x, y) with 0 <= x, y < side.
struct GridLayout {
  std::size_t side = 3;
  std::pair<std::size_t, std::size_t> robot{0, 0};
  std::vector<std::pair<std::size_t, std::size_t>> locked;
  std::vector<std::pair<std::size_t, std::size_t>> keys;
  std::vector<std::pair<std::size_t, std::size_t>> goals;
  std::vector<double> priors;  // empty means uniform
};

ProblemSpec make_grid_problem(const GridLayout& layout, const std::string& name = "grid");
std::string grid_cell(std::size_t x, std::size_t y);

/// Blocks listed bottom-up per tower.
ProblemSpec make_blocks_problem(const std::vector<std::vector<std::string>>& towers,
                                const std::vector<std::pair<std::string, std::vector<std::string>>>& words,
                                const std::vector<double>& priors, const std::string& name = "blocks");
/// Goal facts of a tower spelling `word` top-down.
std::vector<Atom> word_goal(const std::vector<std::string>& word);

struct BuyTrace {
  std::vector<std::uint32_t> actions;  // indices into BuyData::vocabulary
  std::size_t label = 0;
};

struct BuyData {
  std::vector<std::string> vocabulary;
  std::vector<std::string> hypotheses;
  std::vector<double> priors;
  std::vector<BuyTrace> traces;
};

/// Direct simulation of the numeric banking domain; there is no STRIPS task.
BuyData gen_buy(const GeneratorConfig& cfg, std::size_t n_traces);

/// Deterministic 64-bit mixing of two seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace goalrec
