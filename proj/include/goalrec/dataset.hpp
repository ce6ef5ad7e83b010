#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "goalrec/domains.hpp"
#include "goalrec/planner.hpp"
#include "goalrec/seq.hpp"

namespace goalrec {

class InsufficientTraces : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kHeldoutSize = 100;
inline constexpr std::size_t kMinTraces = 130;
inline constexpr std::array<double, 4> kObservationRatios{0.1, 0.3, 0.5, 0.7};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> heldout;
  bool operator==(const Split&) const = default;
};

/// Seeded shuffle of [0, n): the first 100 go to heldout, the rest 80:20.
Split make_split(std::size_t n, std::uint64_t seed);

struct Dataset {
  GeneratorConfig config;
  std::uint64_t seed = 1;
  /// One-hot index -> action name; the actions occurring in some trace.
  std::vector<std::string> vocab;
  std::vector<std::string> hypotheses;
  std::vector<double> priors;
  std::vector<LabeledSequence> traces;
  /// Distinct problems behind the traces; empty for buy.
  std::vector<ProblemSpec> problems;
  std::vector<std::size_t> trace_problem;
  Split split;

  std::size_t n_classes() const { return hypotheses.size(); }
  bool has_model() const { return !problems.empty(); }
};

struct BuildOptions {
  /// Planner tie-break noise; diversity of set1 traces rests on it.
  double noise = 1.0;
  PlannerOptions planner;
  /// Worker threads for planning; 0 picks the hardware concurrency.
  std::size_t threads = 0;
};

/// Generates n problems, plans each one to its drawn goal, validates every
/// plan and splits the traces.
Dataset build_dataset(const GeneratorConfig& cfg, std::size_t n, std::uint64_t seed,
                      const BuildOptions& options = {});

/// Grounds the problem behind trace `i`.
GroundTask trace_task(const Dataset& ds, std::size_t i);

/// First ceil(r * |O|) actions, never fewer than one.
std::size_t prefix_length(std::size_t n, double ratio);
std::vector<std::uint32_t> truncate(std::span<const std::uint32_t> trace, double ratio);
ObservationTrace truncate(const ObservationTrace& trace, double ratio);

/// One trace per line: label, tab, space-separated action ids.
void write_traces(std::ostream& out, std::span<const LabeledSequence> traces);
std::vector<LabeledSequence> read_traces(std::istream& in);
/// One action per line: id, tab, name.
void write_vocab(std::ostream& out, const std::vector<std::string>& vocab);
std::vector<std::string> read_vocab(std::istream& in);

void save_dataset(const Dataset& ds, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

std::vector<LabeledSequence> select(const Dataset& ds, std::span<const std::size_t> indices);

}  // namespace goalrec
