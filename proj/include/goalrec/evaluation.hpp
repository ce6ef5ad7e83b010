#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "goalrec/dataset.hpp"
#include "goalrec/gbt.hpp"
#include "goalrec/recognizer.hpp"
#include "goalrec/report.hpp"
#include "goalrec/seq.hpp"

namespace goalrec {

class IncompatibleMethod : public Error {
 public:
  using Error::Error;
};

/// A recognizer under evaluation. prepare() runs outside the timed region
/// (landmark extraction, training); predict() is what gets timed.
/// Work that a recognizer must redo for every new problem is reported by
/// setup_seconds() and charged to the predictions on that problem.
class Method {
 public:
  virtual ~Method() = default;
  virtual std::string name() const = 0;
  /// Throws IncompatibleMethod when the dataset is out of reach.
  virtual void prepare(const Dataset& ds) = 0;
  virtual std::size_t predict(const Dataset& ds, std::size_t trace,
                              std::span<const std::uint32_t> prefix) const = 0;
  /// Share of per-problem setup time attributable to heldout trace `trace`.
  virtual double setup_seconds(const Dataset&, std::size_t) const { return 0.0; }
};

enum class TieBreak { lowest_index, highest_index };

struct LgrOptions {
  double theta = kDefaultThreshold;
  bool use_prior = false;
  /// Tie-break among equally scored candidates of the prior-free variant.
  TieBreak tie_break = TieBreak::lowest_index;
};

class LandmarkMethod : public Method {
 public:
  explicit LandmarkMethod(LgrOptions options = {}) : options_(options) {}
  std::string name() const override { return options_.use_prior ? "LGR+prior" : "LGR"; }
  void prepare(const Dataset& ds) override;
  std::size_t predict(const Dataset& ds, std::size_t trace,
                      std::span<const std::uint32_t> prefix) const override;
  double setup_seconds(const Dataset& ds, std::size_t trace) const override;

 private:
  struct Problem {
    double setup_share = 0.0;  // grounding + extraction over the traces using it
    std::shared_ptr<const GroundTask> task;
    std::vector<LandmarkGraph> graphs;
    std::vector<std::optional<ActionId>> action_of;  // vocab index -> task action
  };
  LgrOptions options_;
  std::map<std::size_t, Problem> problems_;
};

/// Training sees every training trace in full plus its prefixes at the
/// evaluation ratios, the same views the recognizer is queried with.
struct TrainingOptions {
  bool augment_prefixes = true;
};

std::vector<LabeledSequence> training_sequences(const Dataset& ds, std::span<const std::size_t> indices,
                                                const TrainingOptions& options = {});

class GbtMethod : public Method {
 public:
  explicit GbtMethod(GbtConfig cfg = {}, TrainingOptions training = {}) : cfg_(cfg), training_(training) {}
  /// Uses an already trained model; prepare() then only checks shapes.
  explicit GbtMethod(GbtEnsemble model) : model_(std::move(model)), pretrained_(true) {}
  std::string name() const override { return "GBT"; }
  void prepare(const Dataset& ds) override;
  std::size_t predict(const Dataset& ds, std::size_t trace,
                      std::span<const std::uint32_t> prefix) const override;
  const std::optional<GbtEnsemble>& model() const { return model_; }
  const GbtTrainLog& log() const { return log_; }

 private:
  GbtConfig cfg_;
  TrainingOptions training_;
  std::optional<GbtEnsemble> model_;
  bool pretrained_ = false;
  GbtTrainLog log_;
};

class SeqMethod : public Method {
 public:
  explicit SeqMethod(SeqHyper hyper = {}, std::uint64_t seed = 1, TrainingOptions training = {})
      : hyper_(hyper), seed_(seed), training_(training) {}
  explicit SeqMethod(SeqModel model) : model_(std::move(model)), pretrained_(true) {}
  std::string name() const override { return "LSTM"; }
  void prepare(const Dataset& ds) override;
  std::size_t predict(const Dataset& ds, std::size_t trace,
                      std::span<const std::uint32_t> prefix) const override;
  const std::optional<SeqModel>& model() const { return model_; }

 private:
  SeqHyper hyper_;
  std::uint64_t seed_ = 1;
  TrainingOptions training_;
  std::optional<SeqModel> model_;
  bool pretrained_ = false;
};

struct EvalOptions {
  std::vector<double> ratios{kObservationRatios.begin(), kObservationRatios.end()};
  /// Off for byte-reproducible reports: seconds are then written as 0.
  bool record_timing = true;
  /// Adds each method's per-problem setup (grounding, landmark extraction)
  /// to its prediction times. Off: only predict() is timed.
  bool charge_setup = true;
};

/// Accuracy of each method on the heldout traces at every ratio.
EvalReport evaluate(std::span<Method* const> methods, const Dataset& ds, const EvalOptions& options = {});
EvalReport evaluate(Method& method, const Dataset& ds, const EvalOptions& options = {});

/// Hyperparameters read from a key=value file (see README).
struct MethodConfig {
  GbtConfig gbt;
  SeqHyper seq;
  LgrOptions lgr;
  TrainingOptions training;
  std::uint64_t seed = 1;
};

MethodConfig parse_method_config(std::string_view text);
MethodConfig load_method_config(const std::filesystem::path& path);

struct CurveRow {
  std::size_t n_traces = 0;
  double accuracy = 0.0;                // mean over ratios, percent
  std::vector<double> ratio_accuracy;   // one per ratio
};

/// Trains `method` ("gbt" or "seq") on growing prefixes of the training pool
/// (train then validation indices) and scores the heldout traces.
std::vector<CurveRow> learning_curve_eval(const Dataset& ds, const std::vector<std::size_t>& sizes,
                                          const std::string& method, const MethodConfig& cfg,
                                          const EvalOptions& options = {});
std::string curve_csv(const std::vector<CurveRow>& rows, std::span<const double> ratios);

}  // namespace goalrec
