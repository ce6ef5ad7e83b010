#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "goalrec/gbt.hpp"

namespace goalrec {

class EmptySequence : public Error {
 public:
  using Error::Error;
};

enum class SeqOptimizer { sgd, adam };

struct SeqHyper {
  std::size_t d_embed = 32;
  std::size_t d_hidden = 32;
  double lr = 0.01;
  std::size_t batch = 32;
  std::size_t epochs = 10;
  double clip_norm = 5.0;
  SeqOptimizer optimizer = SeqOptimizer::adam;
};

/// Gate order used by the arrays below.
enum Gate : std::size_t { kInput = 0, kForget = 1, kCell = 2, kOutput = 3 };

/// LSTM classifier parameters. Gate weights are (d_embed + d_hidden) x
/// d_hidden and act on the concatenation [embedding; previous hidden].
struct SeqModel {
  Eigen::MatrixXd embed;                 // vocab x d_embed
  std::array<Eigen::MatrixXd, 4> gate_w;
  std::array<Eigen::VectorXd, 4> gate_b;
  Eigen::MatrixXd out_w;                 // d_hidden x n_classes
  Eigen::VectorXd out_b;
  SeqHyper hyper;

  std::size_t vocab_size() const { return static_cast<std::size_t>(embed.rows()); }
  std::size_t n_classes() const { return static_cast<std::size_t>(out_b.size()); }

  /// Uniform init in +-1/sqrt(d_hidden), forget bias 1, other biases 0.
  static SeqModel init(std::size_t vocab, std::size_t n_classes, const SeqHyper& hyper,
                       std::uint64_t seed);
  static SeqModel zeros(std::size_t vocab, std::size_t n_classes, const SeqHyper& hyper);

  /// Every parameter tensor as a flat view, in a fixed order: embed, gate
  /// weights, gate biases, output weights, output bias.
  std::vector<std::span<double>> blocks();
  std::vector<std::span<const double>> blocks() const;
  std::size_t parameter_count() const;

  void save(std::ostream& out) const;
  static SeqModel load(std::istream& in);
  bool operator==(const SeqModel& other) const;
};

Eigen::VectorXd forward(const SeqModel& m, std::span<const std::uint32_t> seq);

struct SeqGradient {
  SeqModel grad;  // same shapes as the model
  double loss = 0.0;
};

/// Cross-entropy loss and exact gradients by backpropagation through time.
SeqGradient backward(const SeqModel& m, std::span<const std::uint32_t> seq, std::size_t label);

struct LabeledSequence {
  std::vector<std::uint32_t> actions;
  std::size_t label = 0;
};

struct SeqTrainLog {
  struct Row {
    std::size_t epoch;
    std::size_t batch;
    double loss;
  };
  std::vector<Row> rows;
  void write_csv(std::ostream& out) const;
};

/// Minibatch training. Batches hold sequences of equal length; batch order
/// and membership are fixed by `seed`.
SeqModel train_seq(std::span<const LabeledSequence> data, std::size_t vocab, std::size_t n_classes,
                   const SeqHyper& hyper, std::uint64_t seed, SeqTrainLog* log = nullptr);

ClassPrediction predict_seq(const SeqModel& m, std::span<const std::uint32_t> seq);

struct CurvePoint {
  std::size_t n_traces;
  double accuracy;  // percent
};

/// Trains one model per prefix size of `train` and scores it on `eval`.
std::vector<CurvePoint> learning_curve(std::span<const LabeledSequence> train,
                                       const std::vector<std::size_t>& sizes,
                                       std::span<const LabeledSequence> eval, std::size_t vocab,
                                       std::size_t n_classes, const SeqHyper& hyper,
                                       std::uint64_t seed);

}  // namespace goalrec
