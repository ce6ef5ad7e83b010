#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "goalrec/strips.hpp"

namespace goalrec {

class IndexOutOfVocab : public Error {
 public:
  using Error::Error;
};

class SingleClassData : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

/// Bag-of-actions view of a trace: occurrence count per vocabulary index.
struct FeatureVector {
  std::vector<std::uint32_t> counts;
  bool operator==(const FeatureVector&) const = default;
};

FeatureVector featurize(std::span<const std::uint32_t> actions, std::size_t vocab_size);

struct LabeledFeatures {
  FeatureVector x;
  std::size_t label = 0;
};

struct GbtConfig {
  std::size_t n_rounds = 100;
  std::size_t max_depth = 3;
  double shrinkage = 0.3;
  double l2_lambda = 1.0;
  double min_child_weight = 1.0;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // go left when x[feature] <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;         // leaf output, shrinkage already applied
};

class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}
  double predict(const FeatureVector& x) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t depth() const;

 private:
  std::vector<TreeNode> nodes_;
};

class GbtEnsemble {
 public:
  GbtEnsemble() = default;
  GbtEnsemble(std::size_t n_classes, std::size_t vocab_size, double shrinkage, double l2_lambda);

  std::size_t n_classes() const { return n_classes_; }
  std::size_t vocab_size() const { return vocab_size_; }
  double shrinkage() const { return shrinkage_; }
  double l2_lambda() const { return l2_lambda_; }
  /// rounds()[r][k] is the tree for class k in round r.
  const std::vector<std::vector<RegressionTree>>& rounds() const { return rounds_; }
  void add_round(std::vector<RegressionTree> trees);

  std::vector<double> raw_scores(const FeatureVector& x) const;

  void save(std::ostream& out) const;
  static GbtEnsemble load(std::istream& in);
  bool operator==(const GbtEnsemble& other) const;

 private:
  std::size_t n_classes_ = 0;
  std::size_t vocab_size_ = 0;
  double shrinkage_ = 0.3;
  double l2_lambda_ = 1.0;
  std::vector<std::vector<RegressionTree>> rounds_;
};

struct GbtTrainLog {
  /// Mean training log-loss before round 0 and after every round.
  std::vector<double> logloss;
};

GbtEnsemble train_gbt(std::span<const LabeledFeatures> data, std::size_t n_classes,
                      const GbtConfig& cfg = {}, GbtTrainLog* log = nullptr);

struct ClassPrediction {
  std::vector<double> probabilities;
  std::size_t label = 0;
};

ClassPrediction predict_gbt(const GbtEnsemble& model, const FeatureVector& x);

/// Softmax with max subtraction; argmax ties to the lowest index.
ClassPrediction softmax_prediction(std::span<const double> logits);

}  // namespace goalrec
