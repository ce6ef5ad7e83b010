// Multiclass Newton boosting with depth-limited regression trees over
// bag-of-actions count features. Split search is exact over the sorted
// distinct values of each feature, walking only nonzero entries.

#include "goalrec/gbt.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace goalrec {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(const std::string& tok) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || end != tok.data() + tok.size()) {
    throw Error("malformed number '" + tok + "' in model file");
  }
  return v;
}

void expect_token(std::istream& in, const std::string& want) {
  std::string tok;
  if (!(in >> tok) || tok != want) throw Error("model file: expected '" + want + "'");
}

struct Entry {
  std::uint32_t value;
  std::uint32_t row;
};

struct SplitChoice {
  double gain = 0.0;
  std::int32_t feature = -1;
  double threshold = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(std::span<const LabeledFeatures> data,
              const std::vector<std::vector<Entry>>& columns, const GbtConfig& cfg)
      : data_(data), columns_(columns), cfg_(cfg), node_of_(data.size()) {}

  /// Fits one tree to (grad, hess); writes each row's leaf output to `out`.
  RegressionTree fit(const std::vector<double>& grad, const std::vector<double>& hess,
                     std::vector<double>& out) {
    const std::size_t n = data_.size();
    nodes_.assign(1, TreeNode{});
    std::fill(node_of_.begin(), node_of_.end(), 0);
    std::vector<std::int32_t> active{0};

    for (std::size_t depth = 0; depth < cfg_.max_depth && !active.empty(); ++depth) {
      // Node totals.
      slot_.assign(nodes_.size(), -1);
      for (std::size_t s = 0; s < active.size(); ++s) slot_[static_cast<std::size_t>(active[s])] = static_cast<std::int32_t>(s);
      const std::size_t m = active.size();
      tot_g_.assign(m, 0.0);
      tot_h_.assign(m, 0.0);
      tot_n_.assign(m, 0);
      for (std::size_t i = 0; i < n; ++i) {
        std::int32_t s = slot_[static_cast<std::size_t>(node_of_[i])];
        if (s < 0) continue;
        tot_g_[static_cast<std::size_t>(s)] += grad[i];
        tot_h_[static_cast<std::size_t>(s)] += hess[i];
        ++tot_n_[static_cast<std::size_t>(s)];
      }
      std::vector<SplitChoice> best(m);
      search_splits(grad, hess, best);

      std::vector<std::int32_t> next_active;
      for (std::size_t s = 0; s < m; ++s) {
        if (best[s].feature < 0) continue;
        auto id = static_cast<std::size_t>(active[s]);
        auto left = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(TreeNode{});
        nodes_.push_back(TreeNode{});
        nodes_[id].feature = best[s].feature;
        nodes_[id].threshold = best[s].threshold;
        nodes_[id].left = left;
        nodes_[id].right = left + 1;
        next_active.push_back(left);
        next_active.push_back(left + 1);
      }
      for (std::size_t i = 0; i < n; ++i) {
        const auto& node = nodes_[static_cast<std::size_t>(node_of_[i])];
        if (node.feature < 0) continue;
        double v = data_[i].x.counts[static_cast<std::size_t>(node.feature)];
        node_of_[i] = v <= node.threshold ? node.left : node.right;
      }
      active = std::move(next_active);
    }

    // Leaf weights.
    std::vector<double> g(nodes_.size(), 0.0), h(nodes_.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      g[static_cast<std::size_t>(node_of_[i])] += grad[i];
      h[static_cast<std::size_t>(node_of_[i])] += hess[i];
    }
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      if (nodes_[k].feature < 0) {
        nodes_[k].value = -g[k] / (h[k] + cfg_.l2_lambda) * cfg_.shrinkage;
      }
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = nodes_[static_cast<std::size_t>(node_of_[i])].value;
    return RegressionTree(nodes_);
  }

 private:
  double score(double g, double h) const { return g * g / (h + cfg_.l2_lambda); }

  void search_splits(const std::vector<double>& grad, const std::vector<double>& hess,
                     std::vector<SplitChoice>& best) {
    const std::size_t m = best.size();
    std::vector<double> nz_g(m), nz_h(m), left_g(m), left_h(m);
    std::vector<std::size_t> nz_n(m), left_n(m);
    std::vector<std::uint32_t> last(m);
    for (std::size_t f = 0; f < columns_.size(); ++f) {
      const auto& col = columns_[f];
      if (col.empty()) continue;
      std::fill(nz_g.begin(), nz_g.end(), 0.0);
      std::fill(nz_h.begin(), nz_h.end(), 0.0);
      std::fill(nz_n.begin(), nz_n.end(), 0);
      for (const auto& e : col) {
        std::int32_t s = slot_[static_cast<std::size_t>(node_of_[e.row])];
        if (s < 0) continue;
        nz_g[static_cast<std::size_t>(s)] += grad[e.row];
        nz_h[static_cast<std::size_t>(s)] += hess[e.row];
        ++nz_n[static_cast<std::size_t>(s)];
      }
      for (std::size_t s = 0; s < m; ++s) {
        left_g[s] = tot_g_[s] - nz_g[s];
        left_h[s] = tot_h_[s] - nz_h[s];
        left_n[s] = tot_n_[s] - nz_n[s];
        if (left_n[s] == 0) {
          left_g[s] = 0.0;
          left_h[s] = 0.0;
        }
        last[s] = 0;
      }
      for (const auto& e : col) {
        std::int32_t si = slot_[static_cast<std::size_t>(node_of_[e.row])];
        if (si < 0) continue;
        auto s = static_cast<std::size_t>(si);
        if (e.value != last[s] && left_n[s] > 0) {
          double gl = left_g[s], hl = left_h[s];
          double gr = tot_g_[s] - gl, hr = tot_h_[s] - hl;
          if (hl >= cfg_.min_child_weight && hr >= cfg_.min_child_weight) {
            double gain = score(gl, hl) + score(gr, hr) - score(tot_g_[s], tot_h_[s]);
            if (gain > 1e-12 && gain > best[s].gain) {
              best[s] = {gain, static_cast<std::int32_t>(f), 0.5 * (last[s] + e.value)};
            }
          }
        }
        left_g[s] += grad[e.row];
        left_h[s] += hess[e.row];
        ++left_n[s];
        last[s] = e.value;
      }
    }
  }

  std::span<const LabeledFeatures> data_;
  const std::vector<std::vector<Entry>>& columns_;
  const GbtConfig& cfg_;
  std::vector<TreeNode> nodes_;
  std::vector<std::int32_t> node_of_;
  std::vector<std::int32_t> slot_;
  std::vector<double> tot_g_, tot_h_;
  std::vector<std::size_t> tot_n_;
};

double mean_logloss(const std::vector<double>& logits, std::span<const LabeledFeatures> data,
                    std::size_t k) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double* row = &logits[i * k];
    double mx = *std::max_element(row, row + k);
    double z = 0.0;
    for (std::size_t c = 0; c < k; ++c) z += std::exp(row[c] - mx);
    total += -(row[data[i].label] - mx - std::log(z));
  }
  return total / static_cast<double>(data.size());
}

}  // namespace

FeatureVector featurize(std::span<const std::uint32_t> actions, std::size_t vocab_size) {
  FeatureVector fv;
  fv.counts.assign(vocab_size, 0);
  for (auto a : actions) {
    if (a >= vocab_size) {
      throw IndexOutOfVocab("action index " + std::to_string(a) + " outside vocabulary of " +
                            std::to_string(vocab_size));
    }
    ++fv.counts[a];
  }
  return fv;
}

double RegressionTree::predict(const FeatureVector& x) const {
  if (nodes_.empty()) return 0.0;
  std::size_t k = 0;
  while (nodes_[k].feature >= 0) {
    double v = x.counts[static_cast<std::size_t>(nodes_[k].feature)];
    k = static_cast<std::size_t>(v <= nodes_[k].threshold ? nodes_[k].left : nodes_[k].right);
  }
  return nodes_[k].value;
}

std::size_t RegressionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    auto [k, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (nodes_[k].feature >= 0) {
      stack.emplace_back(static_cast<std::size_t>(nodes_[k].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes_[k].right), d + 1);
    }
  }
  return deepest;
}

GbtEnsemble::GbtEnsemble(std::size_t n_classes, std::size_t vocab_size, double shrinkage,
                         double l2_lambda)
    : n_classes_(n_classes), vocab_size_(vocab_size), shrinkage_(shrinkage), l2_lambda_(l2_lambda) {}

void GbtEnsemble::add_round(std::vector<RegressionTree> trees) {
  if (trees.size() != n_classes_) throw ShapeMismatch("round must hold one tree per class");
  for (const auto& t : trees) {
    for (const auto& node : t.nodes()) {
      if (node.feature >= 0 && static_cast<std::size_t>(node.feature) >= vocab_size_) {
        throw ShapeMismatch("split feature outside vocabulary");
      }
    }
  }
  rounds_.push_back(std::move(trees));
}

std::vector<double> GbtEnsemble::raw_scores(const FeatureVector& x) const {
  if (x.counts.size() != vocab_size_) {
    throw ShapeMismatch("feature vector has length " + std::to_string(x.counts.size()) +
                        ", model expects " + std::to_string(vocab_size_));
  }
  std::vector<double> s(n_classes_, 0.0);
  for (const auto& round : rounds_) {
    for (std::size_t k = 0; k < n_classes_; ++k) s[k] += round[k].predict(x);
  }
  return s;
}

void GbtEnsemble::save(std::ostream& out) const {
  out << "goalrec-gbt 1\n";
  out << "classes " << n_classes_ << " vocab " << vocab_size_ << " shrinkage " << fmt(shrinkage_)
      << " lambda " << fmt(l2_lambda_) << " rounds " << rounds_.size() << '\n';
  for (const auto& round : rounds_) {
    for (const auto& tree : round) {
      out << "tree " << tree.nodes().size() << '\n';
      for (const auto& n : tree.nodes()) {
        out << n.feature << ' ' << fmt(n.threshold) << ' ' << n.left << ' ' << n.right << ' '
            << fmt(n.value) << '\n';
      }
    }
  }
}

GbtEnsemble GbtEnsemble::load(std::istream& in) {
  expect_token(in, "goalrec-gbt");
  int version = 0;
  if (!(in >> version) || version != 1) throw Error("unsupported gbt model version");
  std::size_t classes = 0, vocab = 0, rounds = 0;
  std::string shrink, lambda;
  expect_token(in, "classes");
  in >> classes;
  expect_token(in, "vocab");
  in >> vocab;
  expect_token(in, "shrinkage");
  in >> shrink;
  expect_token(in, "lambda");
  in >> lambda;
  expect_token(in, "rounds");
  in >> rounds;
  if (!in) throw Error("truncated gbt model header");
  GbtEnsemble m(classes, vocab, parse_double(shrink), parse_double(lambda));
  for (std::size_t r = 0; r < rounds; ++r) {
    std::vector<RegressionTree> trees;
    for (std::size_t k = 0; k < classes; ++k) {
      expect_token(in, "tree");
      std::size_t count = 0;
      in >> count;
      std::vector<TreeNode> nodes(count);
      for (auto& n : nodes) {
        std::string thr, val;
        in >> n.feature >> thr >> n.left >> n.right >> val;
        if (!in) throw Error("truncated gbt tree");
        n.threshold = parse_double(thr);
        n.value = parse_double(val);
        if (n.feature >= 0 && (n.left < 0 || n.right < 0 || static_cast<std::size_t>(n.left) >= count ||
                               static_cast<std::size_t>(n.right) >= count)) {
          throw Error("gbt tree has dangling child index");
        }
      }
      trees.emplace_back(std::move(nodes));
    }
    m.add_round(std::move(trees));
  }
  return m;
}

bool GbtEnsemble::operator==(const GbtEnsemble& o) const {
  if (n_classes_ != o.n_classes_ || vocab_size_ != o.vocab_size_ || shrinkage_ != o.shrinkage_ ||
      l2_lambda_ != o.l2_lambda_ || rounds_.size() != o.rounds_.size()) {
    return false;
  }
  for (std::size_t r = 0; r < rounds_.size(); ++r) {
    for (std::size_t k = 0; k < n_classes_; ++k) {
      const auto& a = rounds_[r][k].nodes();
      const auto& b = o.rounds_[r][k].nodes();
      if (a.size() != b.size()) return false;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].feature != b[i].feature || a[i].threshold != b[i].threshold ||
            a[i].left != b[i].left || a[i].right != b[i].right || a[i].value != b[i].value) {
          return false;
        }
      }
    }
  }
  return true;
}

GbtEnsemble train_gbt(std::span<const LabeledFeatures> data, std::size_t n_classes,
                      const GbtConfig& cfg, GbtTrainLog* log) {
  if (data.empty()) throw SingleClassData("no training data");
  const std::size_t vocab = data.front().x.counts.size();
  std::vector<std::size_t> seen(n_classes, 0);
  for (const auto& d : data) {
    if (d.x.counts.size() != vocab) throw ShapeMismatch("feature vectors differ in length");
    if (d.label >= n_classes) throw Error("label outside class range");
    ++seen[d.label];
  }
  if (std::count_if(seen.begin(), seen.end(), [](std::size_t c) { return c > 0; }) < 2) {
    throw SingleClassData("training data must contain at least two classes");
  }

  std::vector<std::vector<Entry>> columns(vocab);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& c = data[i].x.counts;
    for (std::size_t f = 0; f < vocab; ++f) {
      if (c[f]) columns[f].push_back({c[f], static_cast<std::uint32_t>(i)});
    }
  }
  for (auto& col : columns) {
    std::stable_sort(col.begin(), col.end(),
                     [](const Entry& a, const Entry& b) { return a.value < b.value; });
  }

  const std::size_t n = data.size();
  const std::size_t k = n_classes;
  GbtEnsemble model(k, vocab, cfg.shrinkage, cfg.l2_lambda);
  std::vector<double> logits(n * k, 0.0);
  std::vector<double> prob(n * k);
  std::vector<double> grad(n), hess(n), out(n);
  TreeBuilder builder(data, columns, cfg);
  if (log) log->logloss.push_back(mean_logloss(logits, data, k));

  for (std::size_t r = 0; r < cfg.n_rounds; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = &logits[i * k];
      double mx = *std::max_element(row, row + k);
      double z = 0.0;
      for (std::size_t c = 0; c < k; ++c) z += (prob[i * k + c] = std::exp(row[c] - mx));
      for (std::size_t c = 0; c < k; ++c) prob[i * k + c] /= z;
    }
    std::vector<RegressionTree> trees;
    trees.reserve(k);
    std::vector<double> delta(n * k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        double p = prob[i * k + c];
        grad[i] = p - (data[i].label == c ? 1.0 : 0.0);
        hess[i] = std::max(p * (1.0 - p), 1e-16);
      }
      trees.push_back(builder.fit(grad, hess, out));
      for (std::size_t i = 0; i < n; ++i) delta[i * k + c] = out[i];
    }
    for (std::size_t j = 0; j < n * k; ++j) logits[j] += delta[j];
    model.add_round(std::move(trees));
    if (log) log->logloss.push_back(mean_logloss(logits, data, k));
  }
  return model;
}

ClassPrediction softmax_prediction(std::span<const double> logits) {
  ClassPrediction p;
  double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  p.probabilities.resize(logits.size());
  for (std::size_t c = 0; c < logits.size(); ++c) z += (p.probabilities[c] = std::exp(logits[c] - mx));
  for (double& v : p.probabilities) v /= z;
  p.label = static_cast<std::size_t>(
      std::max_element(p.probabilities.begin(), p.probabilities.end()) - p.probabilities.begin());
  return p;
}

ClassPrediction predict_gbt(const GbtEnsemble& model, const FeatureVector& x) {
  auto s = model.raw_scores(x);
  if (s.empty()) throw ShapeMismatch("model has no classes");
  return softmax_prediction(s);
}

}  // namespace goalrec
