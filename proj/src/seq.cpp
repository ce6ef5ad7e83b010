#include "goalrec/seq.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

namespace goalrec {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void check_sequence(const SeqModel& m, std::span<const std::uint32_t> seq) {
  if (seq.empty()) throw EmptySequence("sequence must contain at least one action");
  for (auto a : seq) {
    if (a >= m.vocab_size()) {
      throw IndexOutOfVocab("action index " + std::to_string(a) + " outside vocabulary of " +
                            std::to_string(m.vocab_size()));
    }
  }
}

/// Activations cached for one step.
struct Step {
  Eigen::VectorXd z;  // [x; h_prev]
  Eigen::VectorXd i, f, g, o, c, c_prev, tanh_c;
};

struct Unrolled {
  std::vector<Step> steps;
  Eigen::VectorXd h;
  Eigen::VectorXd logits;
};

Unrolled unroll(const SeqModel& m, std::span<const std::uint32_t> seq) {
  const auto E = static_cast<Eigen::Index>(m.hyper.d_embed);
  const auto H = static_cast<Eigen::Index>(m.hyper.d_hidden);
  Unrolled u;
  u.steps.reserve(seq.size());
  Eigen::VectorXd h = Eigen::VectorXd::Zero(H);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(H);
  for (auto a : seq) {
    Step s;
    s.z.resize(E + H);
    s.z.head(E) = m.embed.row(a).transpose();
    s.z.tail(H) = h;
    s.i = (m.gate_w[kInput].transpose() * s.z + m.gate_b[kInput]).unaryExpr(&sigmoid);
    s.f = (m.gate_w[kForget].transpose() * s.z + m.gate_b[kForget]).unaryExpr(&sigmoid);
    s.g = (m.gate_w[kCell].transpose() * s.z + m.gate_b[kCell]).array().tanh().matrix();
    s.o = (m.gate_w[kOutput].transpose() * s.z + m.gate_b[kOutput]).unaryExpr(&sigmoid);
    s.c_prev = c;
    c = s.f.cwiseProduct(c) + s.i.cwiseProduct(s.g);
    s.c = c;
    s.tanh_c = c.array().tanh().matrix();
    h = s.o.cwiseProduct(s.tanh_c);
    u.steps.push_back(std::move(s));
  }
  u.h = h;
  u.logits = m.out_w.transpose() * h + m.out_b;
  return u;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  Eigen::VectorXd p = (logits.array() - logits.maxCoeff()).exp().matrix();
  return p / p.sum();
}

/// Adds the gradient of the loss on (seq, label) into `acc`; returns the loss.
double accumulate_gradient(const SeqModel& m, std::span<const std::uint32_t> seq, std::size_t label,
                           SeqModel& acc) {
  const auto E = static_cast<Eigen::Index>(m.hyper.d_embed);
  const auto H = static_cast<Eigen::Index>(m.hyper.d_hidden);
  Unrolled u = unroll(m, seq);
  Eigen::VectorXd p = softmax(u.logits);
  const double loss = -std::log(std::max(p(static_cast<Eigen::Index>(label)), 1e-300));

  Eigen::VectorXd dlogits = p;
  dlogits(static_cast<Eigen::Index>(label)) -= 1.0;
  acc.out_w.noalias() += u.h * dlogits.transpose();
  acc.out_b += dlogits;

  Eigen::VectorXd dh = m.out_w * dlogits;
  Eigen::VectorXd dc = Eigen::VectorXd::Zero(H);
  std::array<Eigen::VectorXd, 4> da;
  for (std::size_t t = u.steps.size(); t-- > 0;) {
    const Step& s = u.steps[t];
    Eigen::VectorXd d_o = dh.cwiseProduct(s.tanh_c);
    dc += dh.cwiseProduct(s.o).cwiseProduct((1.0 - s.tanh_c.array().square()).matrix());
    Eigen::VectorXd d_i = dc.cwiseProduct(s.g);
    Eigen::VectorXd d_g = dc.cwiseProduct(s.i);
    Eigen::VectorXd d_f = dc.cwiseProduct(s.c_prev);
    dc = dc.cwiseProduct(s.f);

    da[kInput] = d_i.array() * s.i.array() * (1.0 - s.i.array());
    da[kForget] = d_f.array() * s.f.array() * (1.0 - s.f.array());
    da[kCell] = d_g.array() * (1.0 - s.g.array().square());
    da[kOutput] = d_o.array() * s.o.array() * (1.0 - s.o.array());

    Eigen::VectorXd dz = Eigen::VectorXd::Zero(E + H);
    for (std::size_t k = 0; k < 4; ++k) {
      acc.gate_w[k].noalias() += s.z * da[k].transpose();
      acc.gate_b[k] += da[k];
      dz.noalias() += m.gate_w[k] * da[k];
    }
    acc.embed.row(seq[t]) += dz.head(E).transpose();
    dh = dz.tail(H);
  }
  return loss;
}

double squared_norm(const SeqModel& m) {
  double total = 0.0;
  for (auto b : m.blocks()) {
    for (double v : b) total += v * v;
  }
  return total;
}

void set_zero(SeqModel& m) {
  for (auto b : m.blocks()) std::fill(b.begin(), b.end(), 0.0);
}

class Optimizer {
 public:
  Optimizer(const SeqModel& shape, const SeqHyper& hyper) : hyper_(hyper) {
    if (hyper.optimizer == SeqOptimizer::adam) {
      m1_ = SeqModel::zeros(shape.vocab_size(), shape.n_classes(), hyper);
      m2_ = m1_;
    }
  }

  void step(SeqModel& model, const SeqModel& grad) {
    auto params = model.blocks();
    auto grads = grad.blocks();
    if (hyper_.optimizer == SeqOptimizer::sgd) {
      for (std::size_t b = 0; b < params.size(); ++b) {
        for (std::size_t j = 0; j < params[b].size(); ++j) params[b][j] -= hyper_.lr * grads[b][j];
      }
      return;
    }
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++t_;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
    auto m1 = m1_.blocks();
    auto m2 = m2_.blocks();
    for (std::size_t b = 0; b < params.size(); ++b) {
      for (std::size_t j = 0; j < params[b].size(); ++j) {
        double g = grads[b][j];
        m1[b][j] = beta1 * m1[b][j] + (1.0 - beta1) * g;
        m2[b][j] = beta2 * m2[b][j] + (1.0 - beta2) * g * g;
        params[b][j] -= hyper_.lr * (m1[b][j] / c1) / (std::sqrt(m2[b][j] / c2) + eps);
      }
    }
  }

 private:
  SeqHyper hyper_;
  SeqModel m1_, m2_;
  std::size_t t_ = 0;
};

}  // namespace

SeqModel SeqModel::zeros(std::size_t vocab, std::size_t n_classes, const SeqHyper& hyper) {
  const auto V = static_cast<Eigen::Index>(vocab);
  const auto E = static_cast<Eigen::Index>(hyper.d_embed);
  const auto H = static_cast<Eigen::Index>(hyper.d_hidden);
  const auto C = static_cast<Eigen::Index>(n_classes);
  SeqModel m;
  m.hyper = hyper;
  m.embed = Eigen::MatrixXd::Zero(V, E);
  for (std::size_t k = 0; k < 4; ++k) {
    m.gate_w[k] = Eigen::MatrixXd::Zero(E + H, H);
    m.gate_b[k] = Eigen::VectorXd::Zero(H);
  }
  m.out_w = Eigen::MatrixXd::Zero(H, C);
  m.out_b = Eigen::VectorXd::Zero(C);
  return m;
}

SeqModel SeqModel::init(std::size_t vocab, std::size_t n_classes, const SeqHyper& hyper,
                        std::uint64_t seed) {
  SeqModel m = zeros(vocab, n_classes, hyper);
  std::mt19937_64 rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(hyper.d_hidden));
  std::uniform_real_distribution<double> u(-bound, bound);
  auto fill = [&](Eigen::MatrixXd& w) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = u(rng);
    }
  };
  fill(m.embed);
  for (auto& w : m.gate_w) fill(w);
  fill(m.out_w);
  m.gate_b[kForget].setOnes();
  return m;
}

std::vector<std::span<double>> SeqModel::blocks() {
  std::vector<std::span<double>> out;
  auto add = [&](auto& t) { out.emplace_back(t.data(), static_cast<std::size_t>(t.size())); };
  add(embed);
  for (auto& w : gate_w) add(w);
  for (auto& b : gate_b) add(b);
  add(out_w);
  add(out_b);
  return out;
}

std::vector<std::span<const double>> SeqModel::blocks() const {
  std::vector<std::span<const double>> out;
  auto add = [&](const auto& t) { out.emplace_back(t.data(), static_cast<std::size_t>(t.size())); };
  add(embed);
  for (const auto& w : gate_w) add(w);
  for (const auto& b : gate_b) add(b);
  add(out_w);
  add(out_b);
  return out;
}

std::size_t SeqModel::parameter_count() const {
  std::size_t n = 0;
  for (auto b : blocks()) n += b.size();
  return n;
}

void SeqModel::save(std::ostream& out) const {
  out << "goalrec-seq 1\n";
  out << "vocab " << vocab_size() << " classes " << n_classes() << " d_embed " << hyper.d_embed
      << " d_hidden " << hyper.d_hidden << " lr " << fmt(hyper.lr) << " batch " << hyper.batch
      << " epochs " << hyper.epochs << " clip " << fmt(hyper.clip_norm) << " optimizer "
      << (hyper.optimizer == SeqOptimizer::adam ? "adam" : "sgd") << '\n';
  for (auto b : blocks()) {
    out << "block " << b.size() << '\n';
    for (std::size_t j = 0; j < b.size(); ++j) out << fmt(b[j]) << (j + 1 == b.size() ? '\n' : ' ');
  }
}

SeqModel SeqModel::load(std::istream& in) {
  auto expect = [&](const std::string& want) {
    std::string tok;
    if (!(in >> tok) || tok != want) throw Error("model file: expected '" + want + "'");
  };
  auto number = [&]() {
    std::string tok;
    in >> tok;
    double v = 0.0;
    auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || end != tok.data() + tok.size()) {
      throw Error("malformed number '" + tok + "' in model file");
    }
    return v;
  };
  expect("goalrec-seq");
  int version = 0;
  if (!(in >> version) || version != 1) throw Error("unsupported sequence model version");
  std::size_t vocab = 0, classes = 0;
  SeqHyper h;
  std::string opt;
  expect("vocab");
  in >> vocab;
  expect("classes");
  in >> classes;
  expect("d_embed");
  in >> h.d_embed;
  expect("d_hidden");
  in >> h.d_hidden;
  expect("lr");
  h.lr = number();
  expect("batch");
  in >> h.batch;
  expect("epochs");
  in >> h.epochs;
  expect("clip");
  h.clip_norm = number();
  expect("optimizer");
  in >> opt;
  if (!in) throw Error("truncated sequence model header");
  if (opt == "adam") {
    h.optimizer = SeqOptimizer::adam;
  } else if (opt == "sgd") {
    h.optimizer = SeqOptimizer::sgd;
  } else {
    throw Error("unknown optimizer '" + opt + "'");
  }
  SeqModel m = zeros(vocab, classes, h);
  for (auto b : m.blocks()) {
    expect("block");
    std::size_t n = 0;
    in >> n;
    if (n != b.size()) throw Error("sequence model block has the wrong size");
    for (auto& v : b) v = number();
  }
  return m;
}

bool SeqModel::operator==(const SeqModel& other) const {
  if (vocab_size() != other.vocab_size() || n_classes() != other.n_classes() ||
      hyper.d_embed != other.hyper.d_embed || hyper.d_hidden != other.hyper.d_hidden) {
    return false;
  }
  auto a = blocks();
  auto b = other.blocks();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!std::equal(a[k].begin(), a[k].end(), b[k].begin(), b[k].end())) return false;
  }
  return true;
}

Eigen::VectorXd forward(const SeqModel& m, std::span<const std::uint32_t> seq) {
  check_sequence(m, seq);
  return softmax(unroll(m, seq).logits);
}

SeqGradient backward(const SeqModel& m, std::span<const std::uint32_t> seq, std::size_t label) {
  check_sequence(m, seq);
  if (label >= m.n_classes()) throw Error("label outside class range");
  SeqGradient g{SeqModel::zeros(m.vocab_size(), m.n_classes(), m.hyper), 0.0};
  g.loss = accumulate_gradient(m, seq, label, g.grad);
  return g;
}

ClassPrediction predict_seq(const SeqModel& m, std::span<const std::uint32_t> seq) {
  check_sequence(m, seq);
  Eigen::VectorXd logits = unroll(m, seq).logits;
  return softmax_prediction(std::span<const double>(logits.data(), static_cast<std::size_t>(logits.size())));
}

void SeqTrainLog::write_csv(std::ostream& out) const {
  out << "epoch,batch,loss\n";
  for (const auto& r : rows) out << r.epoch << ',' << r.batch << ',' << fmt(r.loss) << '\n';
}

SeqModel train_seq(std::span<const LabeledSequence> data, std::size_t vocab, std::size_t n_classes,
                   const SeqHyper& hyper, std::uint64_t seed, SeqTrainLog* log) {
  std::vector<std::size_t> seen(n_classes, 0);
  for (const auto& d : data) {
    if (d.label >= n_classes) throw Error("label outside class range");
    ++seen[d.label];
  }
  if (std::count_if(seen.begin(), seen.end(), [](std::size_t c) { return c > 0; }) < 2) {
    throw SingleClassData("training data must contain at least two classes");
  }
  if (hyper.batch == 0) throw Error("batch size must be positive");

  std::mt19937_64 rng(seed);
  SeqModel model = SeqModel::init(vocab, n_classes, hyper, rng());
  for (const auto& d : data) check_sequence(model, d.actions);
  Optimizer opt(model, hyper);
  SeqModel grad = SeqModel::zeros(vocab, n_classes, hyper);

  std::vector<std::size_t> order(data.size());
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return data[a].actions.size() < data[b].actions.size();
    });
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t i = 0; i < order.size(); ++i) {
      bool fresh = batches.empty() || batches.back().size() >= hyper.batch ||
                   data[batches.back().front()].actions.size() != data[order[i]].actions.size();
      if (fresh) batches.emplace_back();
      batches.back().push_back(order[i]);
    }
    std::shuffle(batches.begin(), batches.end(), rng);

    for (std::size_t b = 0; b < batches.size(); ++b) {
      set_zero(grad);
      double loss = 0.0;
      for (std::size_t i : batches[b]) {
        loss += accumulate_gradient(model, data[i].actions, data[i].label, grad);
      }
      const double scale = 1.0 / static_cast<double>(batches[b].size());
      for (auto blk : grad.blocks()) {
        for (double& v : blk) v *= scale;
      }
      const double norm = std::sqrt(squared_norm(grad));
      if (hyper.clip_norm > 0.0 && norm > hyper.clip_norm) {
        const double shrink = hyper.clip_norm / norm;
        for (auto blk : grad.blocks()) {
          for (double& v : blk) v *= shrink;
        }
      }
      opt.step(model, grad);
      if (log) log->rows.push_back({epoch, b, loss * scale});
    }
  }
  return model;
}

std::vector<CurvePoint> learning_curve(std::span<const LabeledSequence> train,
                                       const std::vector<std::size_t>& sizes,
                                       std::span<const LabeledSequence> eval, std::size_t vocab,
                                       std::size_t n_classes, const SeqHyper& hyper,
                                       std::uint64_t seed) {
  if (eval.empty()) throw Error("learning curve needs a nonempty evaluation set");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0 || sizes[i] > train.size() || (i > 0 && sizes[i] <= sizes[i - 1])) {
      throw Error("learning-curve sizes must be strictly increasing and within the training set");
    }
  }
  std::vector<CurvePoint> curve;
  for (std::size_t n : sizes) {
    SeqModel m = train_seq(train.first(n), vocab, n_classes, hyper, seed);
    std::size_t correct = 0;
    for (const auto& e : eval) correct += predict_seq(m, e.actions).label == e.label ? 1 : 0;
    curve.push_back({n, 100.0 * static_cast<double>(correct) / static_cast<double>(eval.size())});
  }
  return curve;
}

}  // namespace goalrec
