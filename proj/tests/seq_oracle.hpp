// Loop-based LSTM reference and a finite-difference gradient check.
#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "goalrec/seq.hpp"

namespace testing {

using namespace goalrec;

inline std::vector<double> scalar_forward(const SeqModel& m, std::span<const std::uint32_t> seq) {
  const std::size_t E = m.hyper.d_embed, H = m.hyper.d_hidden, K = m.n_classes();
  auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  std::vector<double> h(H, 0.0), c(H, 0.0);
  for (auto a : seq) {
    std::vector<double> z(E + H);
    for (std::size_t e = 0; e < E; ++e) z[e] = m.embed(a, static_cast<Eigen::Index>(e));
    for (std::size_t j = 0; j < H; ++j) z[E + j] = h[j];
    std::vector<double> pre[4];
    for (std::size_t g = 0; g < 4; ++g) {
      pre[g].assign(H, 0.0);
      for (std::size_t j = 0; j < H; ++j) {
        double s = m.gate_b[g][static_cast<Eigen::Index>(j)];
        for (std::size_t r = 0; r < E + H; ++r) {
          s += m.gate_w[g](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) * z[r];
        }
        pre[g][j] = s;
      }
    }
    for (std::size_t j = 0; j < H; ++j) {
      c[j] = sig(pre[kForget][j]) * c[j] + sig(pre[kInput][j]) * std::tanh(pre[kCell][j]);
      h[j] = sig(pre[kOutput][j]) * std::tanh(c[j]);
    }
  }
  std::vector<double> logits(K);
  for (std::size_t k = 0; k < K; ++k) {
    double s = m.out_b[static_cast<Eigen::Index>(k)];
    for (std::size_t j = 0; j < H; ++j) s += m.out_w(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) * h[j];
    logits[k] = s;
  }
  double mx = *std::max_element(logits.begin(), logits.end()), total = 0.0;
  for (auto& l : logits) total += (l = std::exp(l - mx));
  for (auto& l : logits) l /= total;
  return logits;
}

inline double scalar_loss(const SeqModel& m, std::span<const std::uint32_t> seq, std::size_t label) {
  return -std::log(scalar_forward(m, seq)[label]);
}

/// max |analytic - numeric| / max(|analytic| + |numeric|, 1e-8) over every
/// parameter, numeric by central differences on the reference loss.
inline double gradcheck_relative_error(SeqModel m, std::span<const std::uint32_t> seq, std::size_t label,
                                       double eps = 1e-5) {
  auto analytic = backward(m, seq, label);
  auto grads = analytic.grad.blocks();
  auto params = m.blocks();
  double worst = 0.0;
  for (std::size_t b = 0; b < params.size(); ++b) {
    for (std::size_t i = 0; i < params[b].size(); ++i) {
      const double keep = params[b][i];
      params[b][i] = keep + eps;
      const double up = scalar_loss(m, seq, label);
      params[b][i] = keep - eps;
      const double down = scalar_loss(m, seq, label);
      params[b][i] = keep;
      const double numeric = (up - down) / (2 * eps);
      const double a = grads[b][i];
      worst = std::max(worst, std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-8));
    }
  }
  return worst;
}

}  // namespace testing
