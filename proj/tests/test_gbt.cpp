#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "goalrec/gbt.hpp"

using namespace goalrec;

namespace {

LabeledFeatures row(std::vector<std::uint32_t> counts, std::size_t label) {
  return {FeatureVector{std::move(counts)}, label};
}

double mean_logloss(const GbtEnsemble& m, const std::vector<LabeledFeatures>& data) {
  double total = 0.0;
  for (const auto& d : data) total -= std::log(predict_gbt(m, d.x).probabilities[d.label]);
  return total / static_cast<double>(data.size());
}

}  // namespace

TEST_SUITE("gbt") {

TEST_CASE("featurize counts occurrences") {
  std::vector<std::uint32_t> trace{2, 2, 0};
  CHECK(featurize(trace, 4).counts == std::vector<std::uint32_t>{1, 0, 2, 0});
  CHECK(featurize({}, 3).counts == std::vector<std::uint32_t>{0, 0, 0});
  std::vector<std::uint32_t> bad{5};
  CHECK_THROWS_AS(featurize(bad, 4), IndexOutOfVocab);
}

TEST_CASE("featurize agrees with a histogram on random traces") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t v = 1 + rng() % 20;
    std::vector<std::uint32_t> t(rng() % 30);
    std::vector<std::uint32_t> hist(v, 0);
    for (auto& a : t) {
      a = static_cast<std::uint32_t>(rng() % v);
      ++hist[a];
    }
    CHECK(featurize(t, v).counts == hist);
  }
}

TEST_CASE("softmax prediction") {
  std::vector<double> z{1.0, 1.0, 0.0};
  auto p = softmax_prediction(z);
  CHECK(p.label == 0);
  CHECK(p.probabilities[0] == doctest::Approx(std::exp(1.0) / (2 * std::exp(1.0) + 1)));
  std::vector<double> big{1000.0, 0.0};
  CHECK(softmax_prediction(big).probabilities[0] == doctest::Approx(1.0));
}

TEST_CASE("zero rounds predict the uniform distribution") {
  GbtConfig cfg;
  cfg.n_rounds = 0;
  std::vector<LabeledFeatures> data{row({1, 0}, 0), row({0, 1}, 1), row({0, 1}, 2)};
  auto m = train_gbt(data, 3, cfg);
  for (double p : predict_gbt(m, data[0].x).probabilities) CHECK(p == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("a depth-0 round is the regularized Newton step") {
  // Leaf = -shrinkage * sum(g) / (sum(h) + lambda) with g = p - y, h = p(1-p).
  std::vector<LabeledFeatures> data{row({1}, 0), row({0}, 0), row({2}, 0), row({3}, 1)};
  GbtConfig cfg;
  cfg.n_rounds = 1;
  cfg.max_depth = 0;
  cfg.shrinkage = 0.5;
  cfg.l2_lambda = 2.0;
  auto m = train_gbt(data, 2, cfg);
  REQUIRE(m.rounds().size() == 1);
  const double p = 0.5, h = p * (1 - p);
  double g0 = 3 * (p - 1) + (p - 0);
  double g1 = 3 * (p - 0) + (p - 1);
  auto scores = m.raw_scores(data[0].x);
  CHECK(scores[0] == doctest::Approx(-0.5 * g0 / (4 * h + 2.0)));
  CHECK(scores[1] == doctest::Approx(-0.5 * g1 / (4 * h + 2.0)));
  CHECK(m.rounds()[0][0].depth() == 0);
}

TEST_CASE("separable data is learned within 20 rounds") {
  // Class k is the only one ever using action k.
  std::mt19937_64 rng(9);
  std::vector<LabeledFeatures> data;
  for (int i = 0; i < 60; ++i) {
    std::size_t label = static_cast<std::size_t>(i % 3);
    std::vector<std::uint32_t> trace{static_cast<std::uint32_t>(label)};
    for (int k = 0; k < 4; ++k) trace.push_back(3 + static_cast<std::uint32_t>(rng() % 3));
    data.push_back({featurize(trace, 6), label});
  }
  GbtConfig cfg;
  cfg.n_rounds = 20;
  GbtTrainLog log;
  auto m = train_gbt(data, 3, cfg, &log);
  std::size_t correct = 0;
  for (const auto& d : data) correct += predict_gbt(m, d.x).label == d.label;
  CHECK(correct == data.size());
  REQUIRE(log.logloss.size() == 21);
  CHECK(log.logloss.front() == doctest::Approx(std::log(3.0)));
  for (std::size_t r = 1; r < log.logloss.size(); ++r) CHECK(log.logloss[r] <= log.logloss[r - 1] + 1e-12);
  CHECK(log.logloss.back() == doctest::Approx(mean_logloss(m, data)));
}

TEST_CASE("identical features fall back to the class prior") {
  std::vector<LabeledFeatures> data;
  for (int i = 0; i < 100; ++i) data.push_back(row({1, 1}, i < 80 ? 0 : 1));
  GbtConfig cfg;
  cfg.n_rounds = 200;
  cfg.l2_lambda = 0.0;
  cfg.shrinkage = 0.5;
  auto m = train_gbt(data, 2, cfg);
  auto p = predict_gbt(m, data[0].x);
  CHECK(p.label == 0);
  CHECK(p.probabilities[0] == doctest::Approx(0.8).epsilon(1e-3));
}

TEST_CASE("trees respect the depth limit") {
  std::mt19937_64 rng(1);
  std::vector<LabeledFeatures> data;
  for (int i = 0; i < 200; ++i) {
    std::vector<std::uint32_t> c(8);
    for (auto& x : c) x = static_cast<std::uint32_t>(rng() % 4);
    data.push_back(row(c, (c[0] + c[3] + c[5]) % 3));
  }
  GbtConfig cfg;
  cfg.n_rounds = 10;
  cfg.max_depth = 2;
  auto m = train_gbt(data, 3, cfg);
  for (const auto& round : m.rounds()) {
    CHECK(round.size() == 3);
    for (const auto& t : round) CHECK(t.depth() <= 2);
  }
}

TEST_CASE("save and load round-trip") {
  std::vector<LabeledFeatures> data{row({2, 0, 1}, 0), row({0, 3, 0}, 1), row({1, 1, 4}, 2), row({0, 0, 1}, 2)};
  GbtConfig cfg;
  cfg.n_rounds = 5;
  auto m = train_gbt(data, 3, cfg);
  std::stringstream buf;
  m.save(buf);
  auto back = GbtEnsemble::load(buf);
  CHECK(back == m);
  for (const auto& d : data) CHECK(predict_gbt(back, d.x).probabilities == predict_gbt(m, d.x).probabilities);
  std::stringstream junk("not a model");
  CHECK_THROWS(GbtEnsemble::load(junk));
}

TEST_CASE("a single class is rejected") {
  std::vector<LabeledFeatures> data{row({1}, 0), row({2}, 0)};
  CHECK_THROWS_AS(train_gbt(data, 2), SingleClassData);
}

TEST_CASE("training is deterministic") {
  std::vector<LabeledFeatures> data{row({2, 0}, 0), row({0, 3}, 1), row({1, 1}, 1), row({3, 1}, 0)};
  CHECK(train_gbt(data, 2) == train_gbt(data, 2));
}

}  // TEST_SUITE
