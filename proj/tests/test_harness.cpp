#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "goalrec/dataset.hpp"
#include "goalrec/evaluation.hpp"
#include "goalrec/report.hpp"

using namespace goalrec;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("goalrec-test-" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("split sizes and disjointness") {
  for (std::size_t n : {130u, 200u, 500u}) {
    auto s = make_split(n, 4);
    CHECK(s.heldout.size() == 100);
    std::size_t pool = n - 100;
    CHECK(s.train.size() == (pool * 8 + 5) / 10);
    CHECK(s.train.size() + s.validation.size() == pool);
    std::vector<std::size_t> all;
    for (const auto* part : {&s.train, &s.validation, &s.heldout}) {
      CHECK(std::is_sorted(part->begin(), part->end()));
      all.insert(all.end(), part->begin(), part->end());
    }
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < n; ++i) CHECK(all[i] == i);
  }
  auto s = make_split(200, 1);
  CHECK(s.train.size() == 80);
  CHECK(s.validation.size() == 20);
  CHECK(make_split(200, 1) == s);
  CHECK_FALSE(make_split(200, 2) == s);
  CHECK_THROWS_AS(make_split(129, 1), InsufficientTraces);
}

TEST_CASE("prefix lengths") {
  CHECK(prefix_length(10, 0.3) == 3);
  CHECK(prefix_length(1, 0.1) == 1);
  CHECK(prefix_length(7, 0.5) == 4);
  CHECK(prefix_length(10, 0.7) == 7);
  std::vector<std::uint32_t> t{4, 5, 6, 7, 8, 9, 10};
  CHECK(truncate(t, 0.5) == std::vector<std::uint32_t>{4, 5, 6, 7});
  std::mt19937_64 rng(8);
  for (int i = 0; i < 1000; ++i) {
    std::size_t n = 1 + rng() % 60;
    double r = kObservationRatios[rng() % 4];
    std::size_t k = prefix_length(n, r);
    CHECK(k >= 1);
    CHECK(k <= n);
    // k is the least length covering a fraction r.
    CHECK(static_cast<double>(k) >= r * static_cast<double>(n) - 1e-9);
    if (k > 1) CHECK(static_cast<double>(k - 1) < r * static_cast<double>(n) - 1e-9);
  }
}

TEST_CASE("trace and vocabulary files round-trip") {
  std::vector<LabeledSequence> traces{{{0, 3, 3}, 1}, {{2}, 0}};
  std::stringstream buf;
  write_traces(buf, traces);
  auto back = read_traces(buf);
  REQUIRE(back.size() == 2);
  CHECK(back[0].actions == traces[0].actions);
  CHECK(back[1].label == 0);
  std::vector<std::string> vocab{"(a x)", "(b)"};
  std::stringstream vb;
  write_vocab(vb, vocab);
  CHECK(read_vocab(vb) == vocab);
}

TEST_CASE("report csv") {
  EvalReport empty;
  CHECK(to_csv(empty) == "method,domain,setting,ratio,accuracy,seconds\n");
  CHECK(parse_csv(to_csv(empty)) == empty);
  EvalReport r;
  r.rows.push_back({"LGR", "buy", "set1", 0.1, std::nullopt, std::nullopt});
  r.rows.push_back({"GBT", "buy", "set1", 0.3, 97.5, 1.25e-5});
  std::string csv = to_csv(r);
  CHECK(csv.find("LGR,buy,set1,0.1,-,-") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(parse_csv(csv) == r);
  CHECK_THROWS(parse_csv("wrong,header\n"));
  r.sort();
  CHECK(r.rows.front().method == "GBT");
  CHECK(to_table(r).find("97.5") != std::string::npos);
}

TEST_CASE("method configuration") {
  auto cfg = parse_method_config("# comment\ngbt.rounds = 7\nseq.optimizer=sgd\nlgr.theta=0.2\nseed=9\n");
  CHECK(cfg.gbt.n_rounds == 7);
  CHECK(cfg.seq.optimizer == SeqOptimizer::sgd);
  CHECK(cfg.lgr.theta == 0.2);
  CHECK(cfg.seed == 9);
  CHECK_THROWS(parse_method_config("gbt.colour=red\n"));
}

TEST_CASE("buy dataset end to end") {
  GeneratorConfig cfg{Family::buy, Setting::set1, 3, 1.0};
  Dataset ds = build_dataset(cfg, 200, 5);
  CHECK(ds.traces.size() == 200);
  CHECK(ds.split.heldout.size() == 100);
  CHECK(ds.split.train.size() == 80);
  CHECK(ds.split.validation.size() == 20);
  CHECK_FALSE(ds.has_model());
  CHECK(ds.vocab.size() == 6);

  GbtConfig g;
  g.n_rounds = 20;
  GbtMethod gbt(g);
  LandmarkMethod lgr;
  std::vector<Method*> methods{&lgr, &gbt};
  EvalOptions opts;
  opts.record_timing = false;
  auto report = evaluate(methods, ds, opts);
  REQUIRE(report.rows.size() == 8);
  for (const auto& row : report.rows) {
    if (row.method == "LGR") {
      CHECK_FALSE(row.accuracy.has_value());
    } else {
      CHECK(*row.accuracy >= 95.0);
      CHECK(row.seconds == 0.0);
    }
  }

  SUBCASE("save and load") {
    auto dir = scratch_dir("buy");
    save_dataset(ds, dir);
    Dataset back = load_dataset(dir);
    CHECK(back.vocab == ds.vocab);
    CHECK(back.split == ds.split);
    CHECK(back.traces.size() == ds.traces.size());
    CHECK(back.traces[17].actions == ds.traces[17].actions);
    std::filesystem::remove_all(dir);
  }
  SUBCASE("too few traces") {
    CHECK_THROWS_AS(build_dataset(cfg, 100, 5), InsufficientTraces);
  }
}

TEST_CASE("STRIPS dataset round-trips through disk") {
  GeneratorConfig cfg{Family::blockwords, Setting::set2, 2, 0.5};
  Dataset ds = build_dataset(cfg, 130, 3);
  CHECK(ds.has_model());
  CHECK(ds.trace_problem.size() == 130);
  for (std::size_t i : {0u, 50u, 129u}) {
    GroundTask t = trace_task(ds, i);
    Plan p;
    for (auto a : ds.traces[i].actions) p.actions.push_back(*t.find_action(ds.vocab[a]));
    CHECK(validate(t, p, t.hypothesis(ds.traces[i].label)).ok);
  }
  auto dir = scratch_dir("blocks");
  save_dataset(ds, dir);
  Dataset back = load_dataset(dir);
  CHECK(back.problems == ds.problems);
  CHECK(back.trace_problem == ds.trace_problem);
  CHECK(back.hypotheses == ds.hypotheses);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(load_dataset(dir), IoError);
}

TEST_CASE("training views include prefixes") {
  GeneratorConfig cfg{Family::buy, Setting::set1, 3, 1.0};
  Dataset ds = build_dataset(cfg, 130, 5);
  std::vector<std::size_t> one{ds.split.train.front()};
  auto plain = training_sequences(ds, one, {false});
  REQUIRE(plain.size() == 1);
  auto augmented = training_sequences(ds, one, {true});
  CHECK(augmented.size() > 1);
  CHECK(augmented.back().actions == plain[0].actions);
  for (const auto& s : augmented) CHECK(s.label == plain[0].label);
}

}  // TEST_SUITE
