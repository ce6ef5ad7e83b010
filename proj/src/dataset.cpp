#include "goalrec/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace goalrec {

namespace {

constexpr std::uint64_t kSplitStream = 0x5851f42d4c957f2dull;

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw IoError("bad number '" + std::string(s) + "'");
  return v;
}

std::uint64_t parse_uint(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw IoError("bad integer '" + std::string(s) + "'");
  return v;
}

struct TraceResult {
  std::string problem_key;
  ProblemSpec problem;
  std::vector<std::string> actions;   // names of the plan steps
  std::size_t label = 0;
};

TraceResult plan_instance(const GeneratorConfig& cfg, std::size_t i, std::uint64_t seed,
                          const BuildOptions& options) {
  GeneratedTask gt = generate_task(cfg, i);
  const GroundTask& task = gt.task;
  const std::size_t label = *task.true_goal();
  const GoalHypothesis& goal = task.hypothesis(label);
  Plan plan = gbfs_plan(task, goal, mix_seed(seed, i), options.noise, options.planner);
  Validation v = validate(task, plan, goal);
  if (!v.ok) throw Error("planner returned an invalid plan for instance " + std::to_string(i));

  TraceResult r;
  r.label = label;
  r.problem = std::move(gt.problem);
  r.problem.true_goal.reset();
  r.problem.name = "instance";
  r.problem_key = to_text(r.problem);
  for (ActionId a : plan.actions) r.actions.push_back(task.action(a).str());
  return r;
}

template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

Dataset build_buy(const GeneratorConfig& cfg, std::size_t n) {
  BuyData data = gen_buy(cfg, n);
  Dataset ds;
  ds.vocab = std::move(data.vocabulary);
  ds.hypotheses = std::move(data.hypotheses);
  ds.priors = std::move(data.priors);
  for (auto& t : data.traces) ds.traces.push_back({std::move(t.actions), t.label});
  return ds;
}

}  // namespace

Split make_split(std::size_t n, std::uint64_t seed) {
  if (n < kMinTraces) {
    throw InsufficientTraces("need at least " + std::to_string(kMinTraces) + " traces, got " +
                             std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(mix_seed(seed, kSplitStream));
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t pool = n - kHeldoutSize;
  const std::size_t n_train = (pool * 8 + 5) / 10;  // 80% rounded
  Split s;
  s.heldout.assign(order.begin(), order.begin() + kHeldoutSize);
  s.train.assign(order.begin() + kHeldoutSize, order.begin() + static_cast<std::ptrdiff_t>(kHeldoutSize + n_train));
  s.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(kHeldoutSize + n_train), order.end());
  for (auto* part : {&s.heldout, &s.train, &s.validation}) std::sort(part->begin(), part->end());
  return s;
}

Dataset build_dataset(const GeneratorConfig& cfg, std::size_t n, std::uint64_t seed,
                      const BuildOptions& options) {
  if (n < kMinTraces) {
    throw InsufficientTraces("need at least " + std::to_string(kMinTraces) + " traces, got " +
                             std::to_string(n));
  }
  Dataset ds;
  if (cfg.family == Family::buy) {
    ds = build_buy(cfg, n);
  } else {
    std::vector<TraceResult> results(n);
    parallel_for(n, options.threads, [&](std::size_t i) { results[i] = plan_instance(cfg, i, seed, options); });

    std::set<std::string> names;
    std::map<std::string, std::size_t> problem_index;
    for (auto& r : results) {
      names.insert(r.actions.begin(), r.actions.end());
      auto [it, fresh] = problem_index.emplace(r.problem_key, ds.problems.size());
      if (fresh) {
        r.problem.name = "problem-" + std::to_string(ds.problems.size());
        ds.problems.push_back(std::move(r.problem));
      }
      ds.trace_problem.push_back(it->second);
    }
    ds.vocab.assign(names.begin(), names.end());
    std::map<std::string, std::uint32_t> index;
    for (std::size_t k = 0; k < ds.vocab.size(); ++k) index.emplace(ds.vocab[k], static_cast<std::uint32_t>(k));
    for (auto& r : results) {
      LabeledSequence seq;
      seq.label = r.label;
      for (const auto& a : r.actions) seq.actions.push_back(index.at(a));
      ds.traces.push_back(std::move(seq));
    }
    for (const auto& h : ds.problems.front().hypotheses) ds.hypotheses.push_back(h.name);
    double total = 0.0;
    for (const auto& h : ds.problems.front().hypotheses) total += h.prior;
    for (const auto& h : ds.problems.front().hypotheses) ds.priors.push_back(h.prior / total);
  }
  ds.config = cfg;
  ds.seed = seed;
  ds.split = make_split(n, seed);
  return ds;
}

GroundTask trace_task(const Dataset& ds, std::size_t i) {
  if (!ds.has_model()) throw Error("dataset has no propositional model");
  return ground(*domain_for(ds.config.family), ds.problems.at(ds.trace_problem.at(i)));
}

std::size_t prefix_length(std::size_t n, double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw Error("observation ratio must be in (0, 1]");
  auto k = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n) - 1e-9));
  return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(n, 1));
}

std::vector<std::uint32_t> truncate(std::span<const std::uint32_t> trace, double ratio) {
  auto k = std::min(prefix_length(trace.size(), ratio), trace.size());
  return {trace.begin(), trace.begin() + static_cast<std::ptrdiff_t>(k)};
}

ObservationTrace truncate(const ObservationTrace& trace, double ratio) {
  auto k = std::min(prefix_length(trace.actions.size(), ratio), trace.actions.size());
  return {{trace.actions.begin(), trace.actions.begin() + static_cast<std::ptrdiff_t>(k)}, trace.label};
}

void write_traces(std::ostream& out, std::span<const LabeledSequence> traces) {
  for (const auto& t : traces) {
    out << t.label << '\t';
    for (std::size_t i = 0; i < t.actions.size(); ++i) out << (i ? " " : "") << t.actions[i];
    out << '\n';
  }
}

std::vector<LabeledSequence> read_traces(std::istream& in) {
  std::vector<LabeledSequence> traces;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw IoError("trace line " + std::to_string(lineno) + ": missing tab");
    LabeledSequence t;
    t.label = parse_uint(std::string_view(line).substr(0, tab));
    std::istringstream ids(line.substr(tab + 1));
    std::string tok;
    while (ids >> tok) t.actions.push_back(static_cast<std::uint32_t>(parse_uint(tok)));
    traces.push_back(std::move(t));
  }
  return traces;
}

void write_vocab(std::ostream& out, const std::vector<std::string>& vocab) {
  for (std::size_t i = 0; i < vocab.size(); ++i) out << i << '\t' << vocab[i] << '\n';
}

std::vector<std::string> read_vocab(std::istream& in) {
  std::vector<std::string> vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || parse_uint(std::string_view(line).substr(0, tab)) != vocab.size()) {
      throw IoError("vocabulary ids must be consecutive from 0");
    }
    vocab.push_back(line.substr(tab + 1));
  }
  return vocab;
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("cannot read " + p.string());
  return in;
}

std::string slurp(const std::filesystem::path& p) {
  auto in = open_in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_indices(std::ostream& out, const char* key, const std::vector<std::size_t>& v) {
  out << key;
  for (auto i : v) out << ' ' << i;
  out << '\n';
}

}  // namespace

void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  {
    auto out = open_out(dir / "dataset.txt");
    out << "family=" << to_string(ds.config.family) << '\n'
        << "setting=" << to_string(ds.config.setting) << '\n'
        << "generator_seed=" << ds.config.seed << '\n'
        << "scale=" << format_double(ds.config.scale) << '\n'
        << "grid_goal_pool=" << ds.config.grid_goal_pool << '\n'
        << "seed=" << ds.seed << '\n';
    for (std::size_t h = 0; h < ds.hypotheses.size(); ++h) {
      out << "hypothesis=" << ds.hypotheses[h] << ' ' << format_double(ds.priors[h]) << '\n';
    }
  }
  auto vocab = open_out(dir / "vocab.txt");
  write_vocab(vocab, ds.vocab);
  auto traces = open_out(dir / "traces.txt");
  write_traces(traces, ds.traces);
  auto split = open_out(dir / "split.txt");
  write_indices(split, "train", ds.split.train);
  write_indices(split, "validation", ds.split.validation);
  write_indices(split, "heldout", ds.split.heldout);
  if (ds.has_model()) {
    open_out(dir / "domain.pddl") << to_text(*domain_for(ds.config.family));
    std::filesystem::create_directories(dir / "problems");
    for (std::size_t p = 0; p < ds.problems.size(); ++p) {
      open_out(dir / "problems" / (std::to_string(p) + ".pddl")) << to_text(ds.problems[p]);
    }
    auto tp = open_out(dir / "trace_problems.txt");
    for (auto p : ds.trace_problem) tp << p << '\n';
  }
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset ds;
  {
    auto in = open_in(dir / "dataset.txt");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) throw IoError("dataset.txt: expected key=value");
      std::string key = line.substr(0, eq), value = line.substr(eq + 1);
      if (key == "family") ds.config.family = parse_family(value);
      else if (key == "setting") ds.config.setting = parse_setting(value);
      else if (key == "generator_seed") ds.config.seed = parse_uint(value);
      else if (key == "scale") ds.config.scale = parse_double(value);
      else if (key == "grid_goal_pool") ds.config.grid_goal_pool = parse_uint(value);
      else if (key == "seed") ds.seed = parse_uint(value);
      else if (key == "hypothesis") {
        auto sp = value.rfind(' ');
        if (sp == std::string::npos) throw IoError("dataset.txt: hypothesis needs a prior");
        ds.hypotheses.push_back(value.substr(0, sp));
        ds.priors.push_back(parse_double(std::string_view(value).substr(sp + 1)));
      } else {
        throw IoError("dataset.txt: unknown key '" + key + "'");
      }
    }
  }
  {
    auto in = open_in(dir / "vocab.txt");
    ds.vocab = read_vocab(in);
  }
  {
    auto in = open_in(dir / "traces.txt");
    ds.traces = read_traces(in);
  }
  {
    auto in = open_in(dir / "split.txt");
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream ss(line);
      std::string key, tok;
      ss >> key;
      std::vector<std::size_t>* part = key == "train" ? &ds.split.train
                                     : key == "validation" ? &ds.split.validation
                                     : key == "heldout" ? &ds.split.heldout
                                     : nullptr;
      if (!part) continue;
      while (ss >> tok) part->push_back(parse_uint(tok));
    }
  }
  if (std::filesystem::exists(dir / "trace_problems.txt")) {
    auto in = open_in(dir / "trace_problems.txt");
    std::string tok;
    std::size_t n_problems = 0;
    while (in >> tok) {
      ds.trace_problem.push_back(parse_uint(tok));
      n_problems = std::max(n_problems, ds.trace_problem.back() + 1);
    }
    for (std::size_t p = 0; p < n_problems; ++p) {
      ds.problems.push_back(parse_problem(slurp(dir / "problems" / (std::to_string(p) + ".pddl"))));
    }
  }
  for (const auto& t : ds.traces) {
    if (t.label >= ds.hypotheses.size()) throw IoError("trace label out of range");
    for (auto a : t.actions) {
      if (a >= ds.vocab.size()) throw IoError("trace action id out of range");
    }
  }
  return ds;
}

std::vector<LabeledSequence> select(const Dataset& ds, std::span<const std::size_t> indices) {
  std::vector<LabeledSequence> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(ds.traces.at(i));
  return out;
}

}  // namespace goalrec
