#include "goalrec/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

namespace goalrec {

// ---------------------------------------------------------------------------
// LGR

void LandmarkMethod::prepare(const Dataset& ds) {
  if (!ds.has_model()) {
    throw IncompatibleMethod("landmark recognition cannot handle numeric variables");
  }
  problems_.clear();
  std::map<std::size_t, std::size_t> users;
  for (auto i : ds.split.heldout) ++users[ds.trace_problem.at(i)];
  for (auto [p, count] : users) {
    auto start = std::chrono::steady_clock::now();
    Problem prob;
    prob.task = std::make_shared<const GroundTask>(ground(*domain_for(ds.config.family), ds.problems[p]));
    prob.graphs = extract_all_landmarks(*prob.task);
    prob.action_of.reserve(ds.vocab.size());
    for (const auto& name : ds.vocab) prob.action_of.push_back(prob.task->find_action(name));
    prob.setup_share = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() /
                       static_cast<double>(count);
    problems_.emplace(p, std::move(prob));
  }
}

std::size_t LandmarkMethod::predict(const Dataset& ds, std::size_t trace,
                                    std::span<const std::uint32_t> prefix) const {
  auto it = problems_.find(ds.trace_problem.at(trace));
  if (it == problems_.end()) throw Error("trace " + std::to_string(trace) + " was not prepared");
  const Problem& prob = it->second;
  ObservationTrace obs;
  obs.actions.reserve(prefix.size());
  for (auto a : prefix) {
    const auto& id = prob.action_of.at(a);
    if (!id) throw Error("action '" + ds.vocab[a] + "' does not exist in this problem");
    obs.actions.push_back(*id);
  }
  std::optional<std::span<const double>> priors;
  if (options_.use_prior) priors = std::span<const double>(ds.priors);
  auto result = recognize_trace(prob.task.get(), prob.graphs, obs, options_.theta, priors);
  if (options_.use_prior || options_.tie_break == TieBreak::lowest_index) return result.predicted;
  // Highest-index member among the best-scoring candidates.
  std::size_t best = result.predicted;
  for (auto h : result.candidate_set) {
    if (result.scores[h] == result.scores[result.predicted]) best = std::max(best, h);
  }
  return best;
}

double LandmarkMethod::setup_seconds(const Dataset& ds, std::size_t trace) const {
  auto it = problems_.find(ds.trace_problem.at(trace));
  return it == problems_.end() ? 0.0 : it->second.setup_share;
}

// ---------------------------------------------------------------------------
// Learned methods

std::vector<LabeledSequence> training_sequences(const Dataset& ds, std::span<const std::size_t> indices,
                                                const TrainingOptions& options) {
  std::vector<LabeledSequence> out;
  for (auto i : indices) {
    const auto& t = ds.traces.at(i);
    if (options.augment_prefixes) {
      std::size_t last = 0;
      for (double r : kObservationRatios) {
        auto k = prefix_length(t.actions.size(), r);
        if (k == last || k == t.actions.size()) continue;
        last = k;
        out.push_back({truncate(t.actions, r), t.label});
      }
    }
    out.push_back(t);
  }
  return out;
}

void GbtMethod::prepare(const Dataset& ds) {
  if (pretrained_) {
    if (model_->vocab_size() != ds.vocab.size() || model_->n_classes() != ds.n_classes()) {
      throw ShapeMismatch("model does not match the dataset vocabulary or hypotheses");
    }
    return;
  }
  auto seqs = training_sequences(ds, ds.split.train, training_);
  std::vector<LabeledFeatures> data;
  data.reserve(seqs.size());
  for (const auto& s : seqs) data.push_back({featurize(s.actions, ds.vocab.size()), s.label});
  log_ = {};
  model_ = train_gbt(data, ds.n_classes(), cfg_, &log_);
}

std::size_t GbtMethod::predict(const Dataset& ds, std::size_t, std::span<const std::uint32_t> prefix) const {
  return predict_gbt(*model_, featurize(prefix, ds.vocab.size())).label;
}

void SeqMethod::prepare(const Dataset& ds) {
  if (pretrained_) {
    if (model_->vocab_size() != ds.vocab.size() || model_->n_classes() != ds.n_classes()) {
      throw ShapeMismatch("model does not match the dataset vocabulary or hypotheses");
    }
    return;
  }
  auto seqs = training_sequences(ds, ds.split.train, training_);
  model_ = train_seq(seqs, ds.vocab.size(), ds.n_classes(), hyper_, seed_);
}

std::size_t SeqMethod::predict(const Dataset&, std::size_t, std::span<const std::uint32_t> prefix) const {
  return predict_seq(*model_, prefix).label;
}

// ---------------------------------------------------------------------------
// Evaluation

EvalReport evaluate(std::span<Method* const> methods, const Dataset& ds, const EvalOptions& options) {
  EvalReport report;
  const std::string domain = to_string(ds.config.family);
  const std::string setting = to_string(ds.config.setting);
  for (Method* m : methods) {
    bool supported = true;
    try {
      m->prepare(ds);
    } catch (const IncompatibleMethod&) {
      supported = false;
    }
    for (double r : options.ratios) {
      ReportRow row{m->name(), domain, setting, r, std::nullopt, std::nullopt};
      if (supported) {
        std::size_t correct = 0;
        double seconds = 0.0;
        for (auto i : ds.split.heldout) {
          const auto& t = ds.traces[i];
          auto prefix = truncate(t.actions, r);
          auto start = std::chrono::steady_clock::now();
          std::size_t predicted = m->predict(ds, i, prefix);
          seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          // A problem's setup is paid once across all ratios.
          if (options.charge_setup) seconds += m->setup_seconds(ds, i) / static_cast<double>(options.ratios.size());
          correct += predicted == t.label;
        }
        const auto n = static_cast<double>(ds.split.heldout.size());
        row.accuracy = 100.0 * static_cast<double>(correct) / n;
        row.seconds = options.record_timing ? seconds / n : 0.0;
      }
      report.rows.push_back(std::move(row));
    }
  }
  report.sort();
  return report;
}

EvalReport evaluate(Method& method, const Dataset& ds, const EvalOptions& options) {
  Method* m = &method;
  return evaluate(std::span<Method* const>(&m, 1), ds, options);
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

template <typename T>
T parse_value(const std::string& key, std::string_view s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error("config: bad value '" + std::string(s) + "' for " + key);
  }
  return v;
}

bool parse_bool(const std::string& key, std::string_view s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw Error("config: bad boolean '" + std::string(s) + "' for " + key);
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

MethodConfig parse_method_config(std::string_view text) {
  MethodConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    using S = std::size_t;
    if (key == "gbt.rounds") cfg.gbt.n_rounds = parse_value<S>(key, value);
    else if (key == "gbt.max_depth") cfg.gbt.max_depth = parse_value<S>(key, value);
    else if (key == "gbt.shrinkage") cfg.gbt.shrinkage = parse_value<double>(key, value);
    else if (key == "gbt.lambda") cfg.gbt.l2_lambda = parse_value<double>(key, value);
    else if (key == "gbt.min_child_weight") cfg.gbt.min_child_weight = parse_value<double>(key, value);
    else if (key == "seq.d_embed") cfg.seq.d_embed = parse_value<S>(key, value);
    else if (key == "seq.d_hidden") cfg.seq.d_hidden = parse_value<S>(key, value);
    else if (key == "seq.lr") cfg.seq.lr = parse_value<double>(key, value);
    else if (key == "seq.batch") cfg.seq.batch = parse_value<S>(key, value);
    else if (key == "seq.epochs") cfg.seq.epochs = parse_value<S>(key, value);
    else if (key == "seq.clip_norm") cfg.seq.clip_norm = parse_value<double>(key, value);
    else if (key == "seq.optimizer") {
      if (value == "sgd") cfg.seq.optimizer = SeqOptimizer::sgd;
      else if (value == "adam") cfg.seq.optimizer = SeqOptimizer::adam;
      else throw Error("config: seq.optimizer must be sgd or adam");
    } else if (key == "lgr.theta") cfg.lgr.theta = parse_value<double>(key, value);
    else if (key == "train.augment_prefixes") cfg.training.augment_prefixes = parse_bool(key, value);
    else if (key == "seed") cfg.seed = parse_value<std::uint64_t>(key, value);
    else throw Error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  return cfg;
}

MethodConfig load_method_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_method_config(ss.str());
}

// ---------------------------------------------------------------------------
// Learning curves

std::vector<CurveRow> learning_curve_eval(const Dataset& ds, const std::vector<std::size_t>& sizes,
                                          const std::string& method, const MethodConfig& cfg,
                                          const EvalOptions& options) {
  if (!std::is_sorted(sizes.begin(), sizes.end()) ||
      std::adjacent_find(sizes.begin(), sizes.end()) != sizes.end()) {
    throw Error("learning-curve sizes must be strictly increasing");
  }
  std::vector<std::size_t> pool = ds.split.train;
  pool.insert(pool.end(), ds.split.validation.begin(), ds.split.validation.end());
  if (!sizes.empty() && sizes.back() > pool.size()) {
    throw InsufficientTraces("largest curve size " + std::to_string(sizes.back()) + " exceeds the " +
                             std::to_string(pool.size()) + " available training traces");
  }
  std::vector<CurveRow> rows;
  for (auto n : sizes) {
    Dataset sub = ds;
    sub.split.train.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
    std::unique_ptr<Method> m;
    if (method == "gbt") m = std::make_unique<GbtMethod>(cfg.gbt, cfg.training);
    else if (method == "seq") m = std::make_unique<SeqMethod>(cfg.seq, cfg.seed, cfg.training);
    else throw Error("unknown learning-curve method '" + method + "'");
    auto report = evaluate(*m, sub, options);
    CurveRow row;
    row.n_traces = n;
    for (const auto& r : report.rows) row.ratio_accuracy.push_back(r.accuracy.value_or(0.0));
    double sum = 0.0;
    for (double a : row.ratio_accuracy) sum += a;
    row.accuracy = row.ratio_accuracy.empty() ? 0.0 : sum / static_cast<double>(row.ratio_accuracy.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string curve_csv(const std::vector<CurveRow>& rows, std::span<const double> ratios) {
  std::ostringstream out;
  out << "n_traces,accuracy";
  for (double r : ratios) out << ",acc_" << r;
  out << '\n';
  char buf[32];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%.2f", row.accuracy);
    out << row.n_traces << ',' << buf;
    for (double a : row.ratio_accuracy) {
      std::snprintf(buf, sizeof buf, "%.2f", a);
      out << ',' << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace goalrec
