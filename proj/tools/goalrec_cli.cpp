// Command-line front end: dataset generation, planning, training,
// recognition and evaluation.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "goalrec/dataset.hpp"
#include "goalrec/evaluation.hpp"
#include "goalrec/planner.hpp"

using namespace goalrec;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MethodConfig method_config(const std::string& path) {
  return path.empty() ? MethodConfig{} : load_method_config(path);
}

std::vector<std::uint32_t> parse_ids(const std::string& s) {
  std::vector<std::uint32_t> ids;
  std::istringstream in(s);
  std::uint64_t v;
  while (in >> v) ids.push_back(static_cast<std::uint32_t>(v));
  if (!in.eof()) throw Error("observations must be space-separated action ids");
  return ids;
}

std::unique_ptr<Method> load_model_method(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::string magic;
  in >> magic;
  in.seekg(0);
  if (magic == "goalrec-gbt") return std::make_unique<GbtMethod>(GbtEnsemble::load(in));
  if (magic == "goalrec-seq") return std::make_unique<SeqMethod>(SeqModel::load(in));
  throw IoError(path + " is not a model file");
}

std::unique_ptr<Method> make_method(const std::string& name, const MethodConfig& cfg) {
  if (name == "lgr") return std::make_unique<LandmarkMethod>(cfg.lgr);
  if (name == "lgr+prior") {
    LgrOptions o = cfg.lgr;
    o.use_prior = true;
    return std::make_unique<LandmarkMethod>(o);
  }
  if (name == "gbt") return std::make_unique<GbtMethod>(cfg.gbt, cfg.training);
  if (name == "seq" || name == "lstm") return std::make_unique<SeqMethod>(cfg.seq, cfg.seed, cfg.training);
  return load_model_method(name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goal recognition workbench"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a labeled trace dataset");
  std::string family = "blockwords", setting = "set1", out_dir;
  std::size_t n = 500, pool = 10, threads = 0;
  std::uint64_t seed = 1, gen_seed = 1;
  double scale = 1.0, noise = 1.0;
  gen->add_option("--family", family, "blockwords | logistics | grid | buy")->capture_default_str();
  gen->add_option("--setting", setting, "set1 | set2")->capture_default_str();
  gen->add_option("-n,--traces", n, "Number of traces")->capture_default_str();
  gen->add_option("--seed", seed, "Planner and split seed")->capture_default_str();
  gen->add_option("--generator-seed", gen_seed, "Seed of the hypothesis set and layouts")->capture_default_str();
  gen->add_option("--scale", scale, "Size multiplier in (0,1]")->capture_default_str();
  gen->add_option("--goal-pool", pool, "Goal cells of the random-goal grid")->capture_default_str();
  gen->add_option("--noise", noise, "Planner tie-break noise")->capture_default_str();
  gen->add_option("--threads", threads, "Planning threads (0 = all cores)")->capture_default_str();
  gen->add_option("-o,--out", out_dir, "Output directory")->required();

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "Plan for one hypothesis of a problem file");
  std::string domain_path, problem_path;
  std::optional<std::size_t> goal_index;
  plan_cmd->add_option("--domain", domain_path, "Domain file")->required()->check(CLI::ExistingFile);
  plan_cmd->add_option("--problem", problem_path, "Problem file")->required()->check(CLI::ExistingFile);
  plan_cmd->add_option("--goal", goal_index, "Hypothesis index (default: the true goal, else 0)");
  plan_cmd->add_option("--seed", seed, "Tie-break seed")->capture_default_str();
  plan_cmd->add_option("--noise", noise, "Tie-break noise")->capture_default_str();

  // train
  auto* train = app.add_subcommand("train", "Train a learned recognizer on a dataset");
  std::string method = "gbt", data_dir, config_path, model_path, log_path;
  train->add_option("--method", method, "gbt | seq")->capture_default_str();
  train->add_option("--data", data_dir, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  train->add_option("--config", config_path, "Hyperparameter file")->check(CLI::ExistingFile);
  train->add_option("-o,--out", model_path, "Model file")->required();
  train->add_option("--log", log_path, "Training log CSV");

  // recognize
  auto* rec = app.add_subcommand("recognize", "Predict the goal of one observed trace prefix");
  std::optional<std::size_t> trace_index;
  std::string observations;
  std::size_t problem_index = 0;
  double ratio = 1.0;
  rec->add_option("--method", method, "lgr | lgr+prior | <model file>")->required();
  rec->add_option("--data", data_dir, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  auto* by_trace = rec->add_option("--trace", trace_index, "Trace index in the dataset");
  auto* by_obs = rec->add_option("--observations", observations, "Space-separated action ids");
  by_trace->excludes(by_obs);
  rec->add_option("--problem", problem_index, "Problem index for --observations")->capture_default_str();
  rec->add_option("--ratio", ratio, "Observation ratio")->capture_default_str();
  rec->add_option("--config", config_path, "Hyperparameter file")->check(CLI::ExistingFile);

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate methods on the heldout traces");
  std::vector<std::string> methods{"lgr", "lgr+prior", "gbt", "seq"};
  std::vector<double> ratios(kObservationRatios.begin(), kObservationRatios.end());
  std::string report_path, table_path;
  bool no_timing = false;
  bool predict_only = false;
  ev->add_option("--data", data_dir, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  ev->add_option("--methods", methods, "lgr, lgr+prior, gbt, seq or model files")->delimiter(',');
  ev->add_option("--ratios", ratios, "Observation ratios")->delimiter(',');
  ev->add_option("--config", config_path, "Hyperparameter file")->check(CLI::ExistingFile);
  ev->add_option("-o,--out", report_path, "CSV report (default: stdout)");
  ev->add_option("--table", table_path, "Aligned text table");
  ev->add_flag("--no-timing", no_timing, "Write zero timings so reports are reproducible");
  ev->add_flag("--predict-only", predict_only, "Leave per-problem landmark extraction out of LGR timings");

  // curve
  auto* curve = app.add_subcommand("curve", "Accuracy against the number of training traces");
  std::vector<std::size_t> sizes{10, 50, 100, 200};
  std::string curve_path;
  curve->add_option("--data", data_dir, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  curve->add_option("--method", method, "seq | gbt")->capture_default_str();
  curve->add_option("--sizes", sizes, "Training-set sizes")->delimiter(',');
  curve->add_option("--ratios", ratios, "Observation ratios")->delimiter(',');
  curve->add_option("--config", config_path, "Hyperparameter file")->check(CLI::ExistingFile);
  curve->add_option("-o,--out", curve_path, "CSV output (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      GeneratorConfig cfg{parse_family(family), parse_setting(setting), gen_seed, scale, pool};
      BuildOptions opts;
      opts.noise = noise;
      opts.threads = threads;
      Dataset ds = build_dataset(cfg, n, seed, opts);
      save_dataset(ds, out_dir);
      std::cout << ds.traces.size() << " traces, " << ds.vocab.size() << " actions, " << ds.n_classes()
                << " hypotheses -> " << out_dir << '\n';
    } else if (*plan_cmd) {
      DomainSchema domain = parse_domain(slurp(domain_path));
      ProblemSpec problem = parse_problem(slurp(problem_path));
      GroundTask task = ground(domain, problem);
      std::size_t g = goal_index.value_or(task.true_goal().value_or(0));
      if (g >= task.hypotheses().size()) throw Error("goal index out of range");
      Plan plan = gbfs_plan(task, task.hypothesis(g), seed, noise);
      for (ActionId a : plan.actions) std::cout << task.action(a).str() << '\n';
      std::cerr << "; " << plan.cost() << " steps to " << task.hypothesis(g).name << '\n';
    } else if (*train) {
      Dataset ds = load_dataset(data_dir);
      MethodConfig cfg = method_config(config_path);
      std::ofstream out(model_path);
      if (!out) throw IoError("cannot write " + model_path);
      auto seqs = training_sequences(ds, ds.split.train, cfg.training);
      if (method == "gbt") {
        std::vector<LabeledFeatures> data;
        for (const auto& s : seqs) data.push_back({featurize(s.actions, ds.vocab.size()), s.label});
        GbtTrainLog log;
        train_gbt(data, ds.n_classes(), cfg.gbt, &log).save(out);
        if (!log_path.empty()) {
          std::ofstream lf(log_path);
          lf << "round,logloss\n";
          for (std::size_t r = 0; r < log.logloss.size(); ++r) lf << r << ',' << log.logloss[r] << '\n';
        }
      } else if (method == "seq") {
        SeqTrainLog log;
        train_seq(seqs, ds.vocab.size(), ds.n_classes(), cfg.seq, cfg.seed, &log).save(out);
        if (!log_path.empty()) {
          std::ofstream lf(log_path);
          log.write_csv(lf);
        }
      } else {
        throw Error("train: method must be gbt or seq");
      }
    } else if (*rec) {
      Dataset ds = load_dataset(data_dir);
      auto m = make_method(method, method_config(config_path));
      // Recognize exactly one trace: make it the only heldout member.
      std::size_t index;
      std::vector<std::uint32_t> actions;
      if (trace_index) {
        index = *trace_index;
        if (index >= ds.traces.size()) throw Error("trace index out of range");
        actions = ds.traces[index].actions;
      } else {
        actions = parse_ids(observations);
        if (actions.empty()) throw Error("give --trace or --observations");
        index = ds.traces.size();
        ds.traces.push_back({actions, 0});
        if (ds.has_model()) ds.trace_problem.push_back(problem_index);
      }
      for (auto a : actions) {
        if (a >= ds.vocab.size()) throw IndexOutOfVocab("action id " + std::to_string(a) + " is out of vocabulary");
      }
      ds.split.heldout = {index};
      m->prepare(ds);
      auto prefix = truncate(actions, ratio);
      std::size_t h = m->predict(ds, index, prefix);
      std::cout << h << '\t' << ds.hypotheses[h] << '\n';
    } else if (*ev) {
      Dataset ds = load_dataset(data_dir);
      MethodConfig cfg = method_config(config_path);
      std::vector<std::unique_ptr<Method>> owned;
      std::vector<Method*> ptrs;
      for (const auto& name : methods) {
        owned.push_back(make_method(name, cfg));
        ptrs.push_back(owned.back().get());
      }
      EvalOptions opts;
      opts.ratios = ratios;
      opts.record_timing = !no_timing;
      opts.charge_setup = !predict_only;
      EvalReport report = evaluate(ptrs, ds, opts);
      if (report_path.empty()) std::cout << to_csv(report);
      else emit_report(report, ReportFormat::csv, report_path);
      if (!table_path.empty()) emit_report(report, ReportFormat::table, table_path);
    } else if (*curve) {
      Dataset ds = load_dataset(data_dir);
      EvalOptions opts;
      opts.ratios = ratios;
      opts.record_timing = false;
      auto rows = learning_curve_eval(ds, sizes, method, method_config(config_path), opts);
      std::string csv = curve_csv(rows, ratios);
      if (curve_path.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(curve_path);
        if (!out) throw IoError("cannot write " + curve_path);
        out << csv;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
