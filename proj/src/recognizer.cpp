#include "goalrec/recognizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace goalrec {

std::vector<double> goal_completion(const GroundTask& task, const std::vector<LandmarkGraph>& graphs,
                                    const State& observed) {
  if (graphs.size() != task.hypotheses().size()) {
    throw Error("landmark graphs do not cover every hypothesis");
  }
  std::vector<double> scores;
  scores.reserve(graphs.size());
  for (std::size_t h = 0; h < graphs.size(); ++h) {
    const auto& goal = task.hypothesis(h).facts;
    double sum = 0.0;
    for (FactId g : goal) {
      auto it = graphs[h].per_subgoal.find(g);
      if (it == graphs[h].per_subgoal.end() || it->second.empty()) {
        sum += observed.contains(g) ? 1.0 : 0.0;
        continue;
      }
      std::size_t hit = 0;
      for (FactId f : it->second) hit += observed.contains(f) ? 1 : 0;
      sum += static_cast<double>(hit) / static_cast<double>(it->second.size());
    }
    scores.push_back(sum / static_cast<double>(goal.size()));
  }
  return scores;
}

std::vector<double> goal_completion(const GroundTask& task, const std::vector<LandmarkGraph>& graphs,
                                    const ObservationTrace& trace) {
  return goal_completion(task, graphs, observed_facts(task, trace.actions));
}

RecognitionResult recognize(std::span<const double> scores, double theta,
                            std::optional<std::span<const double>> priors) {
  if (scores.empty()) throw EmptyScores("no hypothesis scores to decide between");
  if (!(theta >= 0.0)) throw Error("threshold must be non-negative");
  for (double s : scores) {
    if (!std::isfinite(s)) throw Error("hypothesis scores must be finite");
  }
  if (priors && priors->size() != scores.size()) {
    throw Error("prior count does not match hypothesis count");
  }

  RecognitionResult r;
  r.scores.assign(scores.begin(), scores.end());
  const double best = *std::max_element(scores.begin(), scores.end());
  for (std::size_t h = 0; h < scores.size(); ++h) {
    if (scores[h] >= best - theta) r.candidate_set.push_back(h);
  }

  if (!priors) {
    r.predicted = static_cast<std::size_t>(
        std::max_element(scores.begin(), scores.end()) - scores.begin());
    return r;
  }

  std::vector<double> post(scores.size(), 0.0);
  double total = 0.0;
  for (std::size_t h : r.candidate_set) {
    post[h] = scores[h] * (*priors)[h];
    total += post[h];
  }
  if (total <= 0.0) {
    for (std::size_t h : r.candidate_set) {
      post[h] = (*priors)[h];
      total += post[h];
    }
  }
  if (total <= 0.0) {
    for (std::size_t h : r.candidate_set) post[h] = 1.0;
    total = static_cast<double>(r.candidate_set.size());
  }
  for (double& p : post) p /= total;
  r.predicted = static_cast<std::size_t>(std::max_element(post.begin(), post.end()) - post.begin());
  r.posterior = std::move(post);
  return r;
}

std::vector<LandmarkGraph> extract_all_landmarks(const GroundTask& task) {
  std::vector<LandmarkGraph> graphs;
  graphs.reserve(task.hypotheses().size());
  for (std::size_t h = 0; h < task.hypotheses().size(); ++h) {
    graphs.push_back(extract_landmarks(task, h));
  }
  return graphs;
}

RecognitionResult recognize_trace(const GroundTask* task, const std::vector<LandmarkGraph>& graphs,
                                  const ObservationTrace& trace, double theta,
                                  std::optional<std::span<const double>> priors) {
  if (!task) {
    throw Unsupported("landmark recognition cannot handle numeric variables");
  }
  auto start = std::chrono::steady_clock::now();
  auto scores = goal_completion(*task, graphs, trace);
  auto result = recognize(scores, theta, priors);
  result.elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace goalrec
