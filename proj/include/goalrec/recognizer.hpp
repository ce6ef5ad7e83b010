#pragma once

#include <optional>
#include <span>
#include <vector>

#include "goalrec/landmarks.hpp"
#include "goalrec/strips.hpp"

namespace goalrec {

inline constexpr double kDefaultThreshold = 0.1;

class Unsupported : public Error {
 public:
  using Error::Error;
};

class EmptyScores : public Error {
 public:
  using Error::Error;
};

struct RecognitionResult {
  std::vector<double> scores;
  std::optional<std::vector<double>> posterior;
  std::size_t predicted = 0;
  std::vector<std::size_t> candidate_set;
  double elapsed = 0.0;  // seconds
};

/// Landmark-completion score per hypothesis: mean over goal facts of the
/// fraction of that subgoal's non-trivial landmarks seen in the replay.
std::vector<double> goal_completion(const GroundTask& task, const std::vector<LandmarkGraph>& graphs,
                                    const ObservationTrace& trace);
std::vector<double> goal_completion(const GroundTask& task, const std::vector<LandmarkGraph>& graphs,
                                    const State& observed);

/// Threshold decision. Candidates are hypotheses within `theta` of the best
/// score. With priors, the posterior over candidates is proportional to
/// score * prior (to the prior alone when every candidate scores 0).
/// Ties resolve to the lowest index.
RecognitionResult recognize(std::span<const double> scores, double theta = kDefaultThreshold,
                            std::optional<std::span<const double>> priors = std::nullopt);

std::vector<LandmarkGraph> extract_all_landmarks(const GroundTask& task);

/// Scores and decides one observation prefix. `task` is null for domains
/// without a propositional model, which this recognizer cannot handle.
/// `elapsed` covers scoring and decision only.
RecognitionResult recognize_trace(const GroundTask* task, const std::vector<LandmarkGraph>& graphs,
                                  const ObservationTrace& trace, double theta = kDefaultThreshold,
                                  std::optional<std::span<const double>> priors = std::nullopt);

}  // namespace goalrec
