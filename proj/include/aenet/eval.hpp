#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "aenet/objective.hpp"
#include "aenet/tensor.hpp"

namespace aenet {

// Cosine scores of test samples against every class prototype, plus the
// class metadata needed to evaluate them.
struct PredictionScores {
  Tensor scores;                    // samples x classes
  std::vector<bool> seen;           // per class
  std::vector<std::size_t> labels;  // per sample ground truth
  std::vector<std::string> class_names;

  std::size_t sample_count() const { return scores.rows(); }
  std::size_t class_count() const { return scores.cols(); }
  void validate() const;
};

struct GzslPoint {
  double gamma = 0.0;
  double seen_acc = 0.0;
  double unseen_acc = 0.0;
  double harmonic = 0.0;
};

struct EvalReport {
  double acc_zsl = 0.0;
  double seen_acc = 0.0;    // S at the reported gamma
  double unseen_acc = 0.0;  // U
  double harmonic = 0.0;    // H
  double gamma = 0.0;       // calibration picked from the grid (best H)
  double sample_acc = 0.0;  // sample-averaged GZSL accuracy, diagnostic only
  std::vector<double> per_class_accuracy;  // per class at the reported gamma
  ScoreStats stats;
  std::vector<GzslPoint> sweep;
};

// Argmax restricted to unseen classes; ties break to the lowest class id.
std::vector<std::size_t> infer_zsl(const PredictionScores& p);

// Calibrated stacking: argmax over all classes of score - gamma per seen
// class.
std::vector<std::size_t> infer_gzsl(const PredictionScores& p, double gamma);

// Fraction of each listed class's samples predicted correctly. Every class
// in `classes` must have at least one sample.
std::vector<double> per_class_accuracy(const std::vector<std::size_t>& pred,
                                       const std::vector<std::size_t>& truth,
                                       const std::vector<std::size_t>& classes);

// 2SU/(S+U), zero when both vanish.
double harmonic_mean(double seen_acc, double unseen_acc);

std::vector<GzslPoint> sweep_gamma(const PredictionScores& p,
                                   const std::vector<double>& grid);

// Full protocol: ZSL accuracy, gamma sweep, best-H calibration, score
// statistics.
EvalReport evaluate(const PredictionScores& p, const std::vector<double>& grid);

// scores as .aent plus JSON sidecar (same stem, .json extension)
void write_scores(const std::filesystem::path& aent_path, const PredictionScores& p);
PredictionScores read_scores(const std::filesystem::path& aent_path);

void write_report_json(const std::filesystem::path& path, const EvalReport& r);
void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<GzslPoint>& sweep);

}  // namespace aenet
