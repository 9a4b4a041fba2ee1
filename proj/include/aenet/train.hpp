#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "aenet/dataset.hpp"
#include "aenet/eval.hpp"
#include "aenet/model.hpp"

namespace aenet {

// Adam with bias-corrected moments (or plain SGD when configured).
class Optimizer {
 public:
  Optimizer(std::vector<std::pair<std::string, Var>> params,
            const RunConfig& cfg);

  void step();  // applies current gradients, then advances t

  std::size_t t() const { return t_; }

 private:
  std::vector<std::pair<std::string, Var>> params_;
  std::vector<Tensor> m_, v_;
  bool adam_ = true;
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
};

struct StepRecord {
  std::size_t step = 0;
  double total = 0.0;
  double cls = 0.0;
  double cons = 0.0;
  double deb = 0.0;
  double grad_norm = 0.0;
};

struct EvalRecord {
  std::size_t step = 0;
  EvalReport report;
};

struct TrainLog {
  std::vector<StepRecord> steps;
  std::vector<EvalRecord> evals;
};

void write_trainlog_json(const std::filesystem::path& path, const TrainLog& log);

// One scored pass over the test split.
PredictionScores test_scores(const Model& model, const ZslDataset& data,
                             const SemanticBasis& basis, const Ablation& abl);

struct BatchLoss {
  Var total;
  Var cls;
  Var cons;
  Var deb;
};

// The full training objective over one batch of sample indices: mean
// classification loss, mean consistency loss when the residual branch is
// live, and the per-batch debias term.
BatchLoss batch_loss(const Model& model, const ZslDataset& data,
                     const SemanticBasis& basis, const Ablation& abl,
                     const std::vector<std::size_t>& batch);

// Mini-batch training on the seen train split. Only seen-class samples are
// touched (enforced by the dataset guard); unseen prototypes enter the
// graph solely through the debias term. Throws DivergenceError when the
// loss leaves the finite range.
TrainLog train(Model& model, const ZslDataset& data, const SemanticBasis& basis,
               const Ablation& abl);

struct AblationRow {
  std::string name;
  EvalReport report;
};

// Trains full / no-prompt / no-residual / no-CAA variants from identical
// parameter draws on the same dataset.
std::vector<AblationRow> run_ablation(const RunConfig& cfg);

struct SweepRow {
  double value = 0.0;
  EvalReport report;
};

std::vector<SweepRow> sweep_prompt_length(const RunConfig& cfg);
std::vector<SweepRow> sweep_lambda_cons(const RunConfig& cfg);

void write_sweep_rows_csv(const std::filesystem::path& path,
                          const std::string& value_column,
                          const std::vector<SweepRow>& rows);
void write_ablation_csv(const std::filesystem::path& path,
                        const std::vector<AblationRow>& rows);

// Convenience wiring used by the CLI and tests: derives the named
// substreams from the config seed.
struct RunArtifacts {
  ZslDataset data;
  SemanticBasis basis;
};

RunArtifacts make_run_data(const RunConfig& cfg);
Model make_model(const RunConfig& cfg);

}  // namespace aenet
