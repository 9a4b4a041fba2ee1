#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "aenet/caa.hpp"
#include "aenet/config.hpp"
#include "aenet/dataset.hpp"
#include "aenet/encoder.hpp"
#include "aenet/objective.hpp"
#include "aenet/vrru.hpp"

namespace aenet {

// Which pipeline pieces are wired into the forward pass. Parameters are
// always constructed in full so every variant shares one init stream; only
// the wiring changes.
struct Ablation {
  bool no_prompt = false;
  bool no_residual = false;
  bool no_caa = false;

  static Ablation from_config(const RunConfig& cfg) {
    return {cfg.no_prompt, cfg.no_residual, cfg.no_caa};
  }
};

struct ModelParams {
  PromptParams prompt;
  EncoderParams encoder;
  SharingToken sharing;
  CaaParams caa;
  VrruParams vrru;
  MappingParams mapping;
};

// Per-sample forward result. `residual` is defined only when the VRRU
// branch is live for the chosen ablation.
struct SampleScores {
  Var seen;    // 1 x C_s cosine scores
  Var unseen;  // 1 x C_u
  Var residual;
};

class Model {
 public:
  Model(RunConfig cfg, Rng init_stream);

  const RunConfig& config() const { return cfg_; }
  ModelParams& params() { return params_; }
  const ModelParams& params() const { return params_; }

  // Fixed-order trainable parameter list (skips the attribute table when
  // it is frozen); the same order drives the optimizer and serialization.
  std::vector<std::pair<std::string, Var>> trainable() const;
  void zero_grad() const;

  // Shared attribute-branch subgraph; build once per batch graph and pass
  // to every score_sample call in it.
  Var text_token(const Ablation& abl) const;

  SampleScores score_sample(const Tensor& patches, const SemanticBasis& basis,
                            const Var& text_token, const Ablation& abl) const;

  // Plain score matrix (rows follow `indices`, columns are global class
  // ids) for evaluation; forward only.
  Tensor score_matrix(const ZslDataset& data,
                      const std::vector<std::size_t>& indices,
                      const SemanticBasis& basis, const Ablation& abl) const;

  void save(const std::filesystem::path& dir) const;
  void load(const std::filesystem::path& dir);

 private:
  RunConfig cfg_;
  ModelParams params_;
};

}  // namespace aenet
