#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace aenet {

inline std::vector<double> default_gamma_grid() {
  std::vector<double> g(21);
  for (int i = 0; i <= 20; ++i) {
    g[i] = static_cast<double>(i) / 20.0;
  }
  return g;
}

// Full run configuration. Defaults are the desk-scale benchmark; every key
// can be overridden from JSON with the same fully-spelled name. Unknown
// keys are a hard error.
struct RunConfig {
  // dimensions
  std::size_t model_width = 16;      // D, token width
  std::size_t caa_width = 16;        // d, concept-attention width
  std::size_t prompt_length = 5;     // T
  std::size_t visual_tokens = 8;     // N_v
  std::size_t attribute_tokens = 12; // N_s
  std::size_t sharing_tokens = 4;    // N_r
  std::size_t attribute_count = 12;  // K
  std::size_t raw_patch_dim = 8;     // d_raw
  std::size_t mlp_hidden = 32;       // hidden width of the prototype MLP
  std::size_t encoder_layers = 2;

  // dataset
  std::size_t class_count = 20;
  std::size_t seen_class_count = 15;
  std::size_t samples_per_class = 50;
  std::size_t train_per_class = 40;
  double noise_sigma = 0.1;

  // losses
  double lambda_cons = 1.0;
  double lambda_deb = 1.0;
  double softmax_temperature = 1.0;
  bool squared_consistency = false;

  // optimizer
  std::string optimizer = "adam";
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t steps = 2000;
  std::size_t batch_size = 32;
  std::size_t eval_every = 500;  // 0 disables periodic evaluation

  // evaluation / sweeps
  std::vector<double> gamma_grid = default_gamma_grid();  // 21 points over [0, 1]
  std::vector<std::size_t> prompt_grid = {1, 3, 5, 7, 9};
  std::vector<double> lambda_grid = {0.0, 0.5, 1.0, 1.5, 2.0};

  // structure flags
  bool caa_logit_scale = false;    // 1/sqrt(d) on CAA logits, off by default
  bool frozen_attributes = false;  // freeze the attribute embedding table
  bool learned_positions = false;  // learned position embeddings in encoder

  // ablations
  bool no_prompt = false;
  bool no_residual = false;
  bool no_caa = false;

  std::uint64_t seed = 42;
  std::string output_dir = "out";

  std::size_t unseen_class_count() const { return class_count - seen_class_count; }
  std::size_t test_per_class() const { return samples_per_class - train_per_class; }

  // Throws ConfigError when any bound is violated.
  void validate() const;
};

// Parse a config file / JSON text over the defaults. Unknown keys throw.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& json_text);

// Tiny configuration used by the gradient suite.
RunConfig tiny_config();

}  // namespace aenet
