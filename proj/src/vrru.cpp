#include "aenet/vrru.hpp"

#include <cmath>

namespace aenet {

VrruParams init_vrru(const RunConfig& cfg, Rng& rng) {
  std::size_t D = cfg.model_width;
  std::size_t d2 = 2 * cfg.caa_width;
  std::size_t K = cfg.attribute_count;
  std::size_t H = cfg.mlp_hidden;
  VrruParams p;
  p.w_residual = Var(Tensor::zeros({d2, D}));
  p.b_residual = Var(Tensor::zeros({D}));
  p.mlp_w1 = Var(Tensor::gaussian({K, H}, rng, 0.0,
                                  1.0 / std::sqrt(static_cast<double>(K))));
  p.mlp_b1 = Var(Tensor::zeros({H}));
  p.mlp_w2 = Var(Tensor::gaussian({H, D}, rng, 0.0,
                                  1.0 / std::sqrt(static_cast<double>(H))));
  p.mlp_b2 = Var(Tensor::zeros({D}));
  p.squared_norm = cfg.squared_consistency;
  return p;
}

Var predict_residual(const Var& s_tilde, const Var& e_tilde,
                     const VrruParams& params) {
  Var fused = concat(s_tilde, e_tilde, 1);  // 1 x 2d
  return add_rowvec(matmul(fused, params.w_residual), params.b_residual);
}

Var prototype_mlp(const Var& prototype, const VrruParams& params) {
  Var hidden = gelu(add_rowvec(matmul(prototype, params.mlp_w1), params.mlp_b1));
  return add_rowvec(matmul(hidden, params.mlp_w2), params.mlp_b2);
}

Var consistency_loss(const Var& residual, const Var& prototype,
                     const VrruParams& params) {
  Var diff = sub(residual, prototype_mlp(prototype, params));
  if (params.squared_norm) {
    return sum_all(mul(diff, diff));
  }
  return l2_norm(diff);
}

Var enhance_prompt(const Var& prompt_embedding, const Var& residual) {
  return add_rowvec(prompt_embedding, residual);
}

Var assemble_feature(const Var& enhanced_prompt, const Var& visual_tokens) {
  return concat(enhanced_prompt, visual_tokens, 0);
}

}  // namespace aenet
