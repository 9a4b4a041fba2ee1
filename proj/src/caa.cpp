#include "aenet/caa.hpp"

#include <cmath>

namespace aenet {

SharingToken init_sharing_token(const RunConfig& cfg, Rng& rng) {
  return {Var(Tensor::gaussian({cfg.sharing_tokens, cfg.model_width}, rng, 0.0, 0.5))};
}

CaaParams init_caa(const RunConfig& cfg, Rng& rng) {
  double ws = 1.0 / std::sqrt(static_cast<double>(cfg.model_width));
  CaaParams p;
  p.q_text = Var(Tensor::gaussian({cfg.model_width, cfg.caa_width}, rng, 0.0, ws));
  p.q_vision = Var(Tensor::gaussian({cfg.model_width, cfg.caa_width}, rng, 0.0, ws));
  p.k_share = Var(Tensor::gaussian({cfg.model_width, cfg.caa_width}, rng, 0.0, ws));
  p.v_share = Var(Tensor::gaussian({cfg.model_width, cfg.caa_width}, rng, 0.0, ws));
  p.logit_scale = cfg.caa_logit_scale;
  return p;
}

namespace {

CaaOutput caa_branch(const Var& queries, const Var& q_proj,
                     const SharingToken& sharing, const CaaParams& params) {
  Var keys = matmul(sharing.bank, params.k_share);      // N_r x d
  Var values = matmul(sharing.bank, params.v_share);    // N_r x d
  Var relevance = matmul(matmul(queries, q_proj), transpose(keys));  // N_q x N_r
  Var pooled = gmp_rows(relevance);                     // 1 x N_r
  if (params.logit_scale) {
    pooled = scale(pooled, 1.0 / std::sqrt(static_cast<double>(keys.value().cols())));
  }
  Var weights = softmax_rows(pooled);
  return {matmul(weights, values), weights};
}

}  // namespace

CaaOutput caa_text(const Var& attribute_tokens, const SharingToken& sharing,
                   const CaaParams& params) {
  return caa_branch(attribute_tokens, params.q_text, sharing, params);
}

CaaOutput caa_vision(const Var& visual_tokens, const SharingToken& sharing,
                     const CaaParams& params) {
  return caa_branch(visual_tokens, params.q_vision, sharing, params);
}

}  // namespace aenet
