#pragma once

#include "aenet/config.hpp"
#include "aenet/graph.hpp"
#include "aenet/rng.hpp"

namespace aenet {

// Visual residual refinement unit. The residual predictor is a linear map
// whose weight and bias start at exactly zero, so the branch is silent at
// initialization; the prototype MLP supervises the residual toward the
// class attribute embedding.
struct VrruParams {
  Var w_residual;  // 2d x D, zero at construction
  Var b_residual;  // D, zero at construction
  Var mlp_w1;      // K x D_h
  Var mlp_b1;      // D_h
  Var mlp_w2;      // D_h x D
  Var mlp_b2;      // D
  bool squared_norm = false;  // squared-L2 consistency variant
};

VrruParams init_vrru(const RunConfig& cfg, Rng& rng);

// Z = [s_tilde, e_tilde] * W + b
Var predict_residual(const Var& s_tilde, const Var& e_tilde,
                     const VrruParams& params);

// Two-layer GELU perceptron mapping an attribute prototype (1 x K) into
// residual space (1 x D). Not detached: the projection co-adapts with Z.
Var prototype_mlp(const Var& prototype, const VrruParams& params);

// || Z - MLP(a_y) ||, unsquared L2 by default.
Var consistency_loss(const Var& residual, const Var& prototype,
                     const VrruParams& params);

// P_tilde: Z added to every prompt row via the skip connection.
Var enhance_prompt(const Var& prompt_embedding, const Var& residual);

// f(x) = [P_tilde ; E_bar], prompt rows first.
Var assemble_feature(const Var& enhanced_prompt, const Var& visual_tokens);

}  // namespace aenet
