#pragma once

#include "aenet/config.hpp"
#include "aenet/graph.hpp"
#include "aenet/rng.hpp"

namespace aenet {

// Learnable modal-sharing token bank R. Text and vision queries both
// attend onto it, so their harmonized outputs become mixtures of one
// common basis.
struct SharingToken {
  Var bank;  // N_r x D
};

// Query projections are branch-specific; key/value projections on R are
// shared between the branches.
struct CaaParams {
  Var q_text;   // D x d
  Var q_vision; // D x d
  Var k_share;  // D x d
  Var v_share;  // D x d
  bool logit_scale = false;  // optional 1/sqrt(d) on relevance logits
};

struct CaaOutput {
  Var token;    // 1 x d, convex combination of the rows of R * v_share
  Var weights;  // 1 x N_r, post-softmax mixing weights
};

SharingToken init_sharing_token(const RunConfig& cfg, Rng& rng);
CaaParams init_caa(const RunConfig& cfg, Rng& rng);

// Relevance (X*Q)(R*K)^T is max-pooled over the query-token axis, softmaxed
// over the bank, then mixed into the value rows.
CaaOutput caa_text(const Var& attribute_tokens, const SharingToken& sharing,
                   const CaaParams& params);
CaaOutput caa_vision(const Var& visual_tokens, const SharingToken& sharing,
                     const CaaParams& params);

}  // namespace aenet
