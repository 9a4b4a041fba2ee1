#pragma once

#include <vector>

#include "aenet/config.hpp"
#include "aenet/graph.hpp"
#include "aenet/rng.hpp"
#include "aenet/tensor.hpp"

namespace aenet {

// GAP + linear projection into attribute space.
struct MappingParams {
  Var w_map;  // D x K
  Var b_map;  // K
};

MappingParams init_mapping(const RunConfig& cfg, Rng& rng);

// Mean over the token axis, then the linear map; output 1 x K.
Var map_to_semantic(const Var& feature_tokens, const MappingParams& params);

// Unit-normalized class prototypes, kept as constants transposed for fast
// score products. Column order is ascending class index within each set.
struct SemanticBasis {
  Var all_t;     // K x C
  Var seen_t;    // K x C_s
  Var unseen_t;  // K x C_u
  std::vector<std::size_t> seen_ids;    // column -> class
  std::vector<std::size_t> unseen_ids;  // column -> class
  std::vector<std::size_t> seen_index_of;  // class -> column in seen_t (or npos)

  static SemanticBasis build(const Tensor& prototypes,
                             const std::vector<bool>& seen);
};

// Cosine scores of a pooled semantic vector against a prototype block:
// l2-normalized mapping output times unit prototype columns.
Var cosine_scores(const Var& semantic, const Var& basis_t);

// Cross-entropy of the softmax over seen-class cosine scores.
Var classification_loss(const Var& seen_scores, std::size_t seen_column,
                        double temperature = 1.0);

// (mean_s - mean_u)^2 + (var_s - var_u)^2 over the two score multisets;
// population variance.
Var debias_loss(const Var& seen_scores, const Var& unseen_scores);

Var total_loss(const Var& cls, const Var& cons, const Var& deb,
               double lambda_cons, double lambda_deb);

// Mean and population variance of seen- and unseen-prototype scores for a
// plain score matrix (samples x classes, all classes).
struct ScoreStats {
  double alpha_seen = 0.0;
  double beta_seen = 0.0;
  double alpha_unseen = 0.0;
  double beta_unseen = 0.0;
};

ScoreStats score_stats(const Tensor& scores, const std::vector<bool>& seen);

}  // namespace aenet
