#include "aenet/objective.hpp"

#include <cmath>
#include <limits>

#include "aenet/errors.hpp"

namespace aenet {

MappingParams init_mapping(const RunConfig& cfg, Rng& rng) {
  MappingParams p;
  p.w_map = Var(Tensor::gaussian(
      {cfg.model_width, cfg.attribute_count}, rng, 0.0,
      1.0 / std::sqrt(static_cast<double>(cfg.model_width))));
  p.b_map = Var(Tensor::zeros({cfg.attribute_count}));
  return p;
}

Var map_to_semantic(const Var& feature_tokens, const MappingParams& params) {
  Var pooled = mean_axis(feature_tokens, 0);  // 1 x D
  return add_rowvec(matmul(pooled, params.w_map), params.b_map);
}

SemanticBasis SemanticBasis::build(const Tensor& prototypes,
                                   const std::vector<bool>& seen) {
  require_rank(prototypes, 2, "SemanticBasis");
  std::size_t C = prototypes.rows(), K = prototypes.cols();
  if (seen.size() != C) {
    throw ShapeError("SemanticBasis: seen mask length " +
                     std::to_string(seen.size()) + " != class count " +
                     std::to_string(C));
  }
  SemanticBasis basis;
  basis.seen_index_of.assign(C, std::numeric_limits<std::size_t>::max());

  Tensor normed = prototypes;
  for (std::size_t c = 0; c < C; ++c) {
    double norm = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      norm += normed.at(c, k) * normed.at(c, k);
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
      throw DomainError("SemanticBasis: prototype " + std::to_string(c) +
                        " has zero norm");
    }
    for (std::size_t k = 0; k < K; ++k) {
      normed.at(c, k) /= norm;
    }
    if (seen[c]) {
      basis.seen_index_of[c] = basis.seen_ids.size();
      basis.seen_ids.push_back(c);
    } else {
      basis.unseen_ids.push_back(c);
    }
  }
  if (basis.seen_ids.empty() || basis.unseen_ids.empty()) {
    throw DomainError("SemanticBasis: both class sets must be nonempty");
  }

  auto transposed_block = [&](const std::vector<std::size_t>& ids) {
    Tensor t = Tensor::zeros({K, ids.size()});
    for (std::size_t j = 0; j < ids.size(); ++j) {
      for (std::size_t k = 0; k < K; ++k) {
        t.at(k, j) = normed.at(ids[j], k);
      }
    }
    return Var::constant(std::move(t));
  };
  std::vector<std::size_t> all_ids(C);
  for (std::size_t c = 0; c < C; ++c) all_ids[c] = c;
  basis.all_t = transposed_block(all_ids);
  basis.seen_t = transposed_block(basis.seen_ids);
  basis.unseen_t = transposed_block(basis.unseen_ids);
  return basis;
}

Var cosine_scores(const Var& semantic, const Var& basis_t) {
  return matmul(l2_normalize(semantic), basis_t);
}

Var classification_loss(const Var& seen_scores, std::size_t seen_column,
                        double temperature) {
  Var logits = temperature == 1.0 ? seen_scores
                                  : scale(seen_scores, 1.0 / temperature);
  return cross_entropy_row(logits, seen_column);
}

Var debias_loss(const Var& seen_scores, const Var& unseen_scores) {
  if (seen_scores.value().size() == 0 || unseen_scores.value().size() == 0) {
    throw DomainError("debias_loss: empty score multiset");
  }
  Var mean_s = mean_all(seen_scores);
  Var mean_u = mean_all(unseen_scores);
  Var var_s = sub(mean_all(mul(seen_scores, seen_scores)), mul(mean_s, mean_s));
  Var var_u = sub(mean_all(mul(unseen_scores, unseen_scores)), mul(mean_u, mean_u));
  Var dm = sub(mean_s, mean_u);
  Var dv = sub(var_s, var_u);
  return add(mul(dm, dm), mul(dv, dv));
}

Var total_loss(const Var& cls, const Var& cons, const Var& deb,
               double lambda_cons, double lambda_deb) {
  return add(cls, add(scale(cons, lambda_cons), scale(deb, lambda_deb)));
}

ScoreStats score_stats(const Tensor& scores, const std::vector<bool>& seen) {
  require_rank(scores, 2, "score_stats");
  if (seen.size() != scores.cols()) {
    throw ShapeError("score_stats: seen mask does not match score columns");
  }
  double sum_s = 0.0, sumsq_s = 0.0, sum_u = 0.0, sumsq_u = 0.0;
  std::size_t n_s = 0, n_u = 0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    for (std::size_t c = 0; c < scores.cols(); ++c) {
      double v = scores.at(i, c);
      if (seen[c]) {
        sum_s += v;
        sumsq_s += v * v;
        ++n_s;
      } else {
        sum_u += v;
        sumsq_u += v * v;
        ++n_u;
      }
    }
  }
  if (n_s == 0 || n_u == 0) {
    throw DomainError("score_stats: empty class set");
  }
  ScoreStats st;
  st.alpha_seen = sum_s / static_cast<double>(n_s);
  st.beta_seen = sumsq_s / static_cast<double>(n_s) - st.alpha_seen * st.alpha_seen;
  st.alpha_unseen = sum_u / static_cast<double>(n_u);
  st.beta_unseen =
      sumsq_u / static_cast<double>(n_u) - st.alpha_unseen * st.alpha_unseen;
  return st;
}

}  // namespace aenet
