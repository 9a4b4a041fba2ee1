#include "aenet/encoder.hpp"

#include <cmath>

namespace aenet {

namespace {

Tensor scaled_gaussian(std::vector<std::size_t> shape, Rng& rng, double stddev) {
  return Tensor::gaussian(std::move(shape), rng, 0.0, stddev);
}

}  // namespace

PromptParams init_prompt(const RunConfig& cfg, Rng& rng) {
  return {Var(scaled_gaussian({cfg.prompt_length, cfg.model_width}, rng, 0.5))};
}

EncoderParams init_encoder(const RunConfig& cfg, Rng& rng) {
  std::size_t D = cfg.model_width;
  std::size_t ff = 4 * D;
  EncoderParams p;
  p.w_patch = Var(scaled_gaussian({cfg.raw_patch_dim, D}, rng,
                                  1.0 / std::sqrt(static_cast<double>(cfg.raw_patch_dim))));
  p.w_attr = Var(scaled_gaussian({cfg.attribute_tokens, D}, rng, 0.5));
  double ws = 1.0 / std::sqrt(static_cast<double>(D));
  for (std::size_t l = 0; l < cfg.encoder_layers; ++l) {
    EncoderLayer layer;
    layer.w_query = Var(scaled_gaussian({D, D}, rng, ws));
    layer.w_key = Var(scaled_gaussian({D, D}, rng, ws));
    layer.w_value = Var(scaled_gaussian({D, D}, rng, ws));
    layer.w_out = Var(scaled_gaussian({D, D}, rng, ws));
    layer.ln1_gain = Var(Tensor::full({D}, 1.0));
    layer.ln1_bias = Var(Tensor::zeros({D}));
    layer.ln2_gain = Var(Tensor::full({D}, 1.0));
    layer.ln2_bias = Var(Tensor::zeros({D}));
    layer.w_ff_in = Var(scaled_gaussian({D, ff}, rng, ws));
    layer.w_ff_out = Var(scaled_gaussian({ff, D}, rng,
                                         1.0 / std::sqrt(static_cast<double>(ff))));
    p.layers.push_back(std::move(layer));
  }
  p.use_positions = cfg.learned_positions;
  if (p.use_positions) {
    p.positions = Var(scaled_gaussian(
        {cfg.prompt_length + cfg.visual_tokens, D}, rng, 0.1));
  }
  return p;
}

Var embed_attributes(const EncoderParams& params, bool frozen) {
  if (frozen) {
    return Var::constant(params.w_attr.value());
  }
  return params.w_attr;
}

namespace {

Var affine_layernorm(const Var& x, const Var& gain, const Var& bias) {
  return add_rowvec(mul_rowvec(layernorm_rows(x), gain), bias);
}

Var attention_weights(const Var& normed, const EncoderLayer& layer) {
  Var q = matmul(normed, layer.w_query);
  Var k = matmul(normed, layer.w_key);
  double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(q.value().cols()));
  return softmax_rows(scale(matmul(q, transpose(k)), inv_sqrt_d));
}

}  // namespace

Var self_attention_weights(const Var& tokens, const EncoderLayer& layer) {
  return attention_weights(
      affine_layernorm(tokens, layer.ln1_gain, layer.ln1_bias), layer);
}

Var self_attention_block(const Var& tokens, const EncoderLayer& layer) {
  Var normed = affine_layernorm(tokens, layer.ln1_gain, layer.ln1_bias);
  Var weights = attention_weights(normed, layer);
  Var attended = matmul(weights, matmul(normed, layer.w_value));
  Var x = add(tokens, matmul(attended, layer.w_out));

  Var normed2 = affine_layernorm(x, layer.ln2_gain, layer.ln2_bias);
  Var hidden = gelu(matmul(normed2, layer.w_ff_in));
  return add(x, matmul(hidden, layer.w_ff_out));
}

EncodedSample encode(const Var& raw_patches, const PromptParams& prompt,
                     const EncoderParams& params) {
  Var embedded = matmul(raw_patches, params.w_patch);
  Var tokens = concat(prompt.tokens, embedded, 0);
  if (params.use_positions) {
    tokens = add(tokens, params.positions);
  }
  for (const auto& layer : params.layers) {
    tokens = self_attention_block(tokens, layer);
  }
  std::size_t t = prompt.tokens.value().rows();
  std::size_t total = tokens.value().rows();
  return {slice_rows(tokens, t, total), slice_rows(tokens, 0, t)};
}

Var encode_without_prompt(const Var& raw_patches, const EncoderParams& params) {
  Var tokens = matmul(raw_patches, params.w_patch);
  if (params.use_positions) {
    std::size_t total = params.positions.value().rows();
    std::size_t nv = tokens.value().rows();
    tokens = add(tokens, slice_rows(params.positions, total - nv, total));
  }
  for (const auto& layer : params.layers) {
    tokens = self_attention_block(tokens, layer);
  }
  return tokens;
}

}  // namespace aenet
