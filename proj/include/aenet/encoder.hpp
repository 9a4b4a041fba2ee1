#pragma once

#include <vector>

#include "aenet/config.hpp"
#include "aenet/graph.hpp"
#include "aenet/rng.hpp"

namespace aenet {

// Learnable visual prompt tokens prepended to the patch sequence.
struct PromptParams {
  Var tokens;  // T x D
};

// Stand-in for the pre-trained encoders: a learned attribute-token table
// (replacing word vectors) and a small pre-norm transformer over the
// prompt+patch sequence (replacing the pre-trained ViT). Single head, no
// positional encodings unless configured, prompt inserted at the input
// layer only.
struct EncoderLayer {
  Var w_query, w_key, w_value, w_out;  // D x D
  Var ln1_gain, ln1_bias;              // D
  Var ln2_gain, ln2_bias;              // D
  Var w_ff_in, w_ff_out;               // D x 4D, 4D x D
};

struct EncoderParams {
  Var w_patch;  // d_raw x D patch embedding
  Var w_attr;   // N_s x D attribute descriptor table
  std::vector<EncoderLayer> layers;
  Var positions;  // (T + N_v) x D, only when learned positions are enabled
  bool use_positions = false;
};

struct EncodedSample {
  Var visual_tokens;     // N_v x D
  Var prompt_embedding;  // T x D
};

EncoderParams init_encoder(const RunConfig& cfg, Rng& rng);
PromptParams init_prompt(const RunConfig& cfg, Rng& rng);

// The sharing attribute token S. With frozen_attributes the table is
// detached from the graph (a constant copy).
Var embed_attributes(const EncoderParams& params, bool frozen = false);

// Pre-norm single-head block: x + W_o(attn(LN(x))), then FFN residual.
Var self_attention_block(const Var& tokens, const EncoderLayer& layer);

// Attention weights of a block for the given input (row-stochastic n x n).
Var self_attention_weights(const Var& tokens, const EncoderLayer& layer);

// Embed patches, prepend the prompt, run the transformer, split back into
// prompt embedding (first T rows) and visual tokens.
EncodedSample encode(const Var& raw_patches, const PromptParams& prompt,
                     const EncoderParams& params);

// Variant without any prompt rows (the vanilla-features baseline).
Var encode_without_prompt(const Var& raw_patches, const EncoderParams& params);

}  // namespace aenet
