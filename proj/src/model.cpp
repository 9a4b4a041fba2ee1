#include "aenet/model.hpp"

#include <limits>

#include "aenet/aent_io.hpp"
#include "aenet/errors.hpp"

namespace aenet {

Model::Model(RunConfig cfg, Rng init_stream) : cfg_(std::move(cfg)) {
  cfg_.validate();
  // one fixed draw order so every ablation variant shares identical values
  params_.prompt = init_prompt(cfg_, init_stream);
  params_.encoder = init_encoder(cfg_, init_stream);
  params_.sharing = init_sharing_token(cfg_, init_stream);
  params_.caa = init_caa(cfg_, init_stream);
  params_.vrru = init_vrru(cfg_, init_stream);
  params_.mapping = init_mapping(cfg_, init_stream);
}

std::vector<std::pair<std::string, Var>> Model::trainable() const {
  std::vector<std::pair<std::string, Var>> out;
  out.emplace_back("prompt", params_.prompt.tokens);
  out.emplace_back("encoder.w_patch", params_.encoder.w_patch);
  if (!cfg_.frozen_attributes) {
    out.emplace_back("encoder.w_attr", params_.encoder.w_attr);
  }
  for (std::size_t l = 0; l < params_.encoder.layers.size(); ++l) {
    const auto& layer = params_.encoder.layers[l];
    std::string prefix = "encoder.layer" + std::to_string(l) + ".";
    out.emplace_back(prefix + "w_query", layer.w_query);
    out.emplace_back(prefix + "w_key", layer.w_key);
    out.emplace_back(prefix + "w_value", layer.w_value);
    out.emplace_back(prefix + "w_out", layer.w_out);
    out.emplace_back(prefix + "ln1_gain", layer.ln1_gain);
    out.emplace_back(prefix + "ln1_bias", layer.ln1_bias);
    out.emplace_back(prefix + "ln2_gain", layer.ln2_gain);
    out.emplace_back(prefix + "ln2_bias", layer.ln2_bias);
    out.emplace_back(prefix + "w_ff_in", layer.w_ff_in);
    out.emplace_back(prefix + "w_ff_out", layer.w_ff_out);
  }
  if (params_.encoder.use_positions) {
    out.emplace_back("encoder.positions", params_.encoder.positions);
  }
  out.emplace_back("sharing.bank", params_.sharing.bank);
  out.emplace_back("caa.q_text", params_.caa.q_text);
  out.emplace_back("caa.q_vision", params_.caa.q_vision);
  out.emplace_back("caa.k_share", params_.caa.k_share);
  out.emplace_back("caa.v_share", params_.caa.v_share);
  out.emplace_back("vrru.w_residual", params_.vrru.w_residual);
  out.emplace_back("vrru.b_residual", params_.vrru.b_residual);
  out.emplace_back("vrru.mlp_w1", params_.vrru.mlp_w1);
  out.emplace_back("vrru.mlp_b1", params_.vrru.mlp_b1);
  out.emplace_back("vrru.mlp_w2", params_.vrru.mlp_w2);
  out.emplace_back("vrru.mlp_b2", params_.vrru.mlp_b2);
  out.emplace_back("mapping.w_map", params_.mapping.w_map);
  out.emplace_back("mapping.b_map", params_.mapping.b_map);
  return out;
}

void Model::zero_grad() const {
  for (auto& [name, var] : trainable()) {
    (void)name;
    var.node()->grad.fill(0.0);
  }
}

Var Model::text_token(const Ablation& abl) const {
  Var attr = embed_attributes(params_.encoder, cfg_.frozen_attributes);
  if (abl.no_caa) {
    return matmul(mean_axis(attr, 0), params_.caa.q_text);
  }
  return caa_text(attr, params_.sharing, params_.caa).token;
}

SampleScores Model::score_sample(const Tensor& patches,
                                 const SemanticBasis& basis,
                                 const Var& text_token,
                                 const Ablation& abl) const {
  Var patch_const = Var::constant(patches);
  Var feature;
  Var residual;
  if (abl.no_prompt) {
    // vanilla-features baseline: visual tokens straight into the mapping
    feature = encode_without_prompt(patch_const, params_.encoder);
  } else {
    EncodedSample enc = encode(patch_const, params_.prompt, params_.encoder);
    if (abl.no_residual) {
      feature = assemble_feature(enc.prompt_embedding, enc.visual_tokens);
    } else {
      Var e_tilde =
          abl.no_caa
              ? matmul(mean_axis(enc.visual_tokens, 0), params_.caa.q_vision)
              : caa_vision(enc.visual_tokens, params_.sharing, params_.caa).token;
      residual = predict_residual(text_token, e_tilde, params_.vrru);
      Var enhanced = enhance_prompt(enc.prompt_embedding, residual);
      feature = assemble_feature(enhanced, enc.visual_tokens);
    }
  }
  Var semantic = map_to_semantic(feature, params_.mapping);
  Var unit = l2_normalize(semantic);
  SampleScores out;
  out.seen = matmul(unit, basis.seen_t);
  out.unseen = matmul(unit, basis.unseen_t);
  out.residual = residual;
  return out;
}

Tensor Model::score_matrix(const ZslDataset& data,
                           const std::vector<std::size_t>& indices,
                           const SemanticBasis& basis, const Ablation& abl) const {
  std::size_t C = data.class_count();
  Tensor out = Tensor::zeros({indices.size(), C});
  Var text = text_token(abl);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    SampleScores s = score_sample(data.sample(indices[i]).patches, basis, text, abl);
    for (std::size_t j = 0; j < basis.seen_ids.size(); ++j) {
      out.at(i, basis.seen_ids[j]) = s.seen.value()[j];
    }
    for (std::size_t j = 0; j < basis.unseen_ids.size(); ++j) {
      out.at(i, basis.unseen_ids[j]) = s.unseen.value()[j];
    }
  }
  return out;
}

void Model::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::vector<ManifestEntry> entries;
  for (const auto& [name, var] : trainable()) {
    std::string file = name;
    for (auto& ch : file) {
      if (ch == '.') ch = '_';
    }
    file += ".aent";
    write_aent(dir / file, var.value());
    entries.push_back({name, file, var.value().shape(), "parameter"});
  }
  write_manifest(dir, entries);
}

void Model::load(const std::filesystem::path& dir) {
  auto entries = read_manifest(dir);
  auto named = trainable();
  for (auto& [name, var] : named) {
    const ManifestEntry* found = nullptr;
    for (const auto& e : entries) {
      if (e.name == name) {
        found = &e;
        break;
      }
    }
    if (!found) {
      throw std::runtime_error("model load: missing parameter " + name);
    }
    Tensor t = read_aent(dir / found->file);
    if (t.shape() != var.value().shape()) {
      throw ShapeError("model load: " + name + " has shape " + t.shape_str() +
                       ", expected " + var.value().shape_str());
    }
    var.node()->value = std::move(t);
  }
}

}  // namespace aenet
