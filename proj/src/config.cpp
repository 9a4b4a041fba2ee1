#include "aenet/config.hpp"

#include <fstream>
#include <set>

#include "json.hpp"

#include "aenet/errors.hpp"

namespace aenet {

void RunConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) {
      throw ConfigError(std::string(name) + " must be >= 1");
    }
  };
  positive(model_width, "model_width");
  positive(caa_width, "caa_width");
  positive(prompt_length, "prompt_length");
  positive(visual_tokens, "visual_tokens");
  positive(attribute_tokens, "attribute_tokens");
  positive(sharing_tokens, "sharing_tokens");
  positive(attribute_count, "attribute_count");
  positive(raw_patch_dim, "raw_patch_dim");
  positive(mlp_hidden, "mlp_hidden");
  positive(encoder_layers, "encoder_layers");
  positive(class_count, "class_count");
  positive(samples_per_class, "samples_per_class");
  positive(batch_size, "batch_size");
  if (seen_class_count == 0 || seen_class_count >= class_count) {
    throw ConfigError("seen_class_count must be in [1, class_count)");
  }
  if (train_per_class >= samples_per_class) {
    throw ConfigError("train_per_class must leave at least one test sample");
  }
  if (train_per_class == 0) {
    throw ConfigError("train_per_class must be >= 1");
  }
  if (noise_sigma < 0.0) {
    throw ConfigError("noise_sigma must be >= 0");
  }
  if (lambda_cons < 0.0 || lambda_deb < 0.0) {
    throw ConfigError("loss weights must be >= 0");
  }
  if (softmax_temperature <= 0.0) {
    throw ConfigError("softmax_temperature must be > 0");
  }
  if (optimizer != "adam" && optimizer != "sgd") {
    throw ConfigError("optimizer must be \"adam\" or \"sgd\"");
  }
  if (learning_rate < 0.0) {
    throw ConfigError("learning_rate must be >= 0");
  }
  if (adam_beta1 < 0.0 || adam_beta1 >= 1.0 || adam_beta2 < 0.0 || adam_beta2 >= 1.0) {
    throw ConfigError("adam moment coefficients must lie in [0, 1)");
  }
  if (adam_epsilon <= 0.0) {
    throw ConfigError("adam_epsilon must be > 0");
  }
  if (prompt_grid.empty() || lambda_grid.empty()) {
    throw ConfigError("sweep grids must be nonempty");
  }
  for (double l : lambda_grid) {
    if (l < 0.0) {
      throw ConfigError("lambda_grid entries must be >= 0");
    }
  }
}

RunConfig parse_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }

  RunConfig cfg;
  std::set<std::string> known;
  auto u64 = [&](const char* key, std::size_t& out) {
    known.insert(key);
    if (j.contains(key)) {
      if (!j[key].is_number_unsigned() && !j[key].is_number_integer()) {
        throw ConfigError(std::string(key) + " must be an integer");
      }
      auto v = j[key].get<long long>();
      if (v < 0) {
        throw ConfigError(std::string(key) + " must be >= 0");
      }
      out = static_cast<std::size_t>(v);
    }
  };
  auto num = [&](const char* key, double& out) {
    known.insert(key);
    if (j.contains(key)) {
      if (!j[key].is_number()) {
        throw ConfigError(std::string(key) + " must be a number");
      }
      out = j[key].get<double>();
    }
  };
  auto flag = [&](const char* key, bool& out) {
    known.insert(key);
    if (j.contains(key)) {
      if (!j[key].is_boolean()) {
        throw ConfigError(std::string(key) + " must be a boolean");
      }
      out = j[key].get<bool>();
    }
  };
  auto str = [&](const char* key, std::string& out) {
    known.insert(key);
    if (j.contains(key)) {
      if (!j[key].is_string()) {
        throw ConfigError(std::string(key) + " must be a string");
      }
      out = j[key].get<std::string>();
    }
  };
  auto num_list = [&](const char* key, std::vector<double>& out) {
    known.insert(key);
    if (j.contains(key)) {
      if (!j[key].is_array()) {
        throw ConfigError(std::string(key) + " must be an array of numbers");
      }
      out = j[key].get<std::vector<double>>();
    }
  };
  auto u64_list = [&](const char* key, std::vector<std::size_t>& out) {
    known.insert(key);
    if (j.contains(key)) {
      if (!j[key].is_array()) {
        throw ConfigError(std::string(key) + " must be an array of integers");
      }
      out = j[key].get<std::vector<std::size_t>>();
    }
  };

  u64("model_width", cfg.model_width);
  u64("caa_width", cfg.caa_width);
  u64("prompt_length", cfg.prompt_length);
  u64("visual_tokens", cfg.visual_tokens);
  u64("attribute_tokens", cfg.attribute_tokens);
  u64("sharing_tokens", cfg.sharing_tokens);
  u64("attribute_count", cfg.attribute_count);
  u64("raw_patch_dim", cfg.raw_patch_dim);
  u64("mlp_hidden", cfg.mlp_hidden);
  u64("encoder_layers", cfg.encoder_layers);
  u64("class_count", cfg.class_count);
  u64("seen_class_count", cfg.seen_class_count);
  u64("samples_per_class", cfg.samples_per_class);
  u64("train_per_class", cfg.train_per_class);
  num("noise_sigma", cfg.noise_sigma);
  num("lambda_cons", cfg.lambda_cons);
  num("lambda_deb", cfg.lambda_deb);
  num("softmax_temperature", cfg.softmax_temperature);
  flag("squared_consistency", cfg.squared_consistency);
  str("optimizer", cfg.optimizer);
  num("learning_rate", cfg.learning_rate);
  num("adam_beta1", cfg.adam_beta1);
  num("adam_beta2", cfg.adam_beta2);
  num("adam_epsilon", cfg.adam_epsilon);
  u64("steps", cfg.steps);
  u64("batch_size", cfg.batch_size);
  u64("eval_every", cfg.eval_every);
  num_list("gamma_grid", cfg.gamma_grid);
  u64_list("prompt_grid", cfg.prompt_grid);
  num_list("lambda_grid", cfg.lambda_grid);
  flag("caa_logit_scale", cfg.caa_logit_scale);
  flag("frozen_attributes", cfg.frozen_attributes);
  flag("learned_positions", cfg.learned_positions);
  flag("no_prompt", cfg.no_prompt);
  flag("no_residual", cfg.no_residual);
  flag("no_caa", cfg.no_caa);
  known.insert("seed");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
      throw ConfigError("seed must be an integer");
    }
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  str("output_dir", cfg.output_dir);

  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.count(key)) {
      throw ConfigError("unknown config key \"" + key + "\"");
    }
  }

  if (cfg.gamma_grid.empty()) {
    throw ConfigError("gamma_grid must be nonempty");
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) {
    throw ConfigError("cannot open config file " + path.string());
  }
  std::string text((std::istreambuf_iterator<char>(is)),
                   std::istreambuf_iterator<char>());
  return parse_config(text);
}

RunConfig tiny_config() {
  RunConfig cfg;
  cfg.model_width = 8;
  cfg.caa_width = 8;
  cfg.prompt_length = 2;
  cfg.visual_tokens = 4;
  cfg.attribute_tokens = 6;
  cfg.sharing_tokens = 3;
  cfg.attribute_count = 6;
  cfg.raw_patch_dim = 4;
  cfg.mlp_hidden = 16;
  cfg.class_count = 8;
  cfg.seen_class_count = 6;
  cfg.samples_per_class = 6;
  cfg.train_per_class = 4;
  cfg.steps = 50;
  cfg.batch_size = 4;
  cfg.eval_every = 0;
  cfg.gamma_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  return cfg;
}

}  // namespace aenet
