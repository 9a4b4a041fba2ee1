#include "aenet/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "aenet/aent_io.hpp"
#include "aenet/errors.hpp"

namespace aenet {

const Sample& ZslDataset::sample(std::size_t i) const {
  const Sample& s = samples_.at(i);
  if (guard_armed_ && !s.is_train) {
    throw std::logic_error("dataset guard: test/unseen sample " +
                           std::to_string(i) + " touched during training");
  }
  return s;
}

void ZslDataset::push_sample(Sample s) {
  std::size_t idx = samples_.size();
  if (s.is_train) {
    train_idx_.push_back(idx);
  } else {
    test_idx_.push_back(idx);
  }
  samples_.push_back(std::move(s));
}

std::vector<std::size_t> ZslDataset::seen_classes() const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < seen.size(); ++c) {
    if (seen[c]) out.push_back(c);
  }
  return out;
}

std::vector<std::size_t> ZslDataset::unseen_classes() const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < seen.size(); ++c) {
    if (!seen[c]) out.push_back(c);
  }
  return out;
}

ZslDataset generate_dataset(const RunConfig& cfg, Rng rng) {
  cfg.validate();
  std::size_t C = cfg.class_count;
  std::size_t K = cfg.attribute_count;
  std::size_t flat = cfg.visual_tokens * cfg.raw_patch_dim;

  ZslDataset data;
  data.prototypes = Tensor::uniform({C, K}, rng, 0.0, 1.0);
  data.generator = Tensor::gaussian({K, flat}, rng);
  data.seen.assign(C, false);
  for (std::size_t c = 0; c < cfg.seen_class_count; ++c) {
    data.seen[c] = true;
  }
  for (std::size_t c = 0; c < C; ++c) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "class_%02zu", c);
    data.class_names.emplace_back(buf);
  }

  for (std::size_t c = 0; c < C; ++c) {
    Tensor proto = Tensor::from({1, K}, std::vector<double>(
        data.prototypes.data() + c * K, data.prototypes.data() + (c + 1) * K));
    Tensor base = matmul_nn(proto, data.generator);  // 1 x flat
    std::size_t n_train = data.seen[c] ? cfg.train_per_class : 0;
    std::size_t n_total = data.seen[c] ? cfg.samples_per_class : cfg.test_per_class();
    for (std::size_t s = 0; s < n_total; ++s) {
      Tensor patches = Tensor::zeros({cfg.visual_tokens, cfg.raw_patch_dim});
      for (std::size_t i = 0; i < flat; ++i) {
        patches[i] = base[i] + cfg.noise_sigma * rng.gaussian();
      }
      data.push_sample({std::move(patches), c, s < n_train});
    }
  }
  return data;
}

void write_dataset(const std::filesystem::path& dir, const ZslDataset& data) {
  std::filesystem::create_directories(dir);
  write_aent(dir / "prototypes.aent", data.prototypes);
  write_aent(dir / "generator.aent", data.generator);

  std::size_t n = data.size();
  const Tensor& first = data.sample(0).patches;
  Tensor stacked = Tensor::zeros({n, first.rows(), first.cols()});
  nlohmann::ordered_json meta;
  meta["labels"] = nlohmann::json::array();
  meta["is_train"] = nlohmann::json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& s = data.sample(i);
    std::copy(s.patches.data(), s.patches.data() + s.patches.size(),
              stacked.data() + i * first.size());
    meta["labels"].push_back(s.label);
    meta["is_train"].push_back(s.is_train);
  }
  write_aent(dir / "samples.aent", stacked);

  meta["seen"] = data.seen;
  meta["class_names"] = data.class_names;
  std::ofstream os(dir / "dataset.json");
  if (!os) {
    throw std::runtime_error("dataset: cannot write " + (dir / "dataset.json").string());
  }
  os << meta.dump(2) << "\n";
}

ZslDataset read_dataset(const std::filesystem::path& dir) {
  ZslDataset data;
  data.prototypes = read_aent(dir / "prototypes.aent");
  data.generator = read_aent(dir / "generator.aent");

  std::ifstream is(dir / "dataset.json");
  if (!is) {
    throw std::runtime_error("dataset: cannot open " + (dir / "dataset.json").string());
  }
  nlohmann::json meta = nlohmann::json::parse(is);
  data.seen = meta.at("seen").get<std::vector<bool>>();
  data.class_names = meta.at("class_names").get<std::vector<std::string>>();

  Tensor stacked = read_aent(dir / "samples.aent");
  if (stacked.rank() != 3) {
    throw std::runtime_error("dataset: samples.aent must be rank 3");
  }
  auto labels = meta.at("labels").get<std::vector<std::size_t>>();
  auto is_train = meta.at("is_train").get<std::vector<bool>>();
  std::size_t n = stacked.shape()[0];
  if (labels.size() != n || is_train.size() != n) {
    throw std::runtime_error("dataset: metadata length mismatch");
  }
  std::size_t rows = stacked.shape()[1], cols = stacked.shape()[2];
  for (std::size_t i = 0; i < n; ++i) {
    Tensor patches = Tensor::from(
        {rows, cols}, std::vector<double>(stacked.data() + i * rows * cols,
                                          stacked.data() + (i + 1) * rows * cols));
    data.push_sample({std::move(patches), labels[i], static_cast<bool>(is_train[i])});
  }
  return data;
}

}  // namespace aenet
