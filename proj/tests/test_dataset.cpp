#include "doctest.h"

#include <filesystem>

#include "aenet/dataset.hpp"
#include "aenet/rng.hpp"

using namespace aenet;

namespace {

RunConfig small_cfg() {
  RunConfig cfg = tiny_config();
  cfg.samples_per_class = 5;
  cfg.train_per_class = 3;
  return cfg;
}

}  // namespace

TEST_CASE("same seed yields byte-identical datasets") {
  RunConfig cfg = small_cfg();
  ZslDataset a = generate_dataset(cfg, Rng(99));
  ZslDataset b = generate_dataset(cfg, Rng(99));
  REQUIRE(a.size() == b.size());
  CHECK(a.prototypes.max_abs_diff(b.prototypes) == 0.0);
  CHECK(a.generator.max_abs_diff(b.generator) == 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.sample(i).patches.max_abs_diff(b.sample(i).patches) == 0.0);
    CHECK(a.sample(i).label == b.sample(i).label);
    CHECK(a.sample(i).is_train == b.sample(i).is_train);
  }
  ZslDataset c = generate_dataset(cfg, Rng(100));
  CHECK(c.prototypes.max_abs_diff(a.prototypes) > 0.0);
}

TEST_CASE("zero noise collapses every class to one point") {
  RunConfig cfg = small_cfg();
  cfg.noise_sigma = 0.0;
  ZslDataset data = generate_dataset(cfg, Rng(4));
  for (std::size_t c = 0; c < cfg.class_count; ++c) {
    const Tensor* first = nullptr;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.sample(i).label != c) continue;
      if (!first) {
        first = &data.sample(i).patches;
      } else {
        CHECK(data.sample(i).patches.max_abs_diff(*first) == 0.0);
      }
    }
  }
}

TEST_CASE("nearest-prototype classification is perfect on noiseless data") {
  RunConfig cfg = small_cfg();
  cfg.noise_sigma = 0.0;
  ZslDataset data = generate_dataset(cfg, Rng(11));
  // independent templates: prototype row times generator, plain loops
  std::size_t C = cfg.class_count;
  std::size_t flat = cfg.visual_tokens * cfg.raw_patch_dim;
  std::vector<std::vector<double>> templates(C, std::vector<double>(flat, 0.0));
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t j = 0; j < flat; ++j) {
      for (std::size_t k = 0; k < cfg.attribute_count; ++k) {
        templates[c][j] += data.prototypes.at(c, k) * data.generator.at(k, j);
      }
    }
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Sample& s = data.sample(i);
    std::size_t best = 0;
    double best_dist = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      double dist = 0.0;
      for (std::size_t j = 0; j < flat; ++j) {
        double d = s.patches[j] - templates[c][j];
        dist += d * d;
      }
      if (c == 0 || dist < best_dist) {
        best_dist = dist;
        best = c;
      }
    }
    CHECK(best == s.label);
  }
}

TEST_CASE("split hygiene: disjoint domains, train carries only seen labels") {
  RunConfig cfg = small_cfg();
  ZslDataset data = generate_dataset(cfg, Rng(8));
  auto seen = data.seen_classes();
  auto unseen = data.unseen_classes();
  CHECK(seen.size() == cfg.seen_class_count);
  CHECK(seen.size() + unseen.size() == cfg.class_count);
  for (std::size_t c : seen) {
    for (std::size_t u : unseen) {
      CHECK(c != u);
    }
  }
  for (std::size_t idx : data.train_indices()) {
    CHECK(data.seen[data.sample(idx).label]);
    CHECK(data.sample(idx).is_train);
  }
  // every class has test samples
  std::vector<std::size_t> test_count(cfg.class_count, 0);
  for (std::size_t idx : data.test_indices()) {
    ++test_count[data.sample(idx).label];
  }
  for (std::size_t c = 0; c < cfg.class_count; ++c) {
    CHECK(test_count[c] == cfg.test_per_class());
  }
}

TEST_CASE("training guard blocks test and unseen samples") {
  RunConfig cfg = small_cfg();
  ZslDataset data = generate_dataset(cfg, Rng(13));
  std::size_t test_idx = data.test_indices().front();
  std::size_t train_idx = data.train_indices().front();

  CHECK_NOTHROW(data.sample(test_idx));
  data.arm_training_guard(true);
  CHECK_NOTHROW(data.sample(train_idx));
  CHECK_THROWS_AS(data.sample(test_idx), std::logic_error);
  data.arm_training_guard(false);
  CHECK_NOTHROW(data.sample(test_idx));
}

TEST_CASE("dataset round-trips through the on-disk layout") {
  RunConfig cfg = small_cfg();
  ZslDataset data = generate_dataset(cfg, Rng(21));
  auto dir = std::filesystem::temp_directory_path() / "aenet_dataset_test";
  write_dataset(dir, data);
  ZslDataset back = read_dataset(dir);
  REQUIRE(back.size() == data.size());
  CHECK(back.seen == data.seen);
  CHECK(back.class_names == data.class_names);
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(back.sample(i).label == data.sample(i).label);
    CHECK(back.sample(i).is_train == data.sample(i).is_train);
    // f32 storage
    CHECK(back.sample(i).patches.max_abs_diff(data.sample(i).patches) < 1e-5);
  }
  std::filesystem::remove_all(dir);
}
