#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "aenet/config.hpp"
#include "aenet/rng.hpp"
#include "aenet/tensor.hpp"

namespace aenet {

struct Sample {
  Tensor patches;  // N_v x d_raw
  std::size_t label = 0;
  bool is_train = false;
};

// Synthetic attribute benchmark. Class prototypes are uniform in [0,1]^K;
// raw patches are a fixed linear image of the prototype plus Gaussian
// noise, so attribute-grounded transfer to unseen classes is achievable by
// construction. Seen and unseen label sets are disjoint and training
// samples carry only seen labels.
class ZslDataset {
 public:
  Tensor prototypes;             // C x K, entries in [0, 1]
  Tensor generator;              // K x (N_v * d_raw), fixed Gaussian map
  std::vector<bool> seen;        // per class
  std::vector<std::string> class_names;

  std::size_t class_count() const { return seen.size(); }
  std::size_t size() const { return samples_.size(); }

  // Guarded access: while the training guard is armed, touching any sample
  // that is not a training sample throws. Training code arms the guard so
  // unseen-class images can never leak into a gradient step.
  const Sample& sample(std::size_t i) const;
  void arm_training_guard(bool on) const { guard_armed_ = on; }

  const std::vector<std::size_t>& train_indices() const { return train_idx_; }
  const std::vector<std::size_t>& test_indices() const { return test_idx_; }

  std::vector<std::size_t> seen_classes() const;
  std::vector<std::size_t> unseen_classes() const;

  void push_sample(Sample s);

 private:
  std::vector<Sample> samples_;
  std::vector<std::size_t> train_idx_;
  std::vector<std::size_t> test_idx_;
  mutable bool guard_armed_ = false;
};

// Deterministic generation from the given stream: prototypes first, then
// the generator matrix, then per-class sample noise in class order.
ZslDataset generate_dataset(const RunConfig& cfg, Rng rng);

void write_dataset(const std::filesystem::path& dir, const ZslDataset& data);
ZslDataset read_dataset(const std::filesystem::path& dir);

}  // namespace aenet
