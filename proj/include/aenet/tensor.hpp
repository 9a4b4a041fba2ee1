#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "aenet/errors.hpp"
#include "aenet/rng.hpp"

namespace aenet {

// Dense row-major tensor of doubles. The universal value carrier: rank 1
// for vectors/scalars (scalars are shape {1}), rank 2 for matrices, rank 3
// only for stacked sample patches.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor full(std::vector<std::size_t> shape, double v);
  static Tensor from(std::vector<std::size_t> shape, std::vector<double> data);
  static Tensor scalar(double v) { return from({1}, {v}); }
  static Tensor row(std::vector<double> v);  // 1 x n
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor uniform(std::vector<std::size_t> shape, Rng& rng, double lo = 0.0,
                        double hi = 1.0);
  static Tensor gaussian(std::vector<std::size_t> shape, Rng& rng, double mean = 0.0,
                         double stddev = 1.0);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t rows() const { return shape_.at(0); }
  std::size_t cols() const { return shape_.at(1); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool all_finite() const;
  double item() const;  // requires size() == 1

  void fill(double v);
  void add_in_place(const Tensor& other);   // += , same shape
  void axpy(double a, const Tensor& x);     // this += a * x, same shape

  double l2_norm() const;
  double max_abs_diff(const Tensor& other) const;

  std::string shape_str() const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

// Raw rank-2 kernels shared by forward passes, backward rules and tests.
Tensor matmul_nn(const Tensor& a, const Tensor& b);  // a[m,k] * b[k,n]
Tensor matmul_nt(const Tensor& a, const Tensor& b);  // a[m,k] * b[n,k]^T
Tensor matmul_tn(const Tensor& a, const Tensor& b);  // a[k,m]^T * b[k,n]

void require_same_shape(const Tensor& a, const Tensor& b, const char* op);
void require_rank(const Tensor& t, std::size_t rank, const char* op);

}  // namespace aenet
