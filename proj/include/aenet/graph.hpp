#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "aenet/tensor.hpp"

namespace aenet {

// Reverse-mode tape. Each Node pairs a value with an accumulated gradient
// of the same shape; parents plus a backprop closure form the acyclic
// computation record. Graphs are built per batch and never reused;
// parameter leaves persist across graphs and are zeroed explicitly.
// Single-threaded by contract.
struct Node {
  Tensor value;
  Tensor grad;  // zero-initialized, same shape as value
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backprop;  // accumulates into parents' grads
  const char* op = "leaf";
};

// Value-semantics handle to a graph node.
class Var {
 public:
  Var() = default;
  explicit Var(Tensor value);       // differentiable leaf
  static Var constant(Tensor value) { return Var(std::move(value)); }

  const Tensor& value() const { return node_->value; }
  Tensor& value() { return node_->value; }
  const Tensor& grad() const { return node_->grad; }
  Tensor& grad() { return node_->grad; }
  void zero_grad() { node_->grad.fill(0.0); }

  bool defined() const { return node_ != nullptr; }
  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  explicit Var(std::shared_ptr<Node> n) : node_(std::move(n)) {}
  std::shared_ptr<Node> node_;
  friend Var make_op(const char* name, Tensor value, std::vector<Var> parents,
                     std::function<void(Node&)> backprop);
};

// Generic node constructor; exposed so tests can graft custom (or
// deliberately wrong) backward rules onto the tape.
Var make_op(const char* name, Tensor value, std::vector<Var> parents,
            std::function<void(Node&)> backprop);

// Reverse topological sweep from a scalar loss; every reachable node is
// visited exactly once. Gradients accumulate with +=.
void backward(const Var& loss);

// --- arithmetic ---------------------------------------------------------
Var add(const Var& a, const Var& b);       // same shape
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);       // element-wise
Var scale(const Var& a, double c);
Var matmul(const Var& a, const Var& b);    // [m,k] x [k,n]

// --- broadcast over rows -------------------------------------------------
Var add_rowvec(const Var& x, const Var& v);  // x[m,n] + v per row, v: [n] or [1,n]
Var mul_rowvec(const Var& x, const Var& v);

// --- shape ---------------------------------------------------------------
Var transpose(const Var& a);                         // rank 2
Var concat(const Var& a, const Var& b, std::size_t axis);  // rank 2, axis 0/1
Var concat_rows(const std::vector<Var>& parts);      // n-ary axis-0 concat
Var slice_rows(const Var& a, std::size_t r0, std::size_t r1);  // rows [r0, r1)
Var reshape_row(const Var& a);                       // flatten to [1, size]

// --- reductions ----------------------------------------------------------
Var mean_axis(const Var& a, std::size_t axis);  // rank 2 -> [1,n] or [m,1]
Var mean_all(const Var& a);                     // -> scalar
Var sum_all(const Var& a);                      // -> scalar
Var l2_norm(const Var& a);                      // -> scalar, subgradient 0 at 0
Var gmp_rows(const Var& a);  // [q,r] -> [1,r] column max; ties to lowest row

// --- nonlinearities ------------------------------------------------------
Var softmax_rows(const Var& a);      // last axis, max-subtracted
Var gelu(const Var& a);              // exact erf form
Var exp_elem(const Var& a);
Var log_elem(const Var& a);          // domain error on entries <= 0
Var layernorm_rows(const Var& a);    // per-row normalize, eps 1e-5

// --- similarity / losses -------------------------------------------------
Var cosine(const Var& u, const Var& v);        // rank-1 inputs -> scalar
Var l2_normalize(const Var& a);                // a / ||a||, any shape
Var cross_entropy_row(const Var& logits, std::size_t label);  // -log softmax[label]

}  // namespace aenet
