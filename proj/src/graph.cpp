#include "aenet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

namespace aenet {

namespace {

constexpr double kLayerNormEps = 1e-5;
constexpr double kNormFloor = 1e-12;
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Row count / width for tensors treated as a stack of rows: rank 1 is a
// single row, rank 2 is rows x cols.
std::pair<std::size_t, std::size_t> row_view(const Tensor& t, const char* op) {
  if (t.rank() == 1) {
    return {1, t.shape()[0]};
  }
  if (t.rank() == 2) {
    return {t.rows(), t.cols()};
  }
  throw ShapeError(std::string(op) + ": expected rank 1 or 2, got " + t.shape_str());
}

}  // namespace

Var::Var(Tensor value) {
  node_ = std::make_shared<Node>();
  node_->grad = Tensor::zeros(value.shape());
  node_->value = std::move(value);
}

Var make_op(const char* name, Tensor value, std::vector<Var> parents,
            std::function<void(Node&)> backprop) {
  auto n = std::make_shared<Node>();
  n->grad = Tensor::zeros(value.shape());
  n->value = std::move(value);
  n->parents.reserve(parents.size());
  for (auto& p : parents) {
    n->parents.push_back(p.node());
  }
  n->backprop = std::move(backprop);
  n->op = name;
  Var v;
  v = Var(std::move(n));
  return v;
}

void backward(const Var& loss) {
  if (loss.value().size() != 1) {
    throw ShapeError("backward: loss must be scalar, got " +
                     loss.value().shape_str());
  }
  // Iterative post-order DFS; each node enters the order exactly once.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  seen.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->parents.size()) {
      Node* p = n->parents[next++].get();
      if (seen.insert(p).second) {
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }
  loss.node()->grad.fill(1.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backprop) {
      (*it)->backprop(**it);
    }
  }
}

Var add(const Var& a, const Var& b) {
  require_same_shape(a.value(), b.value(), "add");
  Tensor out = a.value();
  out.add_in_place(b.value());
  return make_op("add", std::move(out), {a, b}, [](Node& n) {
    n.parents[0]->grad.add_in_place(n.grad);
    n.parents[1]->grad.add_in_place(n.grad);
  });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a.value(), b.value(), "sub");
  Tensor out = a.value();
  out.axpy(-1.0, b.value());
  return make_op("sub", std::move(out), {a, b}, [](Node& n) {
    n.parents[0]->grad.add_in_place(n.grad);
    n.parents[1]->grad.axpy(-1.0, n.grad);
  });
}

Var mul(const Var& a, const Var& b) {
  require_same_shape(a.value(), b.value(), "mul");
  Tensor out = Tensor::zeros(a.value().shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a.value()[i] * b.value()[i];
  }
  return make_op("mul", std::move(out), {a, b}, [](Node& n) {
    Node& a = *n.parents[0];
    Node& b = *n.parents[1];
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      a.grad[i] += n.grad[i] * b.value[i];
      b.grad[i] += n.grad[i] * a.value[i];
    }
  });
}

Var scale(const Var& a, double c) {
  Tensor out = Tensor::zeros(a.value().shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = c * a.value()[i];
  }
  return make_op("scale", std::move(out), {a}, [c](Node& n) {
    n.parents[0]->grad.axpy(c, n.grad);
  });
}

Var matmul(const Var& a, const Var& b) {
  Tensor out = matmul_nn(a.value(), b.value());
  return make_op("matmul", std::move(out), {a, b}, [](Node& n) {
    // dA += g * B^T, dB += A^T * g
    n.parents[0]->grad.add_in_place(matmul_nt(n.grad, n.parents[1]->value));
    n.parents[1]->grad.add_in_place(matmul_tn(n.parents[0]->value, n.grad));
  });
}

namespace {

std::size_t check_rowvec(const Tensor& x, const Tensor& v, const char* op) {
  require_rank(x, 2, op);
  std::size_t w = v.rank() == 1 ? v.shape()[0]
                : v.rank() == 2 && v.rows() == 1 ? v.cols()
                                                 : 0;
  if (w == 0 || w != x.cols()) {
    throw ShapeError(std::string(op) + ": row vector " + v.shape_str() +
                     " does not match " + x.shape_str());
  }
  return w;
}

}  // namespace

Var add_rowvec(const Var& x, const Var& v) {
  std::size_t w = check_rowvec(x.value(), v.value(), "add_rowvec");
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      out.at(i, j) += v.value()[j];
    }
  }
  return make_op("add_rowvec", std::move(out), {x, v}, [w](Node& n) {
    Node& x = *n.parents[0];
    Node& v = *n.parents[1];
    x.grad.add_in_place(n.grad);
    for (std::size_t i = 0; i < n.grad.rows(); ++i) {
      for (std::size_t j = 0; j < w; ++j) {
        v.grad[j] += n.grad.at(i, j);
      }
    }
  });
}

Var mul_rowvec(const Var& x, const Var& v) {
  std::size_t w = check_rowvec(x.value(), v.value(), "mul_rowvec");
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      out.at(i, j) *= v.value()[j];
    }
  }
  return make_op("mul_rowvec", std::move(out), {x, v}, [w](Node& n) {
    Node& x = *n.parents[0];
    Node& v = *n.parents[1];
    for (std::size_t i = 0; i < n.grad.rows(); ++i) {
      for (std::size_t j = 0; j < w; ++j) {
        x.grad.at(i, j) += n.grad.at(i, j) * v.value[j];
        v.grad[j] += n.grad.at(i, j) * x.value.at(i, j);
      }
    }
  });
}

Var transpose(const Var& a) {
  require_rank(a.value(), 2, "transpose");
  std::size_t m = a.value().rows(), n = a.value().cols();
  Tensor out = Tensor::zeros({n, m});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.at(j, i) = a.value().at(i, j);
    }
  }
  return make_op("transpose", std::move(out), {a}, [](Node& nd) {
    Tensor& g = nd.grad;
    Tensor& pg = nd.parents[0]->grad;
    for (std::size_t i = 0; i < g.rows(); ++i) {
      for (std::size_t j = 0; j < g.cols(); ++j) {
        pg.at(j, i) += g.at(i, j);
      }
    }
  });
}

Var concat(const Var& a, const Var& b, std::size_t axis) {
  require_rank(a.value(), 2, "concat");
  require_rank(b.value(), 2, "concat");
  if (axis == 0) {
    return concat_rows({a, b});
  }
  if (axis != 1) {
    throw ShapeError("concat: axis must be 0 or 1");
  }
  if (a.value().rows() != b.value().rows()) {
    throw ShapeError("concat axis 1: row counts disagree, " +
                     a.value().shape_str() + " vs " + b.value().shape_str());
  }
  std::size_t m = a.value().rows(), p = a.value().cols(), q = b.value().cols();
  Tensor out = Tensor::zeros({m, p + q});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < p; ++j) out.at(i, j) = a.value().at(i, j);
    for (std::size_t j = 0; j < q; ++j) out.at(i, p + j) = b.value().at(i, j);
  }
  return make_op("concat1", std::move(out), {a, b}, [p, q](Node& n) {
    Node& a = *n.parents[0];
    Node& b = *n.parents[1];
    for (std::size_t i = 0; i < n.grad.rows(); ++i) {
      for (std::size_t j = 0; j < p; ++j) a.grad.at(i, j) += n.grad.at(i, j);
      for (std::size_t j = 0; j < q; ++j) b.grad.at(i, j) += n.grad.at(i, p + j);
    }
  });
}

Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) {
    throw ShapeError("concat_rows: no inputs");
  }
  std::size_t cols = parts[0].value().cols();
  std::size_t rows = 0;
  for (const auto& p : parts) {
    require_rank(p.value(), 2, "concat_rows");
    if (p.value().cols() != cols) {
      throw ShapeError("concat_rows: column counts disagree, " +
                       parts[0].value().shape_str() + " vs " +
                       p.value().shape_str());
    }
    rows += p.value().rows();
  }
  Tensor out = Tensor::zeros({rows, cols});
  std::size_t r = 0;
  for (const auto& p : parts) {
    std::copy(p.value().data(), p.value().data() + p.value().size(),
              out.data() + r * cols);
    r += p.value().rows();
  }
  return make_op("concat_rows", std::move(out), parts, [cols](Node& n) {
    std::size_t r = 0;
    for (auto& p : n.parents) {
      for (std::size_t i = 0; i < p->grad.size(); ++i) {
        p->grad[i] += n.grad[r * cols + i];
      }
      r += p->grad.rows();
    }
  });
}

Var slice_rows(const Var& a, std::size_t r0, std::size_t r1) {
  require_rank(a.value(), 2, "slice_rows");
  if (r0 >= r1 || r1 > a.value().rows()) {
    throw ShapeError("slice_rows: range [" + std::to_string(r0) + ", " +
                     std::to_string(r1) + ") out of bounds for " +
                     a.value().shape_str());
  }
  std::size_t cols = a.value().cols();
  Tensor out = Tensor::zeros({r1 - r0, cols});
  std::copy(a.value().data() + r0 * cols, a.value().data() + r1 * cols, out.data());
  return make_op("slice_rows", std::move(out), {a}, [r0, cols](Node& n) {
    Tensor& pg = n.parents[0]->grad;
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      pg[r0 * cols + i] += n.grad[i];
    }
  });
}

Var reshape_row(const Var& a) {
  Tensor out = Tensor::from({1, a.value().size()},
                            std::vector<double>(a.value().data(),
                                                a.value().data() + a.value().size()));
  return make_op("reshape_row", std::move(out), {a}, [](Node& n) {
    Tensor& pg = n.parents[0]->grad;
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      pg[i] += n.grad[i];
    }
  });
}

Var mean_axis(const Var& a, std::size_t axis) {
  require_rank(a.value(), 2, "mean_axis");
  std::size_t m = a.value().rows(), n = a.value().cols();
  if (axis == 0) {
    Tensor out = Tensor::zeros({1, n});
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        out[j] += a.value().at(i, j);
      }
    }
    for (std::size_t j = 0; j < n; ++j) out[j] /= static_cast<double>(m);
    return make_op("mean_axis0", std::move(out), {a}, [m, n](Node& nd) {
      double inv = 1.0 / static_cast<double>(m);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          nd.parents[0]->grad.at(i, j) += nd.grad[j] * inv;
        }
      }
    });
  }
  if (axis != 1) {
    throw ShapeError("mean_axis: axis must be 0 or 1");
  }
  Tensor out = Tensor::zeros({m, 1});
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += a.value().at(i, j);
    out[i] = s / static_cast<double>(n);
  }
  return make_op("mean_axis1", std::move(out), {a}, [m, n](Node& nd) {
    double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        nd.parents[0]->grad.at(i, j) += nd.grad[i] * inv;
      }
    }
  });
}

Var mean_all(const Var& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.value().size(); ++i) s += a.value()[i];
  double inv = 1.0 / static_cast<double>(a.value().size());
  return make_op("mean_all", Tensor::scalar(s * inv), {a}, [inv](Node& n) {
    double g = n.grad[0] * inv;
    Tensor& pg = n.parents[0]->grad;
    for (std::size_t i = 0; i < pg.size(); ++i) pg[i] += g;
  });
}

Var sum_all(const Var& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.value().size(); ++i) s += a.value()[i];
  return make_op("sum_all", Tensor::scalar(s), {a}, [](Node& n) {
    double g = n.grad[0];
    Tensor& pg = n.parents[0]->grad;
    for (std::size_t i = 0; i < pg.size(); ++i) pg[i] += g;
  });
}

Var l2_norm(const Var& a) {
  double norm = a.value().l2_norm();
  return make_op("l2_norm", Tensor::scalar(norm), {a}, [norm](Node& n) {
    if (norm <= 0.0) {
      return;  // subgradient 0 at the origin
    }
    double g = n.grad[0] / norm;
    Node& p = *n.parents[0];
    for (std::size_t i = 0; i < p.grad.size(); ++i) {
      p.grad[i] += g * p.value[i];
    }
  });
}

Var gmp_rows(const Var& a) {
  require_rank(a.value(), 2, "gmp_rows");
  std::size_t q = a.value().rows(), r = a.value().cols();
  Tensor out = Tensor::zeros({1, r});
  std::vector<std::size_t> argmax(r, 0);
  for (std::size_t j = 0; j < r; ++j) {
    double best = a.value().at(0, j);
    for (std::size_t i = 1; i < q; ++i) {
      // strict > keeps ties at the lowest row index
      if (a.value().at(i, j) > best) {
        best = a.value().at(i, j);
        argmax[j] = i;
      }
    }
    out[j] = best;
  }
  return make_op("gmp_rows", std::move(out), {a},
                 [argmax = std::move(argmax)](Node& n) {
                   Tensor& pg = n.parents[0]->grad;
                   for (std::size_t j = 0; j < n.grad.size(); ++j) {
                     pg.at(argmax[j], j) += n.grad[j];
                   }
                 });
}

Var softmax_rows(const Var& a) {
  auto [m, n] = row_view(a.value(), "softmax_rows");
  Tensor out = Tensor::zeros(a.value().shape());
  for (std::size_t i = 0; i < m; ++i) {
    const double* x = a.value().data() + i * n;
    double* y = out.data() + i * n;
    double mx = x[0];
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, x[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      y[j] = std::exp(x[j] - mx);
      sum += y[j];
    }
    for (std::size_t j = 0; j < n; ++j) y[j] /= sum;
  }
  return make_op("softmax_rows", std::move(out), {a}, [m, n](Node& nd) {
    for (std::size_t i = 0; i < m; ++i) {
      const double* y = nd.value.data() + i * n;
      const double* g = nd.grad.data() + i * n;
      double* px = nd.parents[0]->grad.data() + i * n;
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += g[j] * y[j];
      for (std::size_t j = 0; j < n; ++j) px[j] += y[j] * (g[j] - dot);
    }
  });
}

Var gelu(const Var& a) {
  Tensor out = Tensor::zeros(a.value().shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double x = a.value()[i];
    out[i] = 0.5 * x * (1.0 + std::erf(x * kInvSqrt2));
  }
  return make_op("gelu", std::move(out), {a}, [](Node& n) {
    Node& p = *n.parents[0];
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      double x = p.value[i];
      double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
      double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
      p.grad[i] += n.grad[i] * (cdf + x * pdf);
    }
  });
}

Var exp_elem(const Var& a) {
  Tensor out = Tensor::zeros(a.value().shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(a.value()[i]);
  }
  return make_op("exp", std::move(out), {a}, [](Node& n) {
    Node& p = *n.parents[0];
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      p.grad[i] += n.grad[i] * n.value[i];
    }
  });
}

Var log_elem(const Var& a) {
  Tensor out = Tensor::zeros(a.value().shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double x = a.value()[i];
    if (x <= 0.0) {
      throw DomainError("log: non-positive entry " + std::to_string(x));
    }
    out[i] = std::log(x);
  }
  return make_op("log", std::move(out), {a}, [](Node& n) {
    Node& p = *n.parents[0];
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      p.grad[i] += n.grad[i] / p.value[i];
    }
  });
}

Var layernorm_rows(const Var& a) {
  auto [m, n] = row_view(a.value(), "layernorm_rows");
  Tensor out = Tensor::zeros(a.value().shape());
  std::vector<double> rstds(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double* x = a.value().data() + i * n;
    double* y = out.data() + i * n;
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) mean += x[j];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double d = x[j] - mean;
      var += d * d;
    }
    var /= static_cast<double>(n);
    double rstd = 1.0 / std::sqrt(var + kLayerNormEps);
    rstds[i] = rstd;
    for (std::size_t j = 0; j < n; ++j) y[j] = (x[j] - mean) * rstd;
  }
  return make_op("layernorm_rows", std::move(out), {a},
                 [m, n, rstds = std::move(rstds)](Node& nd) {
                   for (std::size_t i = 0; i < m; ++i) {
                     const double* y = nd.value.data() + i * n;
                     const double* g = nd.grad.data() + i * n;
                     double* px = nd.parents[0]->grad.data() + i * n;
                     double gmean = 0.0, gymean = 0.0;
                     for (std::size_t j = 0; j < n; ++j) {
                       gmean += g[j];
                       gymean += g[j] * y[j];
                     }
                     gmean /= static_cast<double>(n);
                     gymean /= static_cast<double>(n);
                     for (std::size_t j = 0; j < n; ++j) {
                       px[j] += (g[j] - gmean - y[j] * gymean) * rstds[i];
                     }
                   }
                 });
}

Var cosine(const Var& u, const Var& v) {
  require_same_shape(u.value(), v.value(), "cosine");
  double nu = u.value().l2_norm();
  double nv = v.value().l2_norm();
  if (nu < kNormFloor || nv < kNormFloor) {
    throw DomainError("cosine: zero-norm input (|u|=" + std::to_string(nu) +
                      ", |v|=" + std::to_string(nv) + ")");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < u.value().size(); ++i) {
    dot += u.value()[i] * v.value()[i];
  }
  double c = dot / (nu * nv);
  return make_op("cosine", Tensor::scalar(c), {u, v}, [nu, nv, c](Node& n) {
    double g = n.grad[0];
    Node& u = *n.parents[0];
    Node& v = *n.parents[1];
    for (std::size_t i = 0; i < u.grad.size(); ++i) {
      u.grad[i] += g * (v.value[i] / (nu * nv) - c * u.value[i] / (nu * nu));
      v.grad[i] += g * (u.value[i] / (nu * nv) - c * v.value[i] / (nv * nv));
    }
  });
}

Var l2_normalize(const Var& a) {
  double norm = a.value().l2_norm();
  if (norm < kNormFloor) {
    throw DomainError("l2_normalize: zero-norm input");
  }
  Tensor out = Tensor::zeros(a.value().shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a.value()[i] / norm;
  }
  return make_op("l2_normalize", std::move(out), {a}, [norm](Node& n) {
    double dot = 0.0;
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      dot += n.grad[i] * n.value[i];
    }
    Tensor& pg = n.parents[0]->grad;
    for (std::size_t i = 0; i < pg.size(); ++i) {
      pg[i] += (n.grad[i] - n.value[i] * dot) / norm;
    }
  });
}

Var cross_entropy_row(const Var& logits, std::size_t label) {
  auto [m, n] = row_view(logits.value(), "cross_entropy_row");
  if (m != 1) {
    throw ShapeError("cross_entropy_row: expected a single row, got " +
                     logits.value().shape_str());
  }
  if (label >= n) {
    throw DomainError("cross_entropy_row: class " + std::to_string(label) +
                      " not among the " + std::to_string(n) + " scored classes");
  }
  const double* x = logits.value().data();
  double mx = x[0];
  for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, x[j]);
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) sum += std::exp(x[j] - mx);
  double loss = mx + std::log(sum) - x[label];
  return make_op("cross_entropy_row", Tensor::scalar(loss), {logits},
                 [label, mx, sum, n](Node& nd) {
                   double g = nd.grad[0];
                   Node& p = *nd.parents[0];
                   for (std::size_t j = 0; j < n; ++j) {
                     double prob = std::exp(p.value[j] - mx) / sum;
                     p.grad[j] += g * (prob - (j == label ? 1.0 : 0.0));
                   }
                 });
}

}  // namespace aenet
