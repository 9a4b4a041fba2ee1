#include "doctest.h"

#include <cmath>
#include <functional>

#include "aenet/gradcheck.hpp"
#include "aenet/graph.hpp"
#include "aenet/rng.hpp"

using namespace aenet;

namespace {

// Wraps an op under a fixed random linear functional so every output
// coordinate is probed, then gradchecks the leaves across seeded trials.
double max_rel_err_over_trials(
    Rng& rng, int trials, const std::vector<std::vector<std::size_t>>& shapes,
    const std::function<Var(const std::vector<Var>&)>& op, double lo = -1.0,
    double hi = 1.0) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<Var> leaves;
    std::vector<std::pair<std::string, Var>> params;
    for (std::size_t i = 0; i < shapes.size(); ++i) {
      leaves.emplace_back(Tensor::uniform(shapes[i], rng, lo, hi));
      params.emplace_back("p" + std::to_string(i), leaves.back());
    }
    Var probe = Var::constant(
        Tensor::uniform(op(leaves).value().shape(), rng, -1.0, 1.0));
    auto build = [&] { return sum_all(mul(op(leaves), probe)); };
    worst = std::max(worst, gradcheck(build, params).max_rel_err);
  }
  return worst;
}

}  // namespace

TEST_CASE("softmax forced values") {
  Var v(Tensor::row({0.0, 0.0}));
  Tensor s = softmax_rows(v).value();
  CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(0.5).epsilon(1e-12));

  Var w(Tensor::row({std::log(1.0), std::log(2.0), std::log(3.0)}));
  Tensor sw = softmax_rows(w).value();
  CHECK(sw[0] == doctest::Approx(1.0 / 6).epsilon(1e-12));
  CHECK(sw[1] == doctest::Approx(2.0 / 6).epsilon(1e-12));
  CHECK(sw[2] == doctest::Approx(3.0 / 6).epsilon(1e-12));

  Var big(Tensor::row({1000.0, 1000.0}));
  Tensor sb = softmax_rows(big).value();
  REQUIRE(sb.all_finite());
  CHECK(sb[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("softmax rows sum to one, stay nonnegative, ignore shifts") {
  Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    std::size_t m = 1 + rng.index(4), n = 1 + rng.index(6);
    Tensor x = Tensor::uniform({m, n}, rng, -5.0, 5.0);
    Tensor s = softmax_rows(Var(x)).value();
    for (std::size_t i = 0; i < m; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(s.at(i, j) >= 0.0);
        sum += s.at(i, j);
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
    double c = rng.uniform(-100.0, 100.0);
    Tensor shifted = x;
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += c;
    CHECK(softmax_rows(Var(shifted)).value().max_abs_diff(s) <= 1e-12);
  }
}

TEST_CASE("gmp_rows forced values and tie-break") {
  Var m(Tensor::matrix({{1, 5}, {3, 2}}));
  Tensor p = gmp_rows(m).value();
  CHECK(p[0] == 3.0);
  CHECK(p[1] == 5.0);

  Var single(Tensor::matrix({{4, -2, 0.5}}));
  CHECK(gmp_rows(single).value().max_abs_diff(single.value()) == 0.0);

  Var tie(Tensor::matrix({{-1, -1}, {-1, -1}}));
  Var pooled = gmp_rows(tie);
  backward(sum_all(pooled));
  CHECK(tie.grad().at(0, 0) == 1.0);
  CHECK(tie.grad().at(0, 1) == 1.0);
  CHECK(tie.grad().at(1, 0) == 0.0);
  CHECK(tie.grad().at(1, 1) == 0.0);
}

TEST_CASE("gmp_rows upper-bounds rows and ignores row order") {
  Rng rng(32);
  for (int t = 0; t < 100; ++t) {
    std::size_t q = 1 + rng.index(5), r = 1 + rng.index(5);
    Tensor x = Tensor::uniform({q, r}, rng, -3.0, 3.0);
    Tensor p = gmp_rows(Var(x)).value();
    for (std::size_t i = 0; i < q; ++i) {
      for (std::size_t j = 0; j < r; ++j) {
        CHECK(p[j] >= x.at(i, j));
      }
    }
    // reverse the rows
    Tensor rev = Tensor::zeros({q, r});
    for (std::size_t i = 0; i < q; ++i) {
      for (std::size_t j = 0; j < r; ++j) {
        rev.at(i, j) = x.at(q - 1 - i, j);
      }
    }
    CHECK(gmp_rows(Var(rev)).value().max_abs_diff(p) == 0.0);
  }
}

TEST_CASE("cosine forced values and zero-norm error") {
  Var v(Tensor::from({3}, {1.0, -2.0, 0.5}));
  CHECK(cosine(v, v).value().item() == doctest::Approx(1.0).epsilon(1e-12));

  Var e1(Tensor::from({2}, {1.0, 0.0}));
  Var e2(Tensor::from({2}, {0.0, 1.0}));
  CHECK(cosine(e1, e2).value().item() == 0.0);

  Var nv(Tensor::from({3}, {-1.0, 2.0, -0.5}));
  CHECK(cosine(v, nv).value().item() == doctest::Approx(-1.0).epsilon(1e-12));

  Var zero(Tensor::from({3}, {0.0, 0.0, 0.0}));
  CHECK_THROWS_AS(cosine(v, zero), DomainError);
}

TEST_CASE("backward on linear and quadratic losses") {
  Var w(Tensor::from({3}, {0.3, -1.2, 2.0}));
  backward(sum_all(w));
  for (std::size_t i = 0; i < 3; ++i) CHECK(w.grad()[i] == 1.0);

  w.zero_grad();
  backward(scale(sum_all(mul(w, w)), 0.5));  // 0.5 * ||w||^2
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(w.grad()[i] == doctest::Approx(w.value()[i]).epsilon(1e-15));
  }
}

TEST_CASE("backward rejects non-scalar losses") {
  Var w(Tensor::from({3}, {1.0, 2.0, 3.0}));
  CHECK_THROWS_AS(backward(w), ShapeError);
}

TEST_CASE("a node feeding two consumers accumulates both contributions") {
  Rng rng(33);
  Var x(Tensor::uniform({2, 3}, rng, -1.0, 1.0));
  auto build = [&] {
    Var shared = gelu(x);
    Var path1 = sum_all(mul(shared, shared));
    Var path2 = mean_all(shared);
    return add(path1, path2);
  };
  auto rep = gradcheck(build, {{"x", x}});
  CHECK(rep.max_rel_err < 1e-4);
}

TEST_CASE("every op passes central-difference gradcheck on seeded inputs") {
  Rng rng(2025);
  auto check = [&](const char* name, int trials,
                   std::vector<std::vector<std::size_t>> shapes,
                   std::function<Var(const std::vector<Var>&)> op,
                   double lo = -1.0, double hi = 1.0) {
    CAPTURE(name);
    CHECK(max_rel_err_over_trials(rng, trials, shapes, op, lo, hi) < 1e-4);
  };

  check("add", 20, {{2, 3}, {2, 3}},
        [](const std::vector<Var>& v) { return add(v[0], v[1]); });
  check("sub", 20, {{2, 3}, {2, 3}},
        [](const std::vector<Var>& v) { return sub(v[0], v[1]); });
  check("mul", 20, {{2, 3}, {2, 3}},
        [](const std::vector<Var>& v) { return mul(v[0], v[1]); });
  check("scale", 20, {{2, 3}},
        [](const std::vector<Var>& v) { return scale(v[0], -1.7); });
  check("matmul", 100, {{3, 4}, {4, 2}},
        [](const std::vector<Var>& v) { return matmul(v[0], v[1]); });
  check("add_rowvec", 20, {{3, 4}, {4}},
        [](const std::vector<Var>& v) { return add_rowvec(v[0], v[1]); });
  check("mul_rowvec", 20, {{3, 4}, {4}},
        [](const std::vector<Var>& v) { return mul_rowvec(v[0], v[1]); });
  check("transpose", 20, {{3, 4}},
        [](const std::vector<Var>& v) { return transpose(v[0]); });
  check("concat_axis0", 20, {{2, 3}, {4, 3}},
        [](const std::vector<Var>& v) { return concat(v[0], v[1], 0); });
  check("concat_axis1", 20, {{2, 3}, {2, 5}},
        [](const std::vector<Var>& v) { return concat(v[0], v[1], 1); });
  check("slice_rows", 20, {{5, 3}},
        [](const std::vector<Var>& v) { return slice_rows(v[0], 1, 4); });
  check("reshape_row", 20, {{3, 4}},
        [](const std::vector<Var>& v) { return reshape_row(v[0]); });
  check("mean_axis0", 20, {{4, 3}},
        [](const std::vector<Var>& v) { return mean_axis(v[0], 0); });
  check("mean_axis1", 20, {{4, 3}},
        [](const std::vector<Var>& v) { return mean_axis(v[0], 1); });
  check("mean_all", 20, {{4, 3}},
        [](const std::vector<Var>& v) { return mean_all(v[0]); });
  check("sum_all", 20, {{4, 3}},
        [](const std::vector<Var>& v) { return sum_all(v[0]); });
  check("l2_norm", 100, {{5}},
        [](const std::vector<Var>& v) { return l2_norm(v[0]); });
  check("gmp_rows", 100, {{4, 3}},
        [](const std::vector<Var>& v) { return gmp_rows(v[0]); });
  check("softmax_rows", 100, {{3, 5}},
        [](const std::vector<Var>& v) { return softmax_rows(v[0]); });
  check("gelu", 50, {{3, 4}},
        [](const std::vector<Var>& v) { return gelu(v[0]); }, -3.0, 3.0);
  check("exp", 20, {{2, 4}},
        [](const std::vector<Var>& v) { return exp_elem(v[0]); });
  check("log", 20, {{2, 4}},
        [](const std::vector<Var>& v) { return log_elem(v[0]); }, 0.1, 2.0);
  check("layernorm_rows", 100, {{3, 6}},
        [](const std::vector<Var>& v) { return layernorm_rows(v[0]); }, -2.0,
        2.0);
  check("cosine", 100, {{4}, {4}},
        [](const std::vector<Var>& v) { return cosine(v[0], v[1]); }, 0.2, 1.5);
  check("l2_normalize", 100, {{1, 5}},
        [](const std::vector<Var>& v) { return l2_normalize(v[0]); }, 0.2, 1.5);
  check("cross_entropy_row", 100, {{1, 6}},
        [](const std::vector<Var>& v) { return cross_entropy_row(v[0], 2); },
        -2.0, 2.0);
}

TEST_CASE("log rejects non-positive entries") {
  CHECK_THROWS_AS(log_elem(Var(Tensor::row({1.0, 0.0}))), DomainError);
  CHECK_THROWS_AS(log_elem(Var(Tensor::row({-0.5}))), DomainError);
}

TEST_CASE("cross_entropy_row rejects labels outside the scored classes") {
  Var logits(Tensor::row({0.1, 0.2, 0.3}));
  CHECK_THROWS_AS(cross_entropy_row(logits, 3), DomainError);
}

TEST_CASE("ops leave finite values on finite input") {
  Rng rng(71);
  for (int t = 0; t < 20; ++t) {
    Var x(Tensor::uniform({3, 4}, rng, -50.0, 50.0));
    CHECK(softmax_rows(x).value().all_finite());
    CHECK(gelu(x).value().all_finite());
    CHECK(layernorm_rows(x).value().all_finite());
    CHECK(gmp_rows(x).value().all_finite());
  }
}
