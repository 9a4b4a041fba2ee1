#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "aenet/aent_io.hpp"
#include "aenet/rng.hpp"
#include "aenet/tensor.hpp"

using namespace aenet;

namespace {

// Independent dot-product oracle for the matrix product.
Tensor matmul_oracle(const Tensor& a, const Tensor& b) {
  Tensor out = Tensor::zeros({a.rows(), b.cols()});
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) {
        s += a.at(i, k) * b.at(k, j);
      }
      out.at(i, j) = s;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("shape and data length stay consistent") {
  Tensor t = Tensor::zeros({3, 4});
  CHECK(t.size() == 12);
  CHECK(t.rank() == 2);
  CHECK_THROWS_AS(Tensor::from({2, 2}, {1.0, 2.0, 3.0}), ShapeError);
  CHECK_THROWS_AS(Tensor::zeros({0, 3}), ShapeError);
  CHECK_THROWS_AS(Tensor::zeros({}), ShapeError);
}

TEST_CASE("matmul identity and selector cases") {
  Tensor eye = Tensor::matrix({{1, 0}, {0, 1}});
  Tensor b = Tensor::matrix({{3, 4}, {5, 6}});
  CHECK(matmul_nn(eye, b).max_abs_diff(b) == 0.0);

  Tensor sel = Tensor::matrix({{1, 0}});
  Tensor col = Tensor::matrix({{0}, {7}});
  Tensor out = matmul_nn(sel, col);
  CHECK(out.size() == 1);
  CHECK(out[0] == 0.0);
}

TEST_CASE("matmul matches triple-loop oracle on random extents") {
  Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t m = 1 + rng.index(6), k = 1 + rng.index(6), n = 1 + rng.index(6);
    Tensor a = Tensor::uniform({m, k}, rng, -2.0, 2.0);
    Tensor b = Tensor::uniform({k, n}, rng, -2.0, 2.0);
    CHECK(matmul_nn(a, b).max_abs_diff(matmul_oracle(a, b)) < 1e-12);
  }
}

TEST_CASE("matmul rejects mismatched inner dimensions naming both shapes") {
  Tensor a = Tensor::zeros({2, 3});
  Tensor b = Tensor::zeros({4, 2});
  try {
    matmul_nn(a, b);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    std::string msg = e.what();
    CHECK(msg.find("[2x3]") != std::string::npos);
    CHECK(msg.find("[4x2]") != std::string::npos);
  }
}

TEST_CASE("transposed-product kernels agree with the plain product") {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t m = 1 + rng.index(5), k = 1 + rng.index(5), n = 1 + rng.index(5);
    Tensor a = Tensor::uniform({m, k}, rng, -1.0, 1.0);
    Tensor bt = Tensor::uniform({n, k}, rng, -1.0, 1.0);
    Tensor b = Tensor::zeros({k, n});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        b.at(j, i) = bt.at(i, j);
      }
    }
    CHECK(matmul_nt(a, bt).max_abs_diff(matmul_oracle(a, b)) < 1e-12);

    Tensor at = Tensor::uniform({k, m}, rng, -1.0, 1.0);
    Tensor a2 = Tensor::zeros({m, k});
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        a2.at(j, i) = at.at(i, j);
      }
    }
    CHECK(matmul_tn(at, b).max_abs_diff(matmul_oracle(a2, b)) < 1e-12);
  }
}

TEST_CASE("aent files round-trip bit-exactly at f32 precision") {
  Rng rng(9);
  auto tmp = std::filesystem::temp_directory_path() / "aenet_roundtrip.aent";
  for (int trial = 0; trial < 10; ++trial) {
    std::size_t m = 1 + rng.index(6), n = 1 + rng.index(6);
    Tensor t = Tensor::uniform({m, n}, rng, -100.0, 100.0);
    write_aent(tmp, t);
    Tensor back = read_aent(tmp);
    REQUIRE(back.shape() == t.shape());
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(back[i] == static_cast<double>(static_cast<float>(t[i])));
    }
  }
  std::filesystem::remove(tmp);
}

TEST_CASE("aent reader rejects corrupted headers and lengths") {
  auto dir = std::filesystem::temp_directory_path();
  auto path = dir / "aenet_bad.aent";
  Tensor t = Tensor::matrix({{1, 2}, {3, 4}});
  write_aent(path, t);

  SUBCASE("bad magic") {
    auto data = [&] {
      std::ifstream is(path, std::ios::binary);
      return std::string(std::istreambuf_iterator<char>(is), {});
    }();
    data[0] = 'X';
    std::ofstream(path, std::ios::binary) << data;
    CHECK_THROWS_WITH_AS(read_aent(path), doctest::Contains("magic"),
                         std::runtime_error);
  }
  SUBCASE("truncated payload") {
    auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size - 4);
    CHECK_THROWS_WITH_AS(read_aent(path), doctest::Contains("truncated"),
                         std::runtime_error);
  }
  std::filesystem::remove(path);
}

TEST_CASE("manifest round-trips entries in order") {
  auto dir = std::filesystem::temp_directory_path() / "aenet_manifest_test";
  std::filesystem::create_directories(dir);
  std::vector<ManifestEntry> entries = {
      {"prompt", "prompt.aent", {5, 16}, "parameter"},
      {"scores", "scores.aent", {200, 20}, "output"},
  };
  write_manifest(dir, entries);
  auto back = read_manifest(dir);
  REQUIRE(back.size() == 2);
  CHECK(back[0].name == "prompt");
  CHECK(back[0].shape == std::vector<std::size_t>{5, 16});
  CHECK(back[1].role == "output");
  std::filesystem::remove_all(dir);
}
