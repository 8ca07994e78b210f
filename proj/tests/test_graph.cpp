#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "syncnet/error.hpp"
#include "syncnet/graph.hpp"
#include "syncnet/spectral.hpp"

using namespace syncnet;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

CouplingMatrix coupling(const oracle::Mat& m) { return validate_coupling(DenseMatrix::from_rows(m)); }

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("validate_coupling examples") {
  CHECK_NOTHROW((void)coupling(oracle::directed3()));
  CHECK_NOTHROW((void)coupling({{0}}));
  CHECK(kind_of([] { (void)coupling({{-1, 2}, {1, -2}}); }) == ErrorKind::RowSumNonZero);
  CHECK(kind_of([] { (void)coupling({{1, -1}, {1, -1}}); }) == ErrorKind::NotMetzler);
  CHECK(kind_of([] { (void)validate_coupling(DenseMatrix(2, 3)); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("error messages name the offending entry") {
  try {
    (void)coupling({{-1, 2}, {1, -2}});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("row 0") != std::string::npos);
  }
}

TEST_CASE("is_strongly_connected examples") {
  CHECK(is_strongly_connected(coupling(oracle::directed3())));
  CHECK_FALSE(is_strongly_connected(coupling({{-1, 1}, {0, 0}})));
  const oracle::Mat ring{{-1, 1, 0, 0}, {0, -1, 1, 0}, {0, 0, -1, 1}, {1, 0, 0, -1}};
  CHECK(oracle::strongly_connected_by_powers(ring));
  CHECK(is_strongly_connected(coupling(ring)));
  CHECK(is_strongly_connected(coupling({{0}})));
}

TEST_CASE("strong connectivity agrees with the reachability oracle") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> size(2, 9);
  std::uniform_real_distribution<double> dens(0.05, 0.6);
  int connected = 0;
  for (int trial = 0; trial < 500; ++trial) {
    auto m = oracle::random_coupling(rng, size(rng), dens(rng));
    const bool expected = oracle::strongly_connected_by_powers(m);
    connected += expected;
    CHECK(is_strongly_connected(coupling(m)) == expected);
  }
  // Make sure both outcomes were exercised.
  CHECK(connected > 50);
  CHECK(connected < 450);
}

TEST_CASE("components partition the nodes") {
  const oracle::Mat two_blocks{{-1, 1, 0, 0}, {1, -1, 0, 0}, {0, 0, -1, 1}, {0, 1, 1, -2}};
  auto comps = strongly_connected_components(DenseMatrix::from_rows(two_blocks));
  CHECK(comps.size() == 2);
  std::size_t total = 0;
  for (const auto& c : comps) total += c.size();
  CHECK(total == 4);
}

TEST_CASE("validated matrices annihilate the ones vector") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = coupling(oracle::random_coupling(rng, 6, 0.5));
    std::vector<double> ones(6, 1.0);
    CHECK(max_abs(g.matrix().multiply(ones)) <= 1e-12 * matrix_one_norm(g.matrix()) + 1e-300);
  }
}

TEST_CASE("build_pinned examples") {
  auto g = coupling(oracle::directed3());
  std::vector<double> gains{1, 0, 0};
  auto p = build_pinned(g, gains);
  CHECK(p.matrix()(0, 0) == -4.0);
  CHECK(p.matrix()(1, 1) == -4.0);
  CHECK(p.gains() == gains);
  std::vector<double> zeros{0, 0, 0}, neg{1, -1, 0}, short_gains{1, 0};
  CHECK(kind_of([&] { (void)build_pinned(g, zeros); }) == ErrorKind::AllGainsZero);
  CHECK(kind_of([&] { (void)build_pinned(g, neg); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { (void)build_pinned(g, short_gains); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("pinned directed three-node layer is negative definite under its NLEVec weighting") {
  auto g = coupling(oracle::directed3());
  std::vector<double> gains{2, 0, 0};
  auto p = build_pinned(g, gains);
  const std::vector<double> xi{0.3, 0.2, 0.5};
  oracle::Mat s(3, oracle::Vec(3));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      s[i][j] = 0.5 * (xi[i] * p.matrix()(i, j) + p.matrix()(j, i) * xi[j]);
  auto ev = oracle::symmetric3_eigenvalues(s);
  CHECK(ev[0] < 0.0);
}

TEST_CASE("pinned row sums are nonpositive and negative on pinned rows") {
  auto g = coupling(oracle::directed3());
  std::vector<double> gains{0, 3, 0};
  auto p = build_pinned(g, gains);
  for (std::size_t i = 0; i < 3; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < 3; ++j) sum += p.matrix()(i, j);
    if (gains[i] > 0)
      CHECK(sum < 0.0);
    else
      CHECK(sum <= 1e-12);
  }
}

TEST_CASE("NLEVec-weighted pinned matrices are negative definite") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<std::size_t> size(2, 6);
  std::uniform_real_distribution<double> gain(0.01, 5.0), coin(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = size(rng);
    auto m = oracle::random_connected_coupling(rng, n);
    auto g = coupling(m);
    std::vector<double> gains(n, 0.0);
    // Alternate between a single pinned node and random nonnegative gains.
    if (trial % 2 == 0) {
      gains[trial % n] = gain(rng);
    } else {
      for (auto& d : gains) d = coin(rng) < 0.5 ? gain(rng) : 0.0;
      gains[0] = gain(rng);
    }
    auto p = build_pinned(g, gains);
    auto xi = nlevec(g);
    DenseMatrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        s(i, j) = 0.5 * (xi[i] * p.matrix()(i, j) + p.matrix()(j, i) * xi[j]);
    CHECK(jacobi_eigen(s).eigenvalues.front() < 0.0);
  }
}

}  // TEST_SUITE
