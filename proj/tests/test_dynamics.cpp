#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "syncnet/dynamics.hpp"
#include "syncnet/error.hpp"

using namespace syncnet;

namespace {

CouplingMatrix coupling(const oracle::Mat& m) { return validate_coupling(DenseMatrix::from_rows(m)); }

WeightVector user(std::vector<double> v) { return WeightVector(std::move(v), Provenance::user); }

NetworkSpec two_layer_spec() {
  NetworkSpec spec;
  spec.layers = {{coupling(oracle::directed3()), {1, 2, 1}},
                 {coupling(oracle::complete3()), {1, 1, 1}}};
  spec.coupling = FixedCoupling{1.0};
  return spec;
}

const WeightVector& two_layer_theta() {
  static const WeightVector th =
      user({0.31666666666666665, 0.26666666666666666, 0.41666666666666669});
  return th;
}

double rk4_global_error(double dt) {
  const RhsFunction f = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = -y[0];
  };
  Vector y{1.0};
  const auto steps = static_cast<std::size_t>(std::lround(1.0 / dt));
  for (std::size_t k = 0; k < steps; ++k) y = rk4_step(f, k * dt, y, dt);
  return std::abs(y[0] - std::exp(-1.0));
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("model_rhs examples") {
  auto lorenz = NodeModel::lorenz();
  CHECK(lorenz.dim() == 3);
  CHECK(model_rhs(lorenz, std::vector<double>{0, 0, 0}) == std::vector<double>{0, 0, 0});
  auto d = model_rhs(lorenz, std::vector<double>{1, 1, 1});
  CHECK(d[0] == 0.0);
  CHECK(d[1] == 26.0);
  CHECK(std::abs(d[2] - (-5.0 / 3.0)) < 1e-15);
  auto lin = NodeModel::linear_test(DenseMatrix(2, 2));
  CHECK(model_rhs(lin, std::vector<double>{3, -4}) == std::vector<double>{0, 0});
  CHECK_THROWS_AS((void)model_rhs(lorenz, std::vector<double>{NAN, 0, 0}), Error);
  CHECK_THROWS_AS((void)model_rhs(lorenz, std::vector<double>{1, 2}), Error);
  CHECK_THROWS_AS((void)NodeModel::linear_test(DenseMatrix(2, 3)), Error);
}

TEST_CASE("exact Lipschitz constant of a linear model") {
  auto lin = NodeModel::linear_test(DenseMatrix{{0.2, 1.0}, {-1.0, 0.2}});
  REQUIRE(lin.exact_lipschitz().has_value());
  CHECK(std::abs(*lin.exact_lipschitz() - 0.2) < 1e-14);
  CHECK_FALSE(NodeModel::lorenz().exact_lipschitz().has_value());
}

TEST_CASE("dummy_target examples") {
  DenseMatrix same{{1, 2, 3}, {1, 2, 3}, {1, 2, 3}};
  CHECK(oracle::max_abs_diff(dummy_target(user({0.3, 0.2, 0.5}), same), {1, 2, 3}) < 1e-15);
  DenseMatrix pm{{2, -1}, {-2, 1}};
  CHECK(dummy_target(user({0.5, 0.5}), pm) == std::vector<double>{0, 0});
  auto id = DenseMatrix::identity(3);
  CHECK(oracle::max_abs_diff(dummy_target(user({0.3, 0.2, 0.5}), id), {0.3, 0.2, 0.5}) < 1e-15);
}

TEST_CASE("lyapunov_V examples") {
  DenseMatrix same{{4, 5}, {4, 5}};
  CHECK(lyapunov_V(user({0.5, 0.5}), same) == 0.0);
  DenseMatrix pm{{1, 0}, {-1, 0}};
  CHECK(lyapunov_V(user({0.5, 0.5}), pm) == doctest::Approx(0.5).epsilon(1e-15));
  auto z = random_initial_states(3, 4, 3);
  auto th = user({0.1, 0.2, 0.3, 0.4});
  const double v = lyapunov_V(th, z);
  CHECK(std::abs(lyapunov_V(th, 3.0 * z) - 9.0 * v) < 1e-12 * v);
  // Oracle: weighted error about sum_i theta_i z_i.
  oracle::Vec zbar(3, 0.0);
  auto rows = z.to_rows();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t k = 0; k < 3; ++k) zbar[k] += th[i] * rows[i][k];
  CHECK(std::abs(v - oracle::weighted_error(th.values(), rows, zbar)) < 1e-12);
}

TEST_CASE("lyapunov_W examples") {
  DenseMatrix z{{1, 1}, {1, 1}};
  std::vector<double> target{1, 1};
  CHECK(lyapunov_W(user({0.5, 0.5}), z, target) == 0.0);
  DenseMatrix off{{1, 3}, {1, 1}};
  CHECK(lyapunov_W(user({0.25, 0.75}), off, target) == doctest::Approx(0.25 * 4 / 2));
  auto r = random_initial_states(9, 5, 3);
  std::vector<double> t2{0.5, -1.0, 2.0};
  auto th = user({0.1, 0.15, 0.2, 0.25, 0.3});
  CHECK(std::abs(lyapunov_W(th, r, t2) - oracle::weighted_error(th.values(), r.to_rows(), t2)) <
        1e-12);
}

TEST_CASE("adaptive_gain_rhs examples") {
  DenseMatrix same{{1, 1}, {1, 1}};
  CHECK(adaptive_gain_rhs(1.0, user({0.5, 0.5}), same) == 0.0);
  DenseMatrix pm{{1, 0}, {-1, 0}};
  CHECK(adaptive_gain_rhs(2.0, user({0.5, 0.5}), pm) == doctest::Approx(1.0));
  auto r = random_initial_states(5, 3, 3);
  auto th = user({0.2, 0.3, 0.5});
  CHECK(adaptive_gain_rhs(1.5, th, r) == 1.5 * lyapunov_V(th, r));
  std::vector<double> target{1, 2, 3};
  CHECK(adaptive_gain_rhs(1.5, th, r, std::span<const double>(target)) ==
        1.5 * lyapunov_W(th, r, target));
}

TEST_CASE("network_rhs matches the double-loop oracle") {
  auto spec = two_layer_spec();
  std::vector<oracle::LayerData> data{{oracle::directed3(), {1, 2, 1}, {}},
                                      {oracle::complete3(), {1, 1, 1}, {}}};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto z = random_initial_states(seed, 3, 3);
    const double c = 0.5 + 0.1 * static_cast<double>(seed);
    auto got = network_rhs(spec, 0.0, z, c);
    auto want = oracle::network_rhs(data, oracle::lorenz, z.to_rows(), c, {});
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(got[i * 3 + k] - want[i][k]) < 1e-12);
  }
}

TEST_CASE("pinned network_rhs matches the double-loop oracle") {
  auto spec = two_layer_spec();
  spec.pinning = Pinning{{{2, 0, 0}, {0, 1.5, 0}}, {0.1, 0.2, 0.3}};
  std::vector<oracle::LayerData> data{{oracle::directed3(), {1, 2, 1}, {2, 0, 0}},
                                      {oracle::complete3(), {1, 1, 1}, {0, 1.5, 0}}};
  std::vector<double> target{1.0, -2.0, 3.0};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto z = random_initial_states(seed, 3, 3);
    auto got = network_rhs(spec, 0.0, z, 1.3, std::span<const double>(target));
    auto want = oracle::network_rhs(data, oracle::lorenz, z.to_rows(), 1.3, target);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(got[i * 3 + k] - want[i][k]) < 1e-12);
  }
  CHECK_THROWS_AS((void)network_rhs(spec, 0.0, random_initial_states(1, 3, 3), 1.0), Error);
}

TEST_CASE("network_rhs on the synchronization manifold is the node dynamics") {
  auto spec = two_layer_spec();
  DenseMatrix z{{1, 2, 3}, {1, 2, 3}, {1, 2, 3}};
  auto d = network_rhs(spec, 0.0, z, 5.0);
  auto h = model_rhs(spec.model, std::vector<double>{1, 2, 3});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 3; ++k) CHECK(d[i * 3 + k] == h[k]);

  NetworkSpec single;
  single.layers = {{coupling({{0}}), {1, 1, 1}}};
  DenseMatrix one{{1, 1, 1}};
  CHECK(oracle::max_abs_diff(network_rhs(single, 0.0, one, 3.0), {0, 26, -5.0 / 3.0}) < 1e-15);
}

TEST_CASE("network_rhs divergence guard") {
  auto spec = two_layer_spec();
  DenseMatrix huge{{2e9, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  try {
    (void)network_rhs(spec, 0.0, huge, 1.0);
    FAIL("expected NonFiniteState");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFiniteState);
  }
}

TEST_CASE("validate_network rejects bad specs") {
  auto spec = two_layer_spec();
  CHECK_NOTHROW(validate_network(spec));
  auto bad_gamma = spec;
  bad_gamma.layers[0].gamma = {1, 0, 1};
  CHECK_THROWS_AS(validate_network(bad_gamma), Error);
  auto bad_c = spec;
  bad_c.coupling = FixedCoupling{0.0};
  CHECK_THROWS_AS(validate_network(bad_c), Error);
  auto disconnected = spec;
  disconnected.layers[1].coupling = coupling({{-1, 1, 0}, {0, 0, 0}, {0, 1, -1}});
  try {
    validate_network(disconnected);
    FAIL("expected NotStronglyConnected");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotStronglyConnected);
  }
  auto zero_gains = spec;
  zero_gains.pinning = Pinning{{{0, 0, 0}, {0, 0, 0}}, {0, 0, 0}};
  try {
    validate_network(zero_gains);
    FAIL("expected AllGainsZero");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AllGainsZero);
  }
}

TEST_CASE("rk4_step examples") {
  const RhsFunction zero = [](double, std::span<const double>, std::span<double> dy) {
    std::fill(dy.begin(), dy.end(), 0.0);
  };
  std::vector<double> y{1.5, -2.0};
  CHECK(rk4_step(zero, 0.0, y, 0.1) == y);

  const RhsFunction decay = [](double, std::span<const double> s, std::span<double> dy) {
    dy[0] = -s[0];
  };
  auto one = rk4_step(decay, 0.0, std::vector<double>{1.0}, 0.01);
  CHECK(std::abs(one[0] - std::exp(-0.01)) < 1e-11);
  CHECK_THROWS_AS((void)rk4_step(decay, 0.0, std::vector<double>{1.0}, 0.0), Error);
}

TEST_CASE("rk4 time dependence enters at the stage times") {
  // y' = t integrates exactly for a quadratic in t.
  const RhsFunction f = [](double t, std::span<const double>, std::span<double> dy) { dy[0] = t; };
  auto y = rk4_step(f, 1.0, std::vector<double>{0.0}, 0.5);
  CHECK(std::abs(y[0] - (1.5 * 1.5 - 1.0) / 2) < 1e-15);
}

TEST_CASE("rk4 global error falls by about 16x per halving") {
  const double e1 = rk4_global_error(0.1), e2 = rk4_global_error(0.05);
  const double order = std::log2(e1 / e2);
  CHECK(order >= 3.8);
  CHECK(order <= 4.2);
}

TEST_CASE("step_count and record layout") {
  CHECK(step_count({.dt = 1e-3, .t_end = 10.0, .record_every = 10}) == 10000);
  CHECK(step_count({.dt = 0.1, .t_end = 0.3, .record_every = 1}) == 3);
  auto spec = two_layer_spec();
  auto traj = simulate(spec, two_layer_theta(), random_initial_states(1, 3, 3),
                       {.dt = 1e-3, .t_end = 0.5, .record_every = 7});
  CHECK(traj.size() == 500 / 7 + 1);
  CHECK(traj.times[1] == 7 * 1e-3);
  CHECK(traj.times.size() == traj.lyapunov.size());
  CHECK(traj.states.front().size() == 9);
}

TEST_CASE("random_initial_states follows the documented stream") {
  auto z = random_initial_states(42, 2, 3);
  std::mt19937_64 gen(42);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t k = 0; k < 3; ++k) {
      const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
      CHECK(z(i, k) == -5.0 + 10.0 * u);
    }
  auto again = random_initial_states(42, 2, 3);
  CHECK(again == z);
  CHECK_FALSE(random_initial_states(43, 2, 3) == z);
  auto wide = random_initial_states(7, 1000, 3);
  CHECK(wide.max_abs() <= 5.0);
}

TEST_CASE("identical initial states stay on the manifold") {
  auto spec = two_layer_spec();
  DenseMatrix init{{1.5, -2.0, 20.0}, {1.5, -2.0, 20.0}, {1.5, -2.0, 20.0}};
  auto traj = simulate(spec, two_layer_theta(), init, {.dt = 1e-3, .t_end = 10.0, .record_every = 10});
  for (std::size_t r = 0; r < traj.size(); ++r) {
    CHECK(traj.lyapunov[r] <= 1e-20);
    const auto& s = traj.states[r];
    for (std::size_t i = 1; i < 3; ++i)
      for (std::size_t k = 0; k < 3; ++k)
        CHECK(std::abs(s[i * 3 + k] - s[k]) <= 1e-12 * (1.0 + std::abs(s[k])));
  }
}

TEST_CASE("two-layer Lorenz network synchronizes") {
  auto traj = simulate(two_layer_spec(), two_layer_theta(), random_initial_states(1, 3, 3), {});
  CHECK(traj.lyapunov.back() < 1e-6);
  for (double v : traj.lyapunov) CHECK(v >= 0.0);
  auto t = time_to_threshold(traj, 1e-6);
  REQUIRE(t.has_value());
  CHECK(*t < 10.0);
}

TEST_CASE("adaptive coupling is nondecreasing") {
  auto spec = two_layer_spec();
  spec.coupling = AdaptiveCoupling{1.0, 0.0};
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto traj = simulate(spec, two_layer_theta(), random_initial_states(seed, 3, 3), {});
    CHECK(traj.coupling.front() == 0.0);
    for (std::size_t r = 1; r < traj.size(); ++r) CHECK(traj.coupling[r] >= traj.coupling[r - 1]);
    CHECK(std::isfinite(traj.coupling.back()));
  }
}

TEST_CASE("linear network decays monotonically at twice the critical coupling") {
  auto g = coupling(oracle::directed3());
  auto xi = nlevec(g);
  NetworkSpec spec;
  spec.layers = {{g, {1, 1}}};
  spec.model = NodeModel::linear_test(DenseMatrix{{0.2, 1.0}, {-1.0, 0.2}});
  const double lh = *spec.model.exact_lipschitz();
  auto an = sync_critical_c(lh, spec.layers, xi);
  REQUIRE(an.critical_c.has_value());
  spec.coupling = FixedCoupling{2.0 * *an.critical_c};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto traj = simulate(spec, xi, random_initial_states(seed, 3, 2),
                         {.dt = 1e-3, .t_end = 5.0, .record_every = 10});
    for (std::size_t r = 1; r < traj.size(); ++r)
      CHECK(traj.lyapunov[r] <= traj.lyapunov[r - 1] * (1 + 1e-9));
  }
}

TEST_CASE("pinned linear network decays toward the target") {
  auto g = coupling(oracle::directed3());
  auto xi = nlevec(g);
  const std::vector<double> gains{5, 0, 0};
  NetworkSpec spec;
  spec.layers = {{g, {1, 1}}};
  spec.model = NodeModel::linear_test(DenseMatrix{{0.2, 1.0}, {-1.0, 0.2}});
  spec.pinning = Pinning{{gains}, {1.0, -1.0}};
  const double lh = *spec.model.exact_lipschitz();
  std::vector<PinnedLayer> pl{{build_pinned(g, gains), {1, 1}}};
  auto an = control_critical_c(lh, pl, xi);
  REQUIRE(an.critical_c.has_value());
  spec.coupling = FixedCoupling{1.5 * *an.critical_c};
  auto traj = simulate(spec, xi, random_initial_states(3, 3, 2),
                       {.dt = 1e-3, .t_end = 10.0, .record_every = 10});
  CHECK(traj.pinned);
  CHECK(traj.target.size() == traj.size());
  for (std::size_t r = 1; r < traj.size(); ++r)
    CHECK(traj.lyapunov[r] <= traj.lyapunov[r - 1] * (1 + 1e-9));
  CHECK(traj.lyapunov.back() < traj.lyapunov.front());
}

TEST_CASE("divergence reports the failure time") {
  NetworkSpec spec;
  spec.layers = {{coupling({{-1, 1}, {1, -1}}), {1}}};
  spec.model = NodeModel::linear_test(DenseMatrix{{50.0}});
  DenseMatrix init{{5.0}, {4.0}};
  try {
    (void)simulate(spec, user({0.5, 0.5}), init, {.dt = 1e-3, .t_end = 2.0, .record_every = 1});
    FAIL("expected divergence");
  } catch (const DivergedError& e) {
    // 5 e^{50 t} crosses 1e9 near t = 0.38
    CHECK(e.time() > 0.3);
    CHECK(e.time() < 0.45);
    CHECK(e.kind() == ErrorKind::Diverged);
  }
}

TEST_CASE("simulation is deterministic") {
  auto spec = two_layer_spec();
  auto a = simulate(spec, two_layer_theta(), random_initial_states(5, 3, 3), {});
  auto b = simulate(spec, two_layer_theta(), random_initial_states(5, 3, 3), {});
  CHECK(a.states == b.states);
  CHECK(a.lyapunov == b.lyapunov);
}

}  // TEST_SUITE
