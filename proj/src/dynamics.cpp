#include "syncnet/dynamics.hpp"

#include <cmath>
#include <random>
#include <string>

#include "syncnet/error.hpp"
#include "syncnet/kernels.hpp"

namespace syncnet {

namespace {

constexpr double kDivergenceGuard = 1e9;

void guard_state(std::span<const double> x, const char* what) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || std::abs(x[i]) > kDivergenceGuard) {
      throw Error(ErrorKind::NonFiniteState, std::string(what) + " component " +
                                                 std::to_string(i) + " = " +
                                                 std::to_string(x[i]));
    }
  }
}

void require_theta(const WeightVector& theta, const StateView& states) {
  if (theta.size() != states.nodes || states.data.size() != states.nodes * states.dim) {
    throw Error(ErrorKind::InvalidArgument, "weights and state block disagree in size");
  }
}

}  // namespace

NodeModel NodeModel::lorenz(LorenzParams params) { return NodeModel(params); }

NodeModel NodeModel::linear_test(DenseMatrix a) {
  if (!a.is_square() || a.rows() == 0) {
    throw Error(ErrorKind::InvalidArgument, "linear_test needs a non-empty square matrix");
  }
  return NodeModel(LinearTestParams{std::move(a)});
}

std::size_t NodeModel::dim() const noexcept {
  if (const auto* lin = std::get_if<LinearTestParams>(&params_)) return lin->a.rows();
  return 3;
}

std::string_view NodeModel::kind() const noexcept {
  return std::holds_alternative<LorenzParams>(params_) ? "lorenz" : "linear_test";
}

std::optional<double> NodeModel::exact_lipschitz() const {
  const auto* lin = std::get_if<LinearTestParams>(&params_);
  if (!lin) return std::nullopt;
  const DenseMatrix sym = 0.5 * (lin->a + lin->a.transpose());
  return jacobi_eigen(sym).eigenvalues.front();
}

void NodeModel::evaluate(std::span<const double> x, std::span<double> out) const noexcept {
  if (const auto* p = std::get_if<LorenzParams>(&params_)) {
    out[0] = p->sigma * (x[1] - x[0]);
    out[1] = x[0] * (p->rho - x[2]) - x[1];
    out[2] = x[0] * x[1] - p->beta * x[2];
    return;
  }
  const auto& a = std::get<LinearTestParams>(params_).a;
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = kernels::dot(a.row(i), x);
}

Vector model_rhs(const NodeModel& model, std::span<const double> x) {
  if (x.size() != model.dim()) {
    throw Error(ErrorKind::NonFiniteState, "state has " + std::to_string(x.size()) +
                                               " components, model expects " +
                                               std::to_string(model.dim()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteState, "non-finite model state");
  }
  Vector out(model.dim());
  model.evaluate(x, out);
  return out;
}

void validate_network(const NetworkSpec& spec) {
  if (spec.layers.empty()) throw Error(ErrorKind::InvalidArgument, "network has no layers");
  const std::size_t n = spec.n_nodes();
  const std::size_t dim = spec.dim();
  for (std::size_t m = 0; m < spec.layers.size(); ++m) {
    const auto& layer = spec.layers[m];
    if (layer.coupling.n() != n) {
      throw Error(ErrorKind::InvalidArgument, "layer " + std::to_string(m) + " is " +
                                                  std::to_string(layer.coupling.n()) +
                                                  " nodes, expected " + std::to_string(n));
    }
    if (!is_strongly_connected(layer.coupling)) {
      throw Error(ErrorKind::NotStronglyConnected,
                  "layer " + std::to_string(m) + " is not strongly connected");
    }
    if (layer.gamma.size() != dim) {
      throw Error(ErrorKind::InvalidArgument, "layer " + std::to_string(m) +
                                                  " inner matrix has " +
                                                  std::to_string(layer.gamma.size()) +
                                                  " entries, model dimension is " +
                                                  std::to_string(dim));
    }
    for (double g : layer.gamma) {
      if (!(g > 0.0) || !std::isfinite(g)) {
        throw Error(ErrorKind::InvalidArgument, "inner matrix entries must be > 0");
      }
    }
  }
  if (const auto* fixed = std::get_if<FixedCoupling>(&spec.coupling)) {
    if (!(fixed->c > 0.0) || !std::isfinite(fixed->c)) {
      throw Error(ErrorKind::InvalidArgument, "coupling strength c must be > 0");
    }
  } else {
    const auto& ad = std::get<AdaptiveCoupling>(spec.coupling);
    if (!(ad.beta > 0.0) || !std::isfinite(ad.beta) || !(ad.c0 >= 0.0) || !std::isfinite(ad.c0)) {
      throw Error(ErrorKind::InvalidArgument, "adaptive rule needs beta > 0 and c0 >= 0");
    }
  }
  if (spec.pinning) {
    if (spec.pinning->gains.size() != spec.layers.size()) {
      throw Error(ErrorKind::InvalidArgument, "pinning needs one gain vector per layer");
    }
    for (std::size_t m = 0; m < spec.layers.size(); ++m) {
      (void)build_pinned(spec.layers[m].coupling, spec.pinning->gains[m]);
    }
    if (spec.pinning->target_init.size() != dim) {
      throw Error(ErrorKind::InvalidArgument, "target initial state has wrong dimension");
    }
  }
}

Vector dummy_target(const WeightVector& theta, StateView states) {
  require_theta(theta, states);
  // zbar = z_1 + sum_i theta_i (z_i - z_1): equal to sum_i theta_i z_i for normalized
  // theta, and exactly z when every node sits at z.
  const auto z1 = states.node(0);
  Vector zbar(z1.begin(), z1.end());
  Vector diff(states.dim);
  for (std::size_t i = 1; i < states.nodes; ++i) {
    kernels::stage(states.node(i), z1, -1.0, diff);
    kernels::axpy(theta[i], diff, zbar);
  }
  return zbar;
}

double lyapunov_W(const WeightVector& theta, StateView states, std::span<const double> target) {
  require_theta(theta, states);
  if (target.size() != states.dim) {
    throw Error(ErrorKind::InvalidArgument, "target has wrong dimension");
  }
  Vector diff(states.dim);
  double acc = 0.0;
  for (std::size_t i = 0; i < states.nodes; ++i) {
    kernels::stage(states.node(i), target, -1.0, diff);
    acc += theta[i] * kernels::dot(diff, diff);
  }
  return 0.5 * acc;
}

double lyapunov_V(const WeightVector& theta, StateView states) {
  const Vector zbar = dummy_target(theta, states);
  return lyapunov_W(theta, states, zbar);
}

double adaptive_gain_rhs(double beta, const WeightVector& theta, StateView states,
                         std::optional<std::span<const double>> target) {
  if (!(beta > 0.0)) throw Error(ErrorKind::InvalidArgument, "beta must be > 0");
  return beta * (target ? lyapunov_W(theta, states, *target) : lyapunov_V(theta, states));
}

void network_rhs(const NetworkSpec& spec, double /*t*/, StateView states, double c,
                 std::optional<std::span<const double>> target, std::span<double> out) {
  const std::size_t n = states.nodes;
  const std::size_t dim = states.dim;
  if (n != spec.n_nodes() || dim != spec.dim() || out.size() != n * dim ||
      states.data.size() != n * dim) {
    throw Error(ErrorKind::InvalidArgument, "state block does not match the network");
  }
  if (spec.pinning && !target) {
    throw Error(ErrorKind::InvalidArgument, "pinned network needs a target state");
  }
  guard_state(states.data, "node state");
  if (target) guard_state(*target, "target state");

  for (std::size_t i = 0; i < n; ++i) spec.model.evaluate(states.node(i), out.subspan(i * dim, dim));

  // Coupling in difference form: sum_j G_ij Gamma z_j = sum_{j != i} G_ij Gamma (z_j - z_i)
  // + rowsum_i Gamma z_i. The row sums vanish for exactly zero-row-sum input,
  // so identical node states produce an exactly zero coupling term.
  Vector diff(dim);
  Vector offset(dim);
  for (std::size_t m = 0; m < spec.layers.size(); ++m) {
    const auto& layer = spec.layers[m];
    const DenseMatrix& g = layer.coupling.matrix();
    for (std::size_t i = 0; i < n; ++i) {
      auto oi = out.subspan(i * dim, dim);
      const auto zi = states.node(i);
      double rowsum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double gij = g(i, j);
        rowsum += gij;
        if (j == i || gij == 0.0) continue;
        kernels::stage(states.node(j), zi, -1.0, diff);
        kernels::hadamard(layer.gamma, diff, diff);
        kernels::axpy(c * gij, diff, oi);
      }
      if (rowsum != 0.0) {
        kernels::hadamard(layer.gamma, zi, diff);
        kernels::axpy(c * rowsum, diff, oi);
      }
    }
    if (spec.pinning) {
      const Vector& gains = spec.pinning->gains[m];
      for (std::size_t i = 0; i < n; ++i) {
        if (gains[i] == 0.0) continue;
        kernels::stage(states.node(i), *target, -1.0, offset);
        kernels::hadamard(layer.gamma, offset, offset);
        kernels::axpy(-c * gains[i], offset, out.subspan(i * dim, dim));
      }
    }
  }
}

Vector network_rhs(const NetworkSpec& spec, double t, StateView states, double c,
                   std::optional<std::span<const double>> target) {
  Vector out(states.nodes * states.dim);
  network_rhs(spec, t, states, c, target, out);
  return out;
}

void Rk4Workspace::step(const RhsFunction& f, double t, std::span<const double> y, double dt,
                        std::span<double> out) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be > 0");
  if (y.size() != k1_.size() || out.size() != k1_.size()) {
    throw Error(ErrorKind::InvalidArgument, "RK4 workspace size mismatch");
  }
  const double half = 0.5 * dt;
  f(t, y, k1_);
  kernels::stage(y, k1_, half, tmp_);
  f(t + half, tmp_, k2_);
  kernels::stage(y, k2_, half, tmp_);
  f(t + half, tmp_, k3_);
  kernels::stage(y, k3_, dt, tmp_);
  f(t + dt, tmp_, k4_);
  kernels::rk4_combine(y, k1_, k2_, k3_, k4_, dt, out);
  for (double v : out) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteState, "RK4 step produced non-finite state");
  }
}

Vector rk4_step(const RhsFunction& f, double t, std::span<const double> y, double dt) {
  Rk4Workspace ws(y.size());
  Vector out(y.size());
  ws.step(f, t, y, dt, out);
  return out;
}

std::size_t step_count(const IntegratorOptions& opts) noexcept {
  return static_cast<std::size_t>(std::floor(opts.t_end / opts.dt + 1e-9));
}

Trajectory simulate(const NetworkSpec& spec, const WeightVector& theta, const DenseMatrix& init,
                    const IntegratorOptions& opts) {
  validate_network(spec);
  const std::size_t n = spec.n_nodes();
  const std::size_t dim = spec.dim();
  if (init.rows() != n || init.cols() != dim) {
    throw Error(ErrorKind::InvalidArgument, "initial state block must be " + std::to_string(n) +
                                                "x" + std::to_string(dim));
  }
  if (theta.size() != n) throw Error(ErrorKind::InvalidArgument, "theta has wrong length");
  if (!(opts.dt > 0.0) || !(opts.t_end > 0.0) || opts.record_every == 0) {
    throw Error(ErrorKind::InvalidArgument, "need dt > 0, t_end > 0, record_every >= 1");
  }

  const bool pinned = spec.pinning.has_value();
  const auto* adaptive = std::get_if<AdaptiveCoupling>(&spec.coupling);
  const std::size_t nodes_len = n * dim;
  const std::size_t target_at = nodes_len;
  const std::size_t c_at = nodes_len + (pinned ? dim : 0);
  const std::size_t total = c_at + (adaptive ? 1 : 0);
  const double fixed_c = adaptive ? 0.0 : std::get<FixedCoupling>(spec.coupling).c;

  Vector y(total);
  std::copy(init.data().begin(), init.data().end(), y.begin());
  if (pinned) std::copy(spec.pinning->target_init.begin(), spec.pinning->target_init.end(), y.begin() + target_at);
  if (adaptive) y[c_at] = adaptive->c0;

  const auto rhs = [&](double t, std::span<const double> s, std::span<double> ds) {
    const StateView states(s.first(nodes_len), n, dim);
    std::optional<std::span<const double>> target;
    if (pinned) target = s.subspan(target_at, dim);
    const double c = adaptive ? s[c_at] : fixed_c;
    network_rhs(spec, t, states, c, target, ds.first(nodes_len));
    if (pinned) {
      guard_state(*target, "target state");
      spec.model.evaluate(*target, ds.subspan(target_at, dim));
    }
    if (adaptive) ds[c_at] = adaptive_gain_rhs(adaptive->beta, theta, states, target);
  };

  Trajectory traj{.nodes = n, .dim = dim, .pinned = pinned};
  const auto record = [&](double t, std::span<const double> s) {
    const StateView states(s.first(nodes_len), n, dim);
    traj.times.push_back(t);
    traj.states.emplace_back(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(nodes_len));
    if (pinned) {
      const auto target = s.subspan(target_at, dim);
      traj.target.emplace_back(target.begin(), target.end());
      traj.lyapunov.push_back(lyapunov_W(theta, states, target));
    } else {
      traj.lyapunov.push_back(lyapunov_V(theta, states));
    }
    traj.coupling.push_back(adaptive ? s[c_at] : fixed_c);
  };

  const std::size_t steps = step_count(opts);
  const std::size_t rows = steps / opts.record_every + 1;
  traj.times.reserve(rows);
  traj.states.reserve(rows);
  traj.lyapunov.reserve(rows);
  traj.coupling.reserve(rows);

  record(0.0, y);
  Rk4Workspace ws(total);
  Vector next(total);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * opts.dt;
    try {
      ws.step(rhs, t, y, opts.dt, next);
      guard_state(next, "state");
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NonFiniteState) throw;
      throw DivergedError(t, e.what());
    }
    y.swap(next);
    if ((k + 1) % opts.record_every == 0) record(static_cast<double>(k + 1) * opts.dt, y);
  }
  return traj;
}

std::optional<double> time_to_threshold(const Trajectory& traj, double threshold) {
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (traj.lyapunov[k] <= threshold) return traj.times[k];
  }
  return std::nullopt;
}

DenseMatrix random_initial_states(std::uint64_t seed, std::size_t nodes, std::size_t dim,
                                  double lo, double hi) {
  std::mt19937_64 gen(seed);
  std::vector<double> entries(nodes * dim);
  for (double& v : entries) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    v = lo + (hi - lo) * u;
  }
  return DenseMatrix(nodes, dim, std::move(entries));
}

}  // namespace syncnet
