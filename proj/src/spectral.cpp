#include "syncnet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "syncnet/error.hpp"

namespace syncnet {

namespace {

constexpr double kNormalizationTolerance = 1e-12;
constexpr double kKernelTolerance = 1e-9;
constexpr double kNlevecResidual = 1e-10;

void require_sizes(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + ": expected size " +
                                                std::to_string(expected) + ", got " +
                                                std::to_string(got));
  }
}

double min_gamma(const Vector& gamma) {
  if (gamma.empty()) throw Error(ErrorKind::InvalidArgument, "inner matrix diagonal is empty");
  for (double g : gamma) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw Error(ErrorKind::InvalidArgument, "inner matrix entries must be finite and > 0");
    }
  }
  return *std::min_element(gamma.begin(), gamma.end());
}

void require_lipschitz(double lipschitz) {
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
    throw Error(ErrorKind::InvalidArgument, "L_h must be finite and > 0");
  }
}

// Symmetric part with exact symmetry: out(i,j) and out(j,i) are the same double.
DenseMatrix symmetric_part(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  DenseMatrix s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    s(i, i) = a(i, i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

// Original row index of G^T that ends up in the last (smallest) pivot slot
// under partial pivoting. That row is redundant and gets replaced by the
// normalization constraint.
std::size_t redundant_row(DenseMatrix a) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(pivot, k))) pivot = i;
    }
    if (a(pivot, k) == 0.0) continue;
    if (pivot != k) {
      std::swap_ranges(a.row(k).begin(), a.row(k).end(), a.row(pivot).begin());
      std::swap(perm[k], perm[pivot]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return perm[n - 1];
}

}  // namespace

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::nlevec: return "nlevec";
    case Provenance::combined: return "combined";
    case Provenance::user: return "user";
  }
  return "unknown";
}

WeightVector::WeightVector(Vector v, Provenance provenance)
    : v_(std::move(v)), provenance_(provenance) {
  if (v_.empty()) throw Error(ErrorKind::InvalidArgument, "weight vector is empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i) {
    if (!(v_[i] > 0.0) || !std::isfinite(v_[i])) {
      throw Error(ErrorKind::NotPositive, "weight " + std::to_string(i) + " = " +
                                              std::to_string(v_[i]) + " is not positive");
    }
    sum += v_[i];
  }
  if (std::abs(sum - 1.0) > kNormalizationTolerance) {
    throw Error(ErrorKind::InvalidArgument, "weights sum to " + std::to_string(sum) + ", not 1");
  }
}

WeightVector WeightVector::normalized(Vector v, Provenance provenance) {
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
      throw Error(ErrorKind::NotPositive, "weight " + std::to_string(i) + " = " +
                                              std::to_string(v[i]) + " is not positive");
    }
    sum += v[i];
  }
  for (double& x : v) x /= sum;
  return WeightVector(std::move(v), provenance);
}

WeightVector nlevec(const CouplingMatrix& g) {
  const std::size_t n = g.n();
  if (!is_strongly_connected(g)) {
    throw Error(ErrorKind::NotStronglyConnected, "coupling digraph has more than one component");
  }
  if (n == 1) return WeightVector({1.0}, Provenance::nlevec);

  DenseMatrix system = g.matrix().transpose();
  const std::size_t replaced = redundant_row(system);
  for (double& v : system.row(replaced)) v = 1.0;
  Vector rhs(n, 0.0);
  rhs[replaced] = 1.0;

  Vector xi;
  try {
    xi = lu_solve(system, rhs);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SingularMatrix) throw;
    throw Error(ErrorKind::NotStronglyConnected, "zero eigenvalue is not simple");
  }

  const double norm = matrix_one_norm(g.matrix());
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += xi[i] * g.matrix()(i, j);
    worst = std::max(worst, std::abs(acc));
  }
  if (worst > kNlevecResidual * norm) {
    throw Error(ErrorKind::NotStronglyConnected,
                "left null vector residual " + std::to_string(worst) + " too large");
  }
  for (double x : xi) {
    if (!(x > 0.0)) {
      throw Error(ErrorKind::NotStronglyConnected, "left null vector has a nonpositive entry");
    }
  }
  return WeightVector::normalized(std::move(xi), Provenance::nlevec);
}

DenseMatrix build_g_theta(const CouplingMatrix& g, const WeightVector& theta) {
  const std::size_t n = g.n();
  require_sizes(n, theta.size(), "build_g_theta weights");
  DenseMatrix p(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) p(i, j) = (i == j ? theta[i] : 0.0) - theta[i] * theta[j];
  }
  return symmetric_part(p * g.matrix());
}

double lambda2_transverse(const DenseMatrix& s) {
  if (!s.is_square()) throw Error(ErrorKind::InvalidArgument, "lambda2_transverse: not square");
  const std::size_t n = s.rows();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "transverse space needs n >= 2");
  const Vector ones(n, 1.0);
  const double residual = max_abs(s.multiply(ones));
  if (residual > kKernelTolerance * matrix_one_norm(s)) {
    throw Error(ErrorKind::NotInKernel,
                "||s 1||_inf = " + std::to_string(residual) + " exceeds tolerance");
  }
  const DenseMatrix q = transverse_basis(n);
  const DenseMatrix projected = symmetric_part(q * s * q.transpose());
  return jacobi_eigen(projected).eigenvalues.front();
}

double adsb(const CouplingMatrix& g) {
  const WeightVector xi = nlevec(g);
  const double lambda2 = lambda2_transverse(build_g_theta(g, xi));
  const double n = static_cast<double>(g.n());
  return std::abs(lambda2) / (2.0 * std::sqrt(n) * matrix_one_norm(g.matrix()));
}

DenseMatrix build_control_g_theta(const PinnedMatrix& gt, const WeightVector& theta) {
  const std::size_t n = gt.n();
  require_sizes(n, theta.size(), "build_control_g_theta weights");
  DenseMatrix scaled = gt.matrix();
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : scaled.row(i)) v *= theta[i];
  }
  return symmetric_part(scaled);
}

double adcb(const PinnedMatrix& gt, const WeightVector& xi) {
  const double lambda_max = jacobi_eigen(build_control_g_theta(gt, xi)).eigenvalues.front();
  if (lambda_max >= 0.0) {
    throw Error(ErrorKind::NotNegativeDefinite,
                "lambda_max of the weighted pinned matrix is " + std::to_string(lambda_max));
  }
  const double n = static_cast<double>(gt.n());
  return std::abs(lambda_max) / (std::sqrt(n) * matrix_one_norm(gt.matrix()));
}

double chebyshev_gap(const WeightVector& a, const WeightVector& b) {
  require_sizes(a.size(), b.size(), "chebyshev_gap");
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  return gap;
}

std::optional<WeightInterval> feasible_mu_interval(double adsb1, double adsb2, double gap) {
  if (!(adsb1 > 0.0) || !(adsb2 > 0.0) || !std::isfinite(adsb1) || !std::isfinite(adsb2)) {
    throw Error(ErrorKind::InvalidArgument, "deviation bounds must be finite and > 0");
  }
  if (!(gap >= 0.0) || !std::isfinite(gap)) {
    throw Error(ErrorKind::InvalidArgument, "gap must be finite and >= 0");
  }
  if (gap == 0.0) return WeightInterval{0.0, 1.0};
  if (gap > adsb1 + adsb2) return std::nullopt;

  // mu^1 <= adsb2 / gap and mu^2 = 1 - mu^1 <= adsb1 / gap.
  WeightInterval iv{std::max(0.0, 1.0 - adsb1 / gap), std::min(1.0, adsb2 / gap)};
  if (iv.lower > iv.upper) {
    // Only reachable at gap == adsb1 + adsb2, where the endpoints coincide up to rounding.
    const double mid = iv.midpoint();
    iv = {mid, mid};
  }
  return iv;
}

WeightVector combine_theta(double mu1, const WeightVector& xi1, const WeightVector& xi2) {
  if (!(mu1 >= 0.0 && mu1 <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "mu1 must lie in [0, 1]");
  }
  require_sizes(xi1.size(), xi2.size(), "combine_theta");
  const double mu2 = 1.0 - mu1;
  Vector v(xi1.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = mu1 * xi1[i] + mu2 * xi2[i];
  return WeightVector(std::move(v), Provenance::combined);
}

WeightVector combine_many(std::span<const double> weights, std::span<const WeightVector> vectors) {
  require_sizes(vectors.size(), weights.size(), "combine_many weights");
  if (vectors.empty()) throw Error(ErrorKind::InvalidArgument, "no vectors to combine");
  const std::size_t n = vectors.front().size();
  Vector v(n, 0.0);
  double total = 0.0;
  for (std::size_t m = 0; m < vectors.size(); ++m) {
    if (!(weights[m] >= 0.0)) throw Error(ErrorKind::InvalidArgument, "negative weight");
    require_sizes(n, vectors[m].size(), "combine_many vector");
    total += weights[m];
    for (std::size_t i = 0; i < n; ++i) v[i] += weights[m] * vectors[m][i];
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    throw Error(ErrorKind::InvalidArgument, "combination weights must sum to 1");
  }
  return WeightVector(std::move(v), Provenance::combined);
}

std::vector<bool> check_theta_admissible(std::span<const CouplingMatrix> layers,
                                         const WeightVector& theta) {
  std::vector<bool> out;
  out.reserve(layers.size());
  for (const auto& g : layers) {
    require_sizes(g.n(), theta.size(), "check_theta_admissible weights");
    out.push_back(chebyshev_gap(theta, nlevec(g)) <= adsb(g));
  }
  return out;
}

SimplexSearchResult search_combination_simplex(std::span<const CouplingMatrix> layers,
                                               std::size_t resolution) {
  if (layers.empty()) throw Error(ErrorKind::InvalidArgument, "no layers");
  if (resolution == 0) throw Error(ErrorKind::InvalidArgument, "grid resolution must be >= 1");
  const std::size_t m = layers.size();
  std::vector<WeightVector> xis;
  Vector bounds;
  for (const auto& g : layers) {
    xis.push_back(nlevec(g));
    bounds.push_back(adsb(g));
  }

  SimplexSearchResult result;
  result.margin = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> counts(m, 0);
  const double r = static_cast<double>(resolution);

  const auto evaluate = [&] {
    Vector w(m);
    for (std::size_t k = 0; k < m; ++k) w[k] = static_cast<double>(counts[k]) / r;
    const WeightVector theta = combine_many(w, xis);
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
      margin = std::min(margin, bounds[k] - chebyshev_gap(theta, xis[k]));
    }
    ++result.points_tested;
    if (margin >= 0.0) {
      ++result.points_admissible;
      if (margin > result.margin) {
        result.margin = margin;
        result.weights = std::move(w);
        result.theta = theta;
      }
    }
  };
  // Compositions of `resolution` into m parts, lexicographic in the leading counts.
  const auto enumerate = [&](auto&& self, std::size_t slot, std::size_t remaining) -> void {
    if (slot + 1 == m) {
      counts[slot] = remaining;
      evaluate();
      return;
    }
    for (std::size_t c = 0; c <= remaining; ++c) {
      counts[slot] = c;
      self(self, slot + 1, remaining - c);
    }
  };
  enumerate(enumerate, 0, resolution);
  if (!result.weights) result.margin = 0.0;
  return result;
}

SyncAnalysis sync_critical_c(double lipschitz, std::span<const Layer> layers,
                             const WeightVector& theta) {
  require_lipschitz(lipschitz);
  if (layers.empty()) throw Error(ErrorKind::InvalidArgument, "no layers");
  const std::size_t n = theta.size();

  SyncAnalysis out{.theta = theta};
  for (const auto& layer : layers) {
    require_sizes(n, layer.coupling.n(), "layer size");
    const double gmin = min_gamma(layer.gamma);
    out.nlevec_per_layer.push_back(nlevec(layer.coupling));
    out.adsb_per_layer.push_back(adsb(layer.coupling));
    const double l2 = lambda2_transverse(build_g_theta(layer.coupling, theta));
    out.lambda2_per_layer.push_back(l2);
    out.weighted_lambda_sum += l2 * gmin;
  }
  if (layers.size() == 2) {
    const double gap = chebyshev_gap(out.nlevec_per_layer[0], out.nlevec_per_layer[1]);
    out.chebyshev_gap = gap;
    out.mu_interval = feasible_mu_interval(out.adsb_per_layer[0], out.adsb_per_layer[1], gap);
  }

  DenseMatrix p(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) p(i, j) = (i == j ? theta[i] : 0.0) - theta[i] * theta[j];
  }
  out.spectral_norm = spectral_norm_symmetric(symmetric_part(p));
  if (out.weighted_lambda_sum < 0.0) {
    out.critical_c = lipschitz * out.spectral_norm / std::abs(out.weighted_lambda_sum);
  }
  return out;
}

ControlAnalysis control_critical_c(double lipschitz, std::span<const PinnedLayer> layers,
                                   const WeightVector& theta) {
  require_lipschitz(lipschitz);
  if (layers.empty()) throw Error(ErrorKind::InvalidArgument, "no layers");
  const std::size_t n = theta.size();

  ControlAnalysis out{.theta = theta};
  for (const auto& layer : layers) {
    require_sizes(n, layer.coupling.n(), "layer size");
    const double gmin = min_gamma(layer.gamma);
    const WeightVector xi = nlevec(layer.coupling.base());
    out.nlevec_per_layer.push_back(xi);
    try {
      out.adcb_per_layer.emplace_back(adcb(layer.coupling, xi));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotNegativeDefinite) throw;
      out.adcb_per_layer.emplace_back(std::nullopt);
    }
    const double lmax = jacobi_eigen(build_control_g_theta(layer.coupling, theta)).eigenvalues.front();
    out.lambda_max_per_layer.push_back(lmax);
    out.weighted_lambda_sum += lmax * gmin;
  }
  if (layers.size() == 2) {
    const double gap = chebyshev_gap(out.nlevec_per_layer[0], out.nlevec_per_layer[1]);
    out.chebyshev_gap = gap;
    if (out.adcb_per_layer[0] && out.adcb_per_layer[1]) {
      out.nu_interval = feasible_mu_interval(*out.adcb_per_layer[0], *out.adcb_per_layer[1], gap);
    }
  }
  out.max_theta = *std::max_element(theta.values().begin(), theta.values().end());
  if (out.weighted_lambda_sum < 0.0) {
    out.critical_c = lipschitz * out.max_theta / std::abs(out.weighted_lambda_sum);
  }
  return out;
}

}  // namespace syncnet
