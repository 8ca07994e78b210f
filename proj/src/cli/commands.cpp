#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "syncnet/cli.hpp"
#include "syncnet/graph.hpp"
#include "syncnet/io.hpp"
#include "syncnet/kernels.hpp"
#include "syncnet/spectral.hpp"

namespace syncnet::cli {

namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

std::string layer_tag(std::size_t m) { return "layer" + std::to_string(m + 1); }

Vector gamma_for(const AnalysisOptions& opts, std::size_t m) {
  if (opts.gammas.empty()) return {1.0};
  if (opts.gammas.size() == 1) return opts.gammas.front();
  if (m >= opts.gammas.size()) {
    throw Error(ErrorKind::InvalidArgument, "expected one --gamma per layer");
  }
  return opts.gammas[m];
}

LayerReport describe_layer(const CouplingMatrix& g) {
  const WeightVector xi = nlevec(g);
  const DenseMatrix gxi = build_g_theta(g, xi);
  LayerReport l;
  l.nlevec = xi.values();
  l.spectrum_xi = jacobi_eigen(gxi).eigenvalues;
  l.lambda2_xi = lambda2_transverse(gxi);
  l.one_norm = matrix_one_norm(g.matrix());
  l.adsb = adsb(g);
  return l;
}

void attach_theta(LayerReport& l, const CouplingMatrix& g, const WeightVector& theta) {
  const DenseMatrix gt = build_g_theta(g, theta);
  l.spectrum_theta = jacobi_eigen(gt).eigenvalues;
  l.lambda2_theta = lambda2_transverse(gt);
  l.theta_gap = chebyshev_gap(theta, WeightVector(l.nlevec, Provenance::nlevec));
  l.admissible = *l.theta_gap <= l.adsb;
}

void add_theta_hypotheses(AnalysisReport& r, std::size_t m) {
  const auto& l = r.layers[m];
  r.hypotheses.push_back(
      make_hypothesis(layer_tag(m) + ".theta_within_adsb", *l.theta_gap, "<=", l.adsb));
  r.hypotheses.push_back(
      make_hypothesis(layer_tag(m) + ".transverse_negative_definite", *l.lambda2_theta, "<", 0.0));
}

IntervalReport interval_report(const char* kind, const std::optional<WeightInterval>& iv) {
  IntervalReport r{kind, !iv.has_value(), std::nullopt, std::nullopt};
  if (iv) {
    r.lower = iv->lower;
    r.upper = iv->upper;
  }
  return r;
}

void set_theta(AnalysisReport& r, const WeightVector& theta, std::string source) {
  r.theta = theta.values();
  r.theta_source = std::move(source);
}

void attach_sync_condition(AnalysisReport& r, const std::vector<Layer>& layers,
                           const WeightVector& theta, const AnalysisOptions& opts) {
  if (!opts.lipschitz) return;
  const SyncAnalysis sa = sync_critical_c(*opts.lipschitz, layers, theta);
  r.lipschitz = *opts.lipschitz;
  r.spectral_norm = sa.spectral_norm;
  r.weighted_lambda_sum = sa.weighted_lambda_sum;
  for (std::size_t m = 0; m < layers.size(); ++m) {
    r.layers[m].gamma_min = *std::min_element(layers[m].gamma.begin(), layers[m].gamma.end());
  }
  if (sa.critical_c) {
    r.critical_c = *sa.critical_c;
  } else {
    r.critical_c_infeasible = true;
    r.notes.push_back("synchronization condition infeasible: weighted lambda_2 sum " +
                      fmt(sa.weighted_lambda_sum) + " is not negative");
  }
  if (opts.coupling_strength) {
    r.coupling_strength = *opts.coupling_strength;
    const double lhs =
        *opts.lipschitz + *opts.coupling_strength * sa.weighted_lambda_sum / sa.spectral_norm;
    r.hypotheses.push_back(make_hypothesis("sync_condition", lhs, "<", 0.0));
  }
}

std::vector<Layer> make_layers(const std::vector<CouplingMatrix>& mats,
                               const AnalysisOptions& opts) {
  std::vector<Layer> layers;
  for (std::size_t m = 0; m < mats.size(); ++m) layers.push_back({mats[m], gamma_for(opts, m)});
  return layers;
}

std::optional<WeightVector> user_theta(const AnalysisOptions& opts, std::size_t n) {
  if (!opts.theta) return std::nullopt;
  if (opts.theta->size() != n) {
    throw Error(ErrorKind::InvalidArgument, "--theta has " + std::to_string(opts.theta->size()) +
                                                " entries, matrix has " + std::to_string(n) +
                                                " nodes");
  }
  return WeightVector::normalized(*opts.theta, Provenance::user);
}

void attach_control(AnalysisReport& r, const std::vector<PinnedLayer>& layers,
                    const std::optional<WeightVector>& theta, const AnalysisOptions& opts) {
  if (!theta) return;
  for (std::size_t m = 0; m < layers.size(); ++m) {
    auto& l = r.layers[m];
    l.lambda_max_control_theta =
        jacobi_eigen(build_control_g_theta(layers[m].coupling, *theta)).eigenvalues.front();
    l.theta_gap = chebyshev_gap(*theta, WeightVector(l.nlevec, Provenance::nlevec));
    r.hypotheses.push_back(make_hypothesis(layer_tag(m) + ".pinned_theta_negative_definite",
                                           *l.lambda_max_control_theta, "<", 0.0));
    if (l.adcb) {
      l.admissible = *l.theta_gap <= *l.adcb;
      r.hypotheses.push_back(
          make_hypothesis(layer_tag(m) + ".theta_within_adcb", *l.theta_gap, "<=", *l.adcb));
    }
  }
  if (!opts.lipschitz) return;
  const ControlAnalysis ca = control_critical_c(*opts.lipschitz, layers, *theta);
  r.lipschitz = *opts.lipschitz;
  r.max_theta = ca.max_theta;
  r.weighted_lambda_sum = ca.weighted_lambda_sum;
  for (std::size_t m = 0; m < layers.size(); ++m) {
    r.layers[m].gamma_min =
        *std::min_element(layers[m].gamma.begin(), layers[m].gamma.end());
  }
  if (ca.critical_c) {
    r.critical_c = *ca.critical_c;
  } else {
    r.critical_c_infeasible = true;
    r.notes.push_back("control condition infeasible: weighted lambda_max sum " +
                      fmt(ca.weighted_lambda_sum) + " is not negative");
  }
  if (opts.coupling_strength) {
    r.coupling_strength = *opts.coupling_strength;
    const double lhs =
        *opts.lipschitz + *opts.coupling_strength * ca.weighted_lambda_sum / ca.max_theta;
    r.hypotheses.push_back(make_hypothesis("control_condition", lhs, "<", 0.0));
  }
}

// Builds the control section shared by `control` and pinned `simulate`.
std::vector<PinnedLayer> describe_pinned(AnalysisReport& r, const std::vector<CouplingMatrix>& mats,
                                         const std::vector<Vector>& gains,
                                         const AnalysisOptions& opts) {
  std::vector<PinnedLayer> pinned;
  for (std::size_t m = 0; m < mats.size(); ++m) {
    const Vector& gm = gains.size() == 1 ? gains.front() : gains.at(m);
    pinned.push_back({build_pinned(mats[m], gm), gamma_for(opts, m)});
    auto& l = r.layers[m];
    l.gains = gm;
    const WeightVector xi(l.nlevec, Provenance::nlevec);
    l.lambda_max_control_xi =
        jacobi_eigen(build_control_g_theta(pinned.back().coupling, xi)).eigenvalues.front();
    r.hypotheses.push_back(make_hypothesis(layer_tag(m) + ".pinned_nlevec_negative_definite",
                                           *l.lambda_max_control_xi, "<", 0.0));
    if (*l.lambda_max_control_xi < 0.0) {
      l.adcb = adcb(pinned.back().coupling, xi);
    } else {
      r.notes.push_back(layer_tag(m) +
                        ": NLEVec-weighted pinned matrix is not negative definite; no ADCB");
    }
  }
  if (mats.size() == 2) {
    const double gap = chebyshev_gap(WeightVector(r.layers[0].nlevec, Provenance::nlevec),
                                     WeightVector(r.layers[1].nlevec, Provenance::nlevec));
    r.chebyshev_gap = gap;
    const auto& a1 = r.layers[0].adcb;
    const auto& a2 = r.layers[1].adcb;
    if (a1 && a2) {
      r.interval = interval_report("nu", feasible_mu_interval(*a1, *a2, gap));
      r.hypotheses.push_back(make_hypothesis("nlevec_gap_within_adcb_sum", gap, "<=", *a1 + *a2));
      r.notes.push_back(
          "two-layer control bounds use ADCB of the pinned matrices for both the gap "
          "test and the nu constraints");
    } else {
      r.interval = IntervalReport{"nu", true, std::nullopt, std::nullopt};
    }
  }
  return pinned;
}

std::vector<CouplingMatrix> validate_all(const std::vector<DenseMatrix>& mats) {
  std::vector<CouplingMatrix> out;
  for (const auto& m : mats) out.push_back(validate_coupling(m));
  for (std::size_t m = 1; m < out.size(); ++m) {
    if (out[m].n() != out[0].n()) {
      throw Error(ErrorKind::InvalidArgument, "all layers must have the same node count");
    }
  }
  return out;
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotStronglyConnected: return kExitConnectivity;
    case ErrorKind::Diverged:
    case ErrorKind::NonFiniteState: return kExitDiverged;
    case ErrorKind::SingularMatrix:
    case ErrorKind::NoConvergence: return kExitInternal;
    default: return kExitInput;
  }
}

AnalysisReport cmd_analyze(const DenseMatrix& matrix, const AnalysisOptions& opts) {
  const CouplingMatrix g = validate_coupling(matrix);
  AnalysisReport r;
  r.command = "analyze";
  r.layers.push_back(describe_layer(g));

  const auto theta = user_theta(opts, g.n());
  if (theta) {
    attach_theta(r.layers[0], g, *theta);
    add_theta_hypotheses(r, 0);
    set_theta(r, *theta, "explicit");
  } else {
    set_theta(r, WeightVector(r.layers[0].nlevec, Provenance::nlevec), "nlevec");
  }
  const WeightVector chosen(*r.theta, theta ? Provenance::user : Provenance::nlevec);
  attach_sync_condition(r, make_layers({g}, opts), chosen, opts);
  return r;
}

AnalysisReport cmd_combine(const DenseMatrix& m1, const DenseMatrix& m2,
                           const AnalysisOptions& opts) {
  const auto mats = validate_all({m1, m2});
  AnalysisReport r;
  r.command = "combine";
  for (const auto& g : mats) r.layers.push_back(describe_layer(g));

  const WeightVector xi1(r.layers[0].nlevec, Provenance::nlevec);
  const WeightVector xi2(r.layers[1].nlevec, Provenance::nlevec);
  const double gap = chebyshev_gap(xi1, xi2);
  const double bound_sum = r.layers[0].adsb + r.layers[1].adsb;
  r.chebyshev_gap = gap;
  const auto mu = feasible_mu_interval(r.layers[0].adsb, r.layers[1].adsb, gap);
  r.interval = interval_report("mu", mu);
  r.hypotheses.push_back(make_hypothesis("nlevec_gap_within_adsb_sum", gap, "<=", bound_sum));
  if (!mu) {
    r.notes.push_back("mu interval is empty: NLEVec gap " + fmt(gap) +
                      " exceeds ADSB(G1) + ADSB(G2) = " + fmt(bound_sum));
  }

  std::optional<WeightVector> theta = user_theta(opts, mats[0].n());
  if (theta) {
    set_theta(r, *theta, "explicit");
  } else if (mu) {
    theta = combine_theta(mu->midpoint(), xi1, xi2);
    set_theta(r, *theta, "mu_midpoint");
  }
  if (theta) {
    for (std::size_t m = 0; m < 2; ++m) {
      attach_theta(r.layers[m], mats[m], *theta);
      add_theta_hypotheses(r, m);
    }
    attach_sync_condition(r, make_layers(mats, opts), *theta, opts);
  } else if (opts.lipschitz) {
    r.lipschitz = *opts.lipschitz;
    r.notes.push_back("no theta available; critical coupling strength not evaluated");
  }
  return r;
}

AnalysisReport cmd_control(const std::vector<DenseMatrix>& matrices,
                           const std::vector<Vector>& gains, const AnalysisOptions& opts) {
  if (matrices.empty()) throw Error(ErrorKind::InvalidArgument, "control needs at least one matrix");
  if (gains.empty()) throw Error(ErrorKind::InvalidArgument, "control needs --gains");
  if (gains.size() != 1 && gains.size() != matrices.size()) {
    throw Error(ErrorKind::InvalidArgument, "give one --gains per layer or a single shared one");
  }
  const auto mats = validate_all(matrices);
  AnalysisReport r;
  r.command = "control";
  for (const auto& g : mats) r.layers.push_back(describe_layer(g));
  const auto pinned = describe_pinned(r, mats, gains, opts);

  std::optional<WeightVector> theta = user_theta(opts, mats[0].n());
  if (theta) {
    set_theta(r, *theta, "explicit");
  } else if (mats.size() == 1) {
    theta = WeightVector(r.layers[0].nlevec, Provenance::nlevec);
    set_theta(r, *theta, "nlevec");
  } else if (mats.size() == 2 && r.interval && !r.interval->empty) {
    const double nu = 0.5 * (*r.interval->lower + *r.interval->upper);
    theta = combine_theta(nu, WeightVector(r.layers[0].nlevec, Provenance::nlevec),
                          WeightVector(r.layers[1].nlevec, Provenance::nlevec));
    set_theta(r, *theta, "nu_midpoint");
  } else {
    r.notes.push_back("no theta available; pass --theta to evaluate the control condition");
  }
  attach_control(r, pinned, theta, opts);
  return r;
}

AnalysisReport cmd_check(const std::vector<DenseMatrix>& matrices, const AnalysisOptions& opts,
                         std::size_t grid) {
  if (matrices.empty()) throw Error(ErrorKind::InvalidArgument, "check needs at least one matrix");
  const auto mats = validate_all(matrices);
  AnalysisReport r;
  r.command = "check";
  for (const auto& g : mats) r.layers.push_back(describe_layer(g));

  std::optional<WeightVector> theta = user_theta(opts, mats[0].n());
  if (theta) {
    set_theta(r, *theta, "explicit");
  } else {
    const auto search = search_combination_simplex(mats, grid);
    r.notes.push_back("simplex grid (resolution " + std::to_string(grid) + "): " +
                      std::to_string(search.points_admissible) + " of " +
                      std::to_string(search.points_tested) + " points admissible");
    if (search.theta) {
      theta = *search.theta;
      set_theta(r, *theta, "simplex_grid");
      std::string w;
      for (double x : *search.weights) w += (w.empty() ? "" : ",") + fmt(x);
      r.notes.push_back("best combination weights: " + w + " (margin " + fmt(search.margin) + ")");
    } else {
      r.notes.push_back("no admissible combination found");
    }
  }
  if (theta) {
    for (std::size_t m = 0; m < mats.size(); ++m) {
      attach_theta(r.layers[m], mats[m], *theta);
      add_theta_hypotheses(r, m);
    }
    attach_sync_condition(r, make_layers(mats, opts), *theta, opts);
  }
  return r;
}

SimulationRun cmd_simulate(const RunConfig& cfg) {
  const NetworkSpec spec = build_network(cfg);
  const ResolvedTheta resolved = resolve_theta(cfg, spec);

  AnalysisOptions opts;
  opts.lipschitz = cfg.lipschitz;
  for (const auto& l : spec.layers) opts.gammas.push_back(l.gamma);
  if (const auto* fixed = std::get_if<FixedCoupling>(&spec.coupling)) {
    opts.coupling_strength = fixed->c;
  }

  std::vector<CouplingMatrix> mats;
  for (const auto& l : spec.layers) mats.push_back(l.coupling);

  SimulationRun run;
  AnalysisReport& r = run.report;
  r.command = "simulate";
  for (const auto& g : mats) r.layers.push_back(describe_layer(g));
  set_theta(r, resolved.theta, resolved.source);
  r.notes = resolved.notes;
  if (spec.pinning) {
    const auto pinned = describe_pinned(r, mats, spec.pinning->gains, opts);
    attach_control(r, pinned, resolved.theta, opts);
  } else {
    if (mats.size() == 2) {
      const double gap = chebyshev_gap(WeightVector(r.layers[0].nlevec, Provenance::nlevec),
                                       WeightVector(r.layers[1].nlevec, Provenance::nlevec));
      r.chebyshev_gap = gap;
      r.interval = interval_report("mu", feasible_mu_interval(r.layers[0].adsb, r.layers[1].adsb, gap));
      r.hypotheses.push_back(make_hypothesis("nlevec_gap_within_adsb_sum", gap, "<=",
                                             r.layers[0].adsb + r.layers[1].adsb));
    }
    for (std::size_t m = 0; m < mats.size(); ++m) {
      attach_theta(r.layers[m], mats[m], resolved.theta);
      add_theta_hypotheses(r, m);
    }
    attach_sync_condition(r, spec.layers, resolved.theta, opts);
  }
  if (!cfg.lipschitz) {
    r.notes.push_back("L_h not given; coupling conditions not evaluated");
  }
  r.notes.push_back(
      "initial states, beta and c(0) are run-configuration choices, not derived values");

  SimulationSummary s;
  s.lyapunov_kind = spec.pinning ? "W" : "V";
  s.coupling_mode = std::holds_alternative<AdaptiveCoupling>(spec.coupling) ? "adaptive" : "fixed";
  s.seed = cfg.seed;
  s.dt = cfg.integrator.dt;
  s.t_end = cfg.integrator.t_end;
  s.record_every = cfg.integrator.record_every;
  s.threshold = cfg.threshold;
  s.kernel_isa = std::string(kernels::to_string(kernels::active_isa()));

  try {
    Trajectory traj = simulate(spec, resolved.theta, initial_states(cfg, cfg.seed), cfg.integrator);
    s.rows = traj.size();
    s.final_lyapunov = traj.lyapunov.back();
    s.final_c = traj.coupling.back();
    s.time_to_threshold = time_to_threshold(traj, cfg.threshold);
    run.trajectory = std::move(traj);
  } catch (const DivergedError& e) {
    s.diverged_at = e.time();
    r.notes.push_back(e.what());
    run.exit_code = kExitDiverged;
  }
  r.simulation = s;
  return run;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("SYNCNET_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ConjectureRow> cmd_conjecture(const RunConfig& cfg, std::size_t trials,
                                          std::size_t workers) {
  if (cfg.layers.size() != 2) {
    throw Error(ErrorKind::InvalidArgument, "conjecture needs a two-layer configuration");
  }
  static const char* const kScenarios[3] = {"layer1", "layer2", "both"};
  const std::vector<std::size_t> subsets[3] = {{0}, {1}, {0, 1}};

  std::vector<ConjectureRow> rows(trials * 3);
  const auto run_one = [&](std::size_t index) {
    const std::size_t trial = index / 3;
    const std::size_t scenario = index % 3;
    ConjectureRow& row = rows[index];
    row.trial = trial;
    row.seed = cfg.seed + trial;
    row.scenario = kScenarios[scenario];
    RunConfig local = cfg;
    local.seed = row.seed;
    try {
      const NetworkSpec spec = build_network(local, subsets[scenario]);
      std::optional<WeightVector> theta;
      try {
        const ResolvedTheta rt = resolve_theta(local, spec);
        theta = rt.theta;
        row.theta_source = rt.source;
      } catch (const Error& e) {
        if (scenario != 2 || e.kind() != ErrorKind::InvalidArgument) throw;
        theta = combine_theta(0.5, nlevec(spec.layers[0].coupling), nlevec(spec.layers[1].coupling));
        row.theta_source = "fallback_mu_0.5";
      }
      const Trajectory traj = simulate(spec, *theta, initial_states(local, row.seed), local.integrator);
      row.status = "ok";
      row.final_lyapunov = traj.lyapunov.back();
      row.time_to_threshold = time_to_threshold(traj, local.threshold);
    } catch (const DivergedError& e) {
      row.status = "diverged";
      row.detail = e.what();
    } catch (const Error& e) {
      row.status = "error";
      row.detail = e.what();
    }
  };

  const std::size_t total = rows.size();
  const std::size_t pool = std::min(std::max<std::size_t>(workers, 1), std::max<std::size_t>(total, 1));
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) run_one(i);
  };
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < pool; ++t) threads.emplace_back(worker);
  }
  return rows;
}

std::string conjecture_csv(const std::vector<ConjectureRow>& rows) {
  std::string out = "trial,seed,scenario,status,V_end,time_to_threshold,theta_source,detail\n";
  for (const auto& r : rows) {
    std::string detail = r.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    std::replace(detail.begin(), detail.end(), '\n', ' ');
    out += std::to_string(r.trial) + "," + std::to_string(r.seed) + "," + r.scenario + "," +
           r.status + "," + (r.final_lyapunov ? io::format_double(*r.final_lyapunov) : "") + "," +
           (r.time_to_threshold ? io::format_double(*r.time_to_threshold) : "") + "," +
           r.theta_source + "," + detail + "\n";
  }
  return out;
}

}  // namespace syncnet::cli
