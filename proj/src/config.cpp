#include "syncnet/config.hpp"

#include <cmath>

#include "json.hpp"
#include "syncnet/error.hpp"
#include "syncnet/io.hpp"

namespace syncnet {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorKind::Parse, "config: " + what);
}

double number(const json& j, const char* key, double fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) config_error(std::string("'") + key + "' must be a number");
  return it->get<double>();
}

Vector vector_of(const json& j, const std::string& what) {
  if (!j.is_array()) config_error(what + " must be an array of numbers");
  Vector v;
  for (const auto& x : j) {
    if (!x.is_number()) config_error(what + " must be an array of numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

DenseMatrix matrix_of(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) config_error(what + " must be a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) rows.push_back(vector_of(r, what + " row"));
  return DenseMatrix::from_rows(rows);
}

NodeModel parse_model(const json& j) {
  const std::string kind = j.value("kind", "lorenz");
  const json params = j.value("params", json::object());
  if (kind == "lorenz") {
    LorenzParams p;
    p.sigma = number(params, "sigma", p.sigma);
    p.rho = number(params, "rho", p.rho);
    p.beta = number(params, "beta", p.beta);
    return NodeModel::lorenz(p);
  }
  if (kind == "linear_test") {
    if (!params.contains("A")) config_error("linear_test model needs params.A");
    return NodeModel::linear_test(matrix_of(params.at("A"), "model.params.A"));
  }
  config_error("unknown model kind '" + kind + "'");
}

CouplingRule parse_coupling(const json& j) {
  const std::string mode = j.value("mode", "fixed");
  if (mode == "fixed") return FixedCoupling{number(j, "c", 1.0)};
  if (mode == "adaptive") return AdaptiveCoupling{number(j, "beta", 1.0), number(j, "c0", 0.0)};
  config_error("unknown coupling mode '" + mode + "'");
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    config_error(e.what());
  }
  if (!j.is_object()) config_error("top level must be an object");

  try {
    RunConfig cfg;
    if (!j.contains("schema_version")) config_error("schema_version is mandatory");
    cfg.schema_version = j.at("schema_version").get<int>();
    if (cfg.schema_version != 1) {
      config_error("unsupported schema_version " + std::to_string(cfg.schema_version));
    }

    if (j.contains("model")) cfg.model = parse_model(j.at("model"));
    if (j.contains("coupling")) cfg.coupling = parse_coupling(j.at("coupling"));

    if (!j.contains("layers") || !j.at("layers").is_array() || j.at("layers").empty()) {
      config_error("'layers' must be a non-empty array");
    }
    for (const auto& lj : j.at("layers")) {
      LayerConfig layer;
      const auto& mj = lj.at("matrix");
      if (mj.is_string()) {
        std::filesystem::path p = mj.get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        layer.matrix = io::read_matrix_file(p);
      } else {
        layer.matrix = matrix_of(mj, "layer matrix");
      }
      if (lj.contains("gamma")) layer.gamma = vector_of(lj.at("gamma"), "layer gamma");
      cfg.layers.push_back(std::move(layer));
    }

    if (j.contains("pinning") && !j.at("pinning").is_null()) {
      const auto& pj = j.at("pinning");
      PinningConfig pin;
      const auto& gj = pj.at("gains");
      if (!gj.is_array() || gj.size() != cfg.layers.size()) {
        config_error("pinning.gains needs one entry per layer");
      }
      for (std::size_t m = 0; m < gj.size(); ++m) {
        const std::size_t n = cfg.layers[m].matrix.rows();
        if (gj[m].is_number()) {
          Vector g(n, 0.0);
          g[0] = gj[m].get<double>();
          pin.gains.push_back(std::move(g));
        } else {
          pin.gains.push_back(vector_of(gj[m], "pinning gains"));
        }
      }
      if (pj.contains("target_init")) pin.target_init = vector_of(pj.at("target_init"), "target_init");
      cfg.pinning = std::move(pin);
    }

    if (j.contains("theta")) {
      const auto& tj = j.at("theta");
      if (tj.is_string()) {
        if (tj.get<std::string>() != "auto") config_error("theta must be \"auto\" or a list");
      } else {
        cfg.theta = vector_of(tj, "theta");
      }
    }

    if (j.contains("integrator")) {
      const auto& ij = j.at("integrator");
      cfg.integrator.dt = number(ij, "dt", cfg.integrator.dt);
      cfg.integrator.t_end = number(ij, "t_end", cfg.integrator.t_end);
      const double every = number(ij, "record_every", static_cast<double>(cfg.integrator.record_every));
      if (!(every >= 1.0) || every != std::floor(every)) config_error("record_every must be a positive integer");
      cfg.integrator.record_every = static_cast<std::size_t>(every);
    }
    if (!(cfg.integrator.dt > 0.0) || !(cfg.integrator.t_end > 0.0)) {
      config_error("integrator needs dt > 0 and t_end > 0");
    }

    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("init")) {
      const auto& ij = j.at("init");
      if (ij.is_string()) {
        if (ij.get<std::string>() != "random") config_error("init must be \"random\" or a matrix");
      } else {
        cfg.init = matrix_of(ij, "init");
      }
    }
    if (j.contains("L_h") && !j.at("L_h").is_null()) cfg.lipschitz = number(j, "L_h", 0.0);
    cfg.threshold = number(j, "threshold", cfg.threshold);
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
    return cfg;
  } catch (const json::exception& e) {
    config_error(e.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(io::read_text_file(path), path.parent_path());
}

DenseMatrix initial_states(const RunConfig& cfg, std::uint64_t seed) {
  const std::size_t n = cfg.layers.front().matrix.rows();
  const std::size_t dim = cfg.model.dim();
  if (cfg.init) {
    if (cfg.init->rows() != n || cfg.init->cols() != dim) {
      throw Error(ErrorKind::InvalidArgument, "init must be " + std::to_string(n) + "x" +
                                                  std::to_string(dim));
    }
    return *cfg.init;
  }
  return random_initial_states(seed, n, dim);
}

NetworkSpec build_network(const RunConfig& cfg, const std::vector<std::size_t>& layer_subset) {
  std::vector<std::size_t> selected = layer_subset;
  if (selected.empty()) {
    for (std::size_t m = 0; m < cfg.layers.size(); ++m) selected.push_back(m);
  }
  NetworkSpec spec;
  spec.model = cfg.model;
  spec.coupling = cfg.coupling;
  const std::size_t dim = cfg.model.dim();
  for (std::size_t m : selected) {
    if (m >= cfg.layers.size()) throw Error(ErrorKind::InvalidArgument, "layer index out of range");
    const auto& lc = cfg.layers[m];
    Layer layer{validate_coupling(lc.matrix), lc.gamma.empty() ? Vector(dim, 1.0) : lc.gamma};
    spec.layers.push_back(std::move(layer));
  }
  if (cfg.pinning) {
    Pinning pin;
    for (std::size_t m : selected) pin.gains.push_back(cfg.pinning->gains[m]);
    if (cfg.pinning->target_init) {
      pin.target_init = *cfg.pinning->target_init;
    } else {
      const std::size_t n = cfg.layers.front().matrix.rows();
      const DenseMatrix draws = random_initial_states(cfg.seed, n + 1, dim);
      pin.target_init.assign(draws.row(n).begin(), draws.row(n).end());
    }
    spec.pinning = std::move(pin);
  }
  validate_network(spec);
  return spec;
}

ResolvedTheta resolve_theta(const RunConfig& cfg, const NetworkSpec& spec) {
  const std::size_t layers = spec.layers.size();
  if (cfg.theta) {
    if (cfg.theta->size() != spec.n_nodes()) {
      throw Error(ErrorKind::InvalidArgument, "theta has " + std::to_string(cfg.theta->size()) +
                                                  " entries, network has " +
                                                  std::to_string(spec.n_nodes()) + " nodes");
    }
    return {WeightVector::normalized(*cfg.theta, Provenance::user), "explicit", {}};
  }

  std::vector<WeightVector> xis;
  for (const auto& l : spec.layers) xis.push_back(nlevec(l.coupling));
  if (layers == 1) return {xis.front(), "nlevec", {}};

  if (spec.pinning) {
    if (layers != 2) {
      throw Error(ErrorKind::InvalidArgument,
                  "automatic theta for pinned networks needs exactly two layers; give theta explicitly");
    }
    std::vector<double> bounds;
    for (std::size_t m = 0; m < 2; ++m) {
      const PinnedMatrix pm = build_pinned(spec.layers[m].coupling, spec.pinning->gains[m]);
      bounds.push_back(adcb(pm, xis[m]));
    }
    const double gap = chebyshev_gap(xis[0], xis[1]);
    const auto nu = feasible_mu_interval(bounds[0], bounds[1], gap);
    if (!nu) {
      throw Error(ErrorKind::InvalidArgument,
                  "nu interval is empty (gap exceeds ADCB sum); give theta explicitly");
    }
    return {combine_theta(nu->midpoint(), xis[0], xis[1]), "nu_midpoint", {}};
  }

  std::vector<CouplingMatrix> mats;
  for (const auto& l : spec.layers) mats.push_back(l.coupling);
  if (layers == 2) {
    const double gap = chebyshev_gap(xis[0], xis[1]);
    const auto mu = feasible_mu_interval(adsb(mats[0]), adsb(mats[1]), gap);
    if (!mu) {
      throw Error(ErrorKind::InvalidArgument,
                  "mu interval is empty (gap exceeds ADSB sum); give theta explicitly");
    }
    return {combine_theta(mu->midpoint(), xis[0], xis[1]), "mu_midpoint", {}};
  }
  const auto search = search_combination_simplex(mats, 100);
  if (!search.theta) {
    throw Error(ErrorKind::InvalidArgument,
                "no admissible combination on the simplex grid; give theta explicitly");
  }
  return {*search.theta, "simplex_grid",
          {"simplex grid: " + std::to_string(search.points_admissible) + " of " +
           std::to_string(search.points_tested) + " points admissible"}};
}

}  // namespace syncnet
