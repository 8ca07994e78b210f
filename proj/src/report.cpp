#include "syncnet/report.hpp"

#include <cmath>

#include "syncnet/error.hpp"

namespace syncnet {

using nlohmann::json;

namespace {

template <class T>
void put(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <class T>
void get(const json& j, const char* key, std::optional<T>& v) {
  if (const auto it = j.find(key); it != j.end() && !it->is_null()) {
    v = it->get<T>();
  } else {
    v.reset();
  }
}

template <class T>
void get(const json& j, const char* key, T& v) {
  j.at(key).get_to(v);
}

json layer_to_json(const LayerReport& l) {
  json j{{"nlevec", l.nlevec},
         {"spectrum_xi", l.spectrum_xi},
         {"lambda2_xi", l.lambda2_xi},
         {"adsb", l.adsb},
         {"one_norm", l.one_norm}};
  put(j, "gamma_min", l.gamma_min);
  put(j, "spectrum_theta", l.spectrum_theta);
  put(j, "lambda2_theta", l.lambda2_theta);
  put(j, "theta_gap", l.theta_gap);
  put(j, "admissible", l.admissible);
  put(j, "gains", l.gains);
  put(j, "lambda_max_control_xi", l.lambda_max_control_xi);
  put(j, "lambda_max_control_theta", l.lambda_max_control_theta);
  put(j, "adcb", l.adcb);
  return j;
}

LayerReport layer_from_json(const json& j) {
  LayerReport l;
  get(j, "nlevec", l.nlevec);
  get(j, "spectrum_xi", l.spectrum_xi);
  get(j, "lambda2_xi", l.lambda2_xi);
  get(j, "adsb", l.adsb);
  get(j, "one_norm", l.one_norm);
  get(j, "gamma_min", l.gamma_min);
  get(j, "spectrum_theta", l.spectrum_theta);
  get(j, "lambda2_theta", l.lambda2_theta);
  get(j, "theta_gap", l.theta_gap);
  get(j, "admissible", l.admissible);
  get(j, "gains", l.gains);
  get(j, "lambda_max_control_xi", l.lambda_max_control_xi);
  get(j, "lambda_max_control_theta", l.lambda_max_control_theta);
  get(j, "adcb", l.adcb);
  return l;
}

json simulation_to_json(const SimulationSummary& s) {
  json j{{"lyapunov_kind", s.lyapunov_kind}, {"coupling_mode", s.coupling_mode},
         {"seed", s.seed},                   {"dt", s.dt},
         {"t_end", s.t_end},                 {"record_every", s.record_every},
         {"rows", s.rows},                   {"threshold", s.threshold},
         {"kernel_isa", s.kernel_isa}};
  put(j, "final_lyapunov", s.final_lyapunov);
  put(j, "final_c", s.final_c);
  put(j, "time_to_threshold", s.time_to_threshold);
  put(j, "diverged_at", s.diverged_at);
  return j;
}

SimulationSummary simulation_from_json(const json& j) {
  SimulationSummary s;
  get(j, "lyapunov_kind", s.lyapunov_kind);
  get(j, "coupling_mode", s.coupling_mode);
  get(j, "seed", s.seed);
  get(j, "dt", s.dt);
  get(j, "t_end", s.t_end);
  get(j, "record_every", s.record_every);
  get(j, "rows", s.rows);
  get(j, "threshold", s.threshold);
  get(j, "kernel_isa", s.kernel_isa);
  get(j, "final_lyapunov", s.final_lyapunov);
  get(j, "final_c", s.final_c);
  get(j, "time_to_threshold", s.time_to_threshold);
  get(j, "diverged_at", s.diverged_at);
  return s;
}

void require_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, what + " is not finite");
}

void require_finite(const std::vector<double>& v, const std::string& what) {
  for (double x : v) require_finite(x, what);
}

template <class T>
void require_finite(const std::optional<T>& v, const std::string& what) {
  if (v) require_finite(*v, what);
}

}  // namespace

HypothesisReport make_hypothesis(std::string name, double lhs, std::string relation, double rhs) {
  HypothesisReport h{std::move(name), lhs, std::move(relation), rhs, false};
  h.holds = h.recompute();
  return h;
}

void to_json(json& j, const AnalysisReport& r) {
  j = json{{"schema_version", r.schema_version},
           {"command", r.command},
           {"critical_c_infeasible", r.critical_c_infeasible}};
  json layers = json::array();
  for (const auto& l : r.layers) layers.push_back(layer_to_json(l));
  j["layers"] = std::move(layers);
  put(j, "chebyshev_gap", r.chebyshev_gap);
  if (r.interval) {
    json iv{{"kind", r.interval->kind}, {"empty", r.interval->empty}};
    put(iv, "lower", r.interval->lower);
    put(iv, "upper", r.interval->upper);
    j["interval"] = std::move(iv);
  }
  put(j, "theta", r.theta);
  put(j, "theta_source", r.theta_source);
  put(j, "lipschitz", r.lipschitz);
  put(j, "coupling_strength", r.coupling_strength);
  put(j, "spectral_norm", r.spectral_norm);
  put(j, "max_theta", r.max_theta);
  put(j, "weighted_lambda_sum", r.weighted_lambda_sum);
  put(j, "critical_c", r.critical_c);
  json hyps = json::array();
  for (const auto& h : r.hypotheses) {
    hyps.push_back({{"name", h.name},
                    {"lhs", h.lhs},
                    {"relation", h.relation},
                    {"rhs", h.rhs},
                    {"holds", h.holds}});
  }
  j["hypotheses"] = std::move(hyps);
  j["notes"] = r.notes;
  if (r.simulation) j["simulation"] = simulation_to_json(*r.simulation);
}

void from_json(const json& j, AnalysisReport& r) {
  r = AnalysisReport{};
  get(j, "schema_version", r.schema_version);
  if (r.schema_version != 1) {
    throw Error(ErrorKind::Parse, "unsupported report schema_version " +
                                      std::to_string(r.schema_version));
  }
  get(j, "command", r.command);
  get(j, "critical_c_infeasible", r.critical_c_infeasible);
  for (const auto& l : j.at("layers")) r.layers.push_back(layer_from_json(l));
  get(j, "chebyshev_gap", r.chebyshev_gap);
  if (const auto it = j.find("interval"); it != j.end()) {
    IntervalReport iv;
    get(*it, "kind", iv.kind);
    get(*it, "empty", iv.empty);
    get(*it, "lower", iv.lower);
    get(*it, "upper", iv.upper);
    r.interval = iv;
  }
  get(j, "theta", r.theta);
  get(j, "theta_source", r.theta_source);
  get(j, "lipschitz", r.lipschitz);
  get(j, "coupling_strength", r.coupling_strength);
  get(j, "spectral_norm", r.spectral_norm);
  get(j, "max_theta", r.max_theta);
  get(j, "weighted_lambda_sum", r.weighted_lambda_sum);
  get(j, "critical_c", r.critical_c);
  for (const auto& h : j.at("hypotheses")) {
    HypothesisReport hr;
    get(h, "name", hr.name);
    get(h, "lhs", hr.lhs);
    get(h, "relation", hr.relation);
    get(h, "rhs", hr.rhs);
    get(h, "holds", hr.holds);
    r.hypotheses.push_back(std::move(hr));
  }
  get(j, "notes", r.notes);
  if (const auto it = j.find("simulation"); it != j.end()) r.simulation = simulation_from_json(*it);
}

std::string dump_report(const AnalysisReport& r) {
  check_report_consistency(r);
  return json(r).dump(2) + "\n";
}

AnalysisReport parse_report(const std::string& text) {
  try {
    return json::parse(text).get<AnalysisReport>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("report: ") + e.what());
  }
}

void check_report_consistency(const AnalysisReport& r) {
  for (std::size_t m = 0; m < r.layers.size(); ++m) {
    const auto& l = r.layers[m];
    const std::string tag = "layer " + std::to_string(m) + " ";
    require_finite(l.nlevec, tag + "nlevec");
    require_finite(l.spectrum_xi, tag + "spectrum");
    require_finite(l.lambda2_xi, tag + "lambda2");
    require_finite(l.adsb, tag + "adsb");
    require_finite(l.one_norm, tag + "norm");
    require_finite(l.gamma_min, tag + "gamma_min");
    require_finite(l.spectrum_theta, tag + "spectrum_theta");
    require_finite(l.lambda2_theta, tag + "lambda2_theta");
    require_finite(l.theta_gap, tag + "theta_gap");
    require_finite(l.gains, tag + "gains");
    require_finite(l.lambda_max_control_xi, tag + "lambda_max");
    require_finite(l.lambda_max_control_theta, tag + "lambda_max");
    require_finite(l.adcb, tag + "adcb");
  }
  require_finite(r.chebyshev_gap, "chebyshev_gap");
  if (r.interval) {
    require_finite(r.interval->lower, "interval");
    require_finite(r.interval->upper, "interval");
  }
  require_finite(r.theta, "theta");
  require_finite(r.lipschitz, "lipschitz");
  require_finite(r.coupling_strength, "coupling_strength");
  require_finite(r.spectral_norm, "spectral_norm");
  require_finite(r.max_theta, "max_theta");
  require_finite(r.weighted_lambda_sum, "weighted_lambda_sum");
  require_finite(r.critical_c, "critical_c");
  for (const auto& h : r.hypotheses) {
    require_finite(h.lhs, h.name);
    require_finite(h.rhs, h.name);
    if (h.holds != h.recompute()) {
      throw Error(ErrorKind::InvalidArgument, "hypothesis '" + h.name + "' flag is inconsistent");
    }
  }
  if (r.simulation) {
    require_finite(r.simulation->final_lyapunov, "final_lyapunov");
    require_finite(r.simulation->final_c, "final_c");
    require_finite(r.simulation->time_to_threshold, "time_to_threshold");
  }
}

}  // namespace syncnet
