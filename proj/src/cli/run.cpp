#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "syncnet/cli.hpp"
#include "syncnet/io.hpp"

namespace syncnet::cli {

namespace {

std::vector<DenseMatrix> read_matrices(const std::vector<std::string>& paths) {
  std::vector<DenseMatrix> out;
  for (const auto& p : paths) out.push_back(io::read_matrix_file(p));
  return out;
}

std::vector<Vector> parse_lists(const std::vector<std::string>& items) {
  std::vector<Vector> out;
  for (const auto& s : items) out.push_back(io::parse_number_list(s));
  return out;
}

void emit(const AnalysisReport& report, const std::string& out_path, std::ostream& out) {
  const std::string text = dump_report(report);
  if (!out_path.empty()) io::write_text_file(out_path, text);
  out << text;
}

std::filesystem::path output_prefix(const std::string& flag, const RunConfig& cfg,
                                    const std::string& config_path) {
  if (!flag.empty()) return flag;
  if (cfg.out) return *cfg.out;
  std::filesystem::path p = config_path;
  return p.replace_extension();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synchronization analysis and simulation for multi-layer directed networks", "syncnet"};
  app.require_subcommand(1);

  std::vector<std::string> matrices;
  std::string theta_text;
  std::string out_path;
  std::vector<std::string> gamma_texts;
  std::vector<std::string> gain_texts;
  double lipschitz = 0.0;
  double coupling = 0.0;
  std::size_t grid = 100;
  std::string config_path;
  std::size_t trials = 5;
  std::uint64_t seed = 0;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--theta", theta_text, "Reference weight vector, e.g. 0.25,0.25,0.5");
    sub->add_option("--lh", lipschitz, "One-sided Lipschitz constant L_h > 0 of the node dynamics");
    sub->add_option("--c", coupling, "Coupling strength to test against the condition");
    sub->add_option("--gamma", gamma_texts, "Inner-matrix diagonal per layer (repeatable)");
    sub->add_option("--out", out_path, "Also write the JSON report to this path");
  };

  auto* analyze = app.add_subcommand("analyze", "NLEVec, lambda_2 and ADSB of one coupling matrix");
  analyze->add_option("matrix", matrices, "Matrix file")->required()->expected(1);
  add_common(analyze);

  auto* combine = app.add_subcommand("combine", "Two-layer NLEVec combination and mu interval");
  combine->add_option("matrices", matrices, "Two matrix files")->required()->expected(2);
  add_common(combine);

  auto* control = app.add_subcommand("control", "Pinned matrices: ADCB and nu interval");
  control->add_option("matrices", matrices, "Matrix files")->required()->expected(1, 16);
  control->add_option("--gains", gain_texts, "Pinning gains per node (repeat per layer)")->required();
  add_common(control);

  auto* check = app.add_subcommand("check", "Admissibility of a theta, or simplex search without one");
  check->add_option("matrices", matrices, "Matrix files")->required()->expected(1, 16);
  check->add_option("--grid", grid, "Simplex grid resolution")->check(CLI::PositiveNumber);
  add_common(check);

  auto* simulate_cmd = app.add_subcommand("simulate", "Integrate a configured network");
  simulate_cmd->add_option("config", config_path, "JSON run configuration")->required();
  simulate_cmd->add_option("--out", out_path, "Output prefix for <out>.csv and <out>.report.json");
  simulate_cmd->add_option("--seed", seed, "Override the configured seed");

  auto* conjecture = app.add_subcommand("conjecture", "Single- versus two-layer synchronization sweep");
  conjecture->add_option("config", config_path, "Two-layer JSON run configuration")->required();
  conjecture->add_option("--trials", trials, "Number of seeds");
  conjecture->add_option("--seed", seed, "Override the first seed");
  conjecture->add_option("--out", out_path, "Write the summary CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  const auto sub_given = [](const CLI::App* sub, const char* name) {
    const auto* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };

  try {
    const auto* active = app.get_subcommands().front();
    AnalysisOptions opts;
    if (!theta_text.empty()) opts.theta = io::parse_number_list(theta_text);
    if (sub_given(active, "--lh")) opts.lipschitz = lipschitz;
    if (sub_given(active, "--c")) opts.coupling_strength = coupling;
    opts.gammas = parse_lists(gamma_texts);

    if (active == analyze) {
      emit(cmd_analyze(read_matrices(matrices).front(), opts), out_path, out);
      return kExitOk;
    }
    if (active == combine) {
      const auto ms = read_matrices(matrices);
      emit(cmd_combine(ms[0], ms[1], opts), out_path, out);
      return kExitOk;
    }
    if (active == control) {
      emit(cmd_control(read_matrices(matrices), parse_lists(gain_texts), opts), out_path, out);
      return kExitOk;
    }
    if (active == check) {
      emit(cmd_check(read_matrices(matrices), opts, grid), out_path, out);
      return kExitOk;
    }

    RunConfig cfg = load_run_config(config_path);
    if (active == simulate_cmd) {
      if (sub_given(simulate_cmd, "--seed")) cfg.seed = seed;
      const auto prefix = output_prefix(out_path, cfg, config_path);
      const SimulationRun result = cmd_simulate(cfg);
      if (result.trajectory) {
        std::ofstream csv(prefix.string() + ".csv", std::ios::binary | std::ios::trunc);
        if (!csv) throw Error(ErrorKind::InvalidArgument, "cannot write " + prefix.string() + ".csv");
        io::write_trajectory_csv(csv, *result.trajectory);
      }
      io::write_text_file(prefix.string() + ".report.json", dump_report(result.report));
      const auto& s = *result.report.simulation;
      if (s.diverged_at) {
        err << "syncnet: diverged at t=" << *s.diverged_at << '\n';
      } else {
        out << "wrote " << prefix.string() << ".csv (" << s.rows << " rows), final "
            << s.lyapunov_kind << " = " << io::format_double(*s.final_lyapunov)
            << ", final c = " << io::format_double(*s.final_c) << '\n';
      }
      return result.exit_code;
    }

    if (sub_given(conjecture, "--seed")) cfg.seed = seed;
    const std::string csv = conjecture_csv(cmd_conjecture(cfg, trials, default_workers()));
    if (out_path.empty()) {
      out << csv;
    } else {
      io::write_text_file(out_path, csv);
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "syncnet: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "syncnet: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace syncnet::cli
