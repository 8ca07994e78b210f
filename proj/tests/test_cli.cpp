#include <cmath>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "syncnet/cli.hpp"
#include "syncnet/config.hpp"
#include "syncnet/error.hpp"
#include "syncnet/io.hpp"
#include "syncnet/report.hpp"

using namespace syncnet;
namespace fs = std::filesystem;

namespace {

const fs::path kData = SYNCNET_DATA_DIR;
const fs::path kScratch = SYNCNET_SCRATCH_DIR;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "syncnet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  fs::create_directories(kScratch);
  return kScratch / name;
}

fs::path write_scratch(const std::string& name, const std::string& text) {
  auto p = scratch(name);
  io::write_text_file(p, text);
  return p;
}

std::string two_layer_config(const std::string& extra = "") {
  nlohmann::json j = nlohmann::json::parse(io::read_text_file(kData / "two_layer_lorenz.json"));
  j["layers"][0]["matrix"] = (kData / "layer1.txt").string();
  j["layers"][1]["matrix"] = (kData / "layer2.txt").string();
  if (!extra.empty()) j.merge_patch(nlohmann::json::parse(extra));
  return j.dump();
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("matrix text parsing") {
  auto m = io::parse_matrix_text("# comment\n-3 1 2\n2,-4,2\n\n1, 1,\t-2  # trailing\n");
  CHECK(m == DenseMatrix::from_rows(oracle::directed3()));
  CHECK_THROWS_AS((void)io::parse_matrix_text("1 2\n3\n"), Error);
  CHECK_THROWS_AS((void)io::parse_matrix_text("1 x\n"), Error);
  CHECK_THROWS_AS((void)io::parse_matrix_text("# nothing\n"), Error);
  CHECK(io::read_matrix_file(kData / "directed3.txt") == DenseMatrix::from_rows(oracle::directed3()));
}

TEST_CASE("number lists and shortest round-trip formatting") {
  CHECK(io::parse_number_list("0.25,0.25,0.5") == std::vector<double>{0.25, 0.25, 0.5});
  CHECK(io::parse_number_list("1 2  3") == std::vector<double>{1, 2, 3});
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(1.0 / 3.0) == "0.3333333333333333");
  for (double v : {1e-300, -2.5, 6.02e23, 0.31666666666666665})
    CHECK(std::stod(io::format_double(v)) == v);
}

TEST_CASE("csv header layout") {
  Trajectory traj{.nodes = 2, .dim = 3, .pinned = true};
  CHECK(io::trajectory_csv_header(traj) ==
        "t,z1_1,z1_2,z1_3,z2_1,z2_2,z2_3,V,c,target_1,target_2,target_3");
  traj.pinned = false;
  CHECK(io::trajectory_csv_header(traj) == "t,z1_1,z1_2,z1_3,z2_1,z2_2,z2_3,V,c");
}

}  // TEST_SUITE

TEST_SUITE("report") {

TEST_CASE("reports round-trip through JSON") {
  auto g = io::read_matrix_file(kData / "directed3.txt");
  cli::AnalysisOptions opts;
  opts.theta = std::vector<double>{0.25, 0.25, 0.5};
  opts.lipschitz = 1.0;
  auto r = cli::cmd_analyze(g, opts);
  CHECK(parse_report(dump_report(r)) == r);

  auto g2 = io::read_matrix_file(kData / "layer2.txt");
  auto c = cli::cmd_combine(g, g2, opts);
  CHECK(parse_report(dump_report(c)) == c);

  auto k = cli::cmd_control({g, g2}, {{1, 0, 0}}, opts);
  CHECK(parse_report(dump_report(k)) == k);

  auto cfg = parse_run_config(two_layer_config(R"({"integrator": {"t_end": 0.5}})"), kData);
  auto sim = cli::cmd_simulate(cfg);
  CHECK(parse_report(dump_report(sim.report)) == sim.report);
}

TEST_CASE("hypothesis flags are recomputable") {
  auto h = make_hypothesis("x", 1.0, "<", 2.0);
  CHECK(h.holds);
  CHECK(h.recompute());
  AnalysisReport r;
  r.command = "analyze";
  h.holds = false;
  r.hypotheses.push_back(h);
  CHECK_THROWS_AS(check_report_consistency(r), Error);
  r.hypotheses.clear();
  r.critical_c = INFINITY;
  CHECK_THROWS_AS(check_report_consistency(r), Error);
}

}  // TEST_SUITE

TEST_SUITE("config") {

TEST_CASE("schema_version is mandatory") {
  CHECK_THROWS_AS((void)parse_run_config(R"({"layers": [{"matrix": [[0]]}]})", kData), Error);
  CHECK_THROWS_AS(
      (void)parse_run_config(R"({"schema_version": 2, "layers": [{"matrix": [[0]]}]})", kData),
      Error);
}

TEST_CASE("matrix paths resolve relative to the config file") {
  auto cfg = load_run_config(kData / "two_layer_lorenz.json");
  REQUIRE(cfg.layers.size() == 2);
  CHECK(cfg.layers[0].matrix == DenseMatrix::from_rows(oracle::directed3()));
  CHECK(cfg.layers[0].gamma == std::vector<double>{1, 2, 1});
  CHECK(cfg.seed == 1);
  CHECK(cfg.integrator.record_every == 10);
}

TEST_CASE("inline matrices, adaptive coupling and pinning") {
  auto cfg = parse_run_config(R"({
    "schema_version": 1,
    "layers": [{"matrix": [[-3, 1, 2], [2, -4, 2], [1, 1, -2]]}],
    "coupling": {"mode": "adaptive", "beta": 2.0, "c0": 0.5},
    "pinning": {"gains": [4.0], "target_init": [1, 2, 3]},
    "theta": "auto"
  })", kData);
  auto spec = build_network(cfg);
  CHECK(std::get<AdaptiveCoupling>(spec.coupling).beta == 2.0);
  REQUIRE(spec.pinning.has_value());
  CHECK(spec.pinning->gains[0] == std::vector<double>{4, 0, 0});
  CHECK(spec.pinning->target_init == std::vector<double>{1, 2, 3});
  auto th = resolve_theta(cfg, spec);
  CHECK(th.source == "nlevec");
  CHECK(oracle::max_abs_diff(th.theta.values(), {0.3, 0.2, 0.5}) < 1e-12);
}

TEST_CASE("explicit theta is normalized") {
  auto cfg = parse_run_config(two_layer_config(R"({"theta": [1, 1, 2]})"), kData);
  auto th = resolve_theta(cfg, build_network(cfg));
  CHECK(th.source == "explicit");
  CHECK(th.theta.values() == std::vector<double>{0.25, 0.25, 0.5});
}

TEST_CASE("auto theta needs a nonempty interval for the two-layer Lorenz pair") {
  auto cfg = parse_run_config(two_layer_config(R"({"theta": "auto"})"), kData);
  CHECK_THROWS_AS((void)resolve_theta(cfg, build_network(cfg)), Error);
}

TEST_CASE("initial states come from the seeded stream") {
  auto cfg = load_run_config(kData / "two_layer_lorenz.json");
  CHECK(initial_states(cfg, 4) == random_initial_states(4, 3, 3));
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("analyze reports the directed three-node values") {
  auto r = cli::cmd_analyze(io::read_matrix_file(kData / "directed3.txt"), {});
  REQUIRE(r.layers.size() == 1);
  CHECK(oracle::max_abs_diff(r.layers[0].nlevec, {0.3, 0.2, 0.5}) < 1e-9);
  CHECK(std::abs(r.layers[0].lambda2_xi - (-1.1768)) < 5e-4);
  CHECK(std::abs(r.layers[0].adsb - 0.0566) < 5e-4);

  cli::AnalysisOptions good;
  good.theta = std::vector<double>{0.25, 0.25, 0.5};
  auto rg = cli::cmd_analyze(io::read_matrix_file(kData / "directed3.txt"), good);
  CHECK(rg.layers[0].admissible == true);
  CHECK(std::abs(*rg.layers[0].lambda2_theta - (-1.2096)) < 5e-4);

  cli::AnalysisOptions bad;
  bad.theta = std::vector<double>{0.0025, 0.52, 0.4775};
  auto rb = cli::cmd_analyze(io::read_matrix_file(kData / "directed3.txt"), bad);
  CHECK(rb.layers[0].admissible == false);
  CHECK(std::abs(*rb.layers[0].lambda2_theta - 0.004) < 5e-4);
}

TEST_CASE("combine explains an empty interval") {
  auto r = cli::cmd_combine(io::read_matrix_file(kData / "layer1.txt"),
                            io::read_matrix_file(kData / "layer2.txt"), {});
  REQUIRE(r.interval.has_value());
  CHECK(r.interval->empty);
  CHECK(std::abs(*r.chebyshev_gap - 0.1667) < 1e-4);
  bool explained = false;
  for (const auto& n : r.notes) explained |= n.find("empty") != std::string::npos;
  CHECK(explained);
}

TEST_CASE("combine of identical matrices gives the full interval") {
  auto g = io::read_matrix_file(kData / "directed3.txt");
  auto r = cli::cmd_combine(g, g, {});
  REQUIRE(r.interval.has_value());
  CHECK_FALSE(r.interval->empty);
  CHECK(*r.interval->lower == 0.0);
  CHECK(*r.interval->upper == 1.0);
  REQUIRE(r.theta.has_value());
  CHECK(oracle::max_abs_diff(*r.theta, {0.3, 0.2, 0.5}) < 1e-12);
}

TEST_CASE("combine of a close pair is clipped to the unit interval") {
  auto g1 = io::read_matrix_file(kData / "directed3.txt");
  DenseMatrix g2 = g1;
  g2(0, 1) += 0.01;
  g2(0, 0) -= 0.01;
  auto r = cli::cmd_combine(g1, g2, {});
  REQUIRE(r.interval.has_value());
  CHECK_FALSE(r.interval->empty);
  CHECK(*r.interval->lower == 0.0);
  CHECK(*r.interval->upper == 1.0);
}

TEST_CASE("control reports the pinned bounds") {
  auto g = io::read_matrix_file(kData / "directed3.txt");
  auto r = cli::cmd_control({g}, {{1, 0, 0}}, {});
  REQUIRE(r.layers[0].lambda_max_control_xi.has_value());
  CHECK(*r.layers[0].lambda_max_control_xi < 0.0);

  auto g2 = io::read_matrix_file(kData / "layer2.txt");
  auto same = cli::cmd_control({g2, g2}, {{1, 0, 0}}, {});
  REQUIRE(same.interval.has_value());
  CHECK(same.interval->kind == "nu");
  CHECK(*same.interval->lower == 0.0);
  CHECK(*same.interval->upper == 1.0);

  auto pair = cli::cmd_control({g, g2}, {{2, 0, 0}, {2, 0, 0}}, {});
  CHECK(pair.layers[0].adcb.has_value());
  CHECK(pair.layers[1].adcb.has_value());
  CHECK(pair.interval.has_value());
}

TEST_CASE("check runs a simplex search without theta") {
  auto g = io::read_matrix_file(kData / "directed3.txt");
  auto r = cli::cmd_check({g, g, g}, {}, 10);
  REQUIRE(r.theta.has_value());
  CHECK(oracle::max_abs_diff(*r.theta, {0.3, 0.2, 0.5}) < 1e-12);
}

TEST_CASE("exit codes") {
  CHECK(run_cli({"analyze", (kData / "directed3.txt").string()}).code == 0);
  auto not_metzler = write_scratch("not_metzler.txt", "1 -1\n1 -1\n");
  CHECK(run_cli({"analyze", not_metzler.string()}).code == 2);
  auto row_sum = write_scratch("row_sum.txt", "-1 2\n1 -2\n");
  auto rs = run_cli({"analyze", row_sum.string()});
  CHECK(rs.code == 2);
  CHECK(rs.err.find("RowSumNonZero") != std::string::npos);
  auto disconnected = write_scratch("disconnected.txt", "-1 1\n0 0\n");
  CHECK(run_cli({"analyze", disconnected.string()}).code == 3);
  CHECK(run_cli({"control", (kData / "directed3.txt").string(), "--gains", "0,0,0"}).code == 2);
  CHECK(run_cli({"analyze", (kScratch / "missing.txt").string()}).code == 2);
  CHECK(run_cli({"bogus"}).code == 2);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("simulate writes csv and report with the documented row count") {
  auto cfg_path = write_scratch("sim.json", two_layer_config(R"({"integrator": {"t_end": 2.0, "record_every": 7}})"));
  const auto prefix = scratch("sim_out");
  auto r = run_cli({"simulate", cfg_path.string(), "--out", prefix.string()});
  REQUIRE(r.code == 0);
  const std::string csv = io::read_text_file(prefix.string() + ".csv");
  // header + floor(t_end / (dt * record_every)) + 1 rows
  CHECK(count_lines(csv) == 1 + (2000 / 7) + 1);
  auto report = parse_report(io::read_text_file(prefix.string() + ".report.json"));
  REQUIRE(report.simulation.has_value());
  CHECK(report.simulation->rows == 2000 / 7 + 1);
}

TEST_CASE("simulate reports divergence with exit code 4") {
  auto cfg_path = write_scratch("diverge.json", R"({
    "schema_version": 1,
    "layers": [{"matrix": [[-1, 1], [1, -1]]}],
    "model": {"kind": "linear_test", "params": {"A": [[50]]}},
    "init": [[5], [4]],
    "integrator": {"dt": 0.001, "t_end": 2.0, "record_every": 1}
  })");
  auto r = run_cli({"simulate", cfg_path.string(), "--out", scratch("diverge_out").string()});
  CHECK(r.code == 4);
  auto report = parse_report(io::read_text_file(scratch("diverge_out").string() + ".report.json"));
  CHECK(report.simulation->diverged_at.has_value());
}

TEST_CASE("simulate with identical initial states keeps V at zero") {
  auto cfg_path = write_scratch("same.json", two_layer_config(
      R"({"init": [[1, 2, 3], [1, 2, 3], [1, 2, 3]], "integrator": {"t_end": 2.0}})"));
  auto r = run_cli({"simulate", cfg_path.string(), "--out", scratch("same_out").string()});
  REQUIRE(r.code == 0);
  std::istringstream csv(io::read_text_file(scratch("same_out").string() + ".csv"));
  std::string line;
  std::getline(csv, line);
  const std::size_t v_col = 10;  // t, 9 state columns, then V
  while (std::getline(csv, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 12);
    CHECK(std::stod(cells[v_col]) <= 1e-20);
  }
}

TEST_CASE("adaptive simulate has a nondecreasing c column") {
  auto cfg = parse_run_config(
      two_layer_config(R"({"coupling": {"mode": "adaptive", "beta": 1.0, "c0": 0.0}, "integrator": {"t_end": 3.0}})"),
      kData);
  auto run = cli::cmd_simulate(cfg);
  REQUIRE(run.trajectory.has_value());
  const auto& c = run.trajectory->coupling;
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i] >= c[i - 1]);
}

TEST_CASE("repeated simulate runs give identical bytes") {
  auto cfg_path = write_scratch("det.json", two_layer_config(R"({"integrator": {"t_end": 1.0}})"));
  REQUIRE(run_cli({"simulate", cfg_path.string(), "--out", scratch("det_a").string()}).code == 0);
  REQUIRE(run_cli({"simulate", cfg_path.string(), "--out", scratch("det_b").string()}).code == 0);
  CHECK(io::read_text_file(scratch("det_a").string() + ".csv") ==
        io::read_text_file(scratch("det_b").string() + ".csv"));
}

TEST_CASE("conjecture sweep") {
  auto cfg = parse_run_config(two_layer_config(R"({"integrator": {"t_end": 2.0}})"), kData);
  auto rows = cli::cmd_conjecture(cfg, 3, 2);
  REQUIRE(rows.size() == 9);
  CHECK(rows[0].scenario == "layer1");
  CHECK(rows[1].scenario == "layer2");
  CHECK(rows[2].scenario == "both");
  CHECK(rows[3].seed == cfg.seed + 1);
  for (const auto& r : rows) CHECK(r.status == "ok");
  // Worker count does not change the table.
  CHECK(cli::conjecture_csv(cli::cmd_conjecture(cfg, 3, 1)) == cli::conjecture_csv(rows));

  auto empty = cli::conjecture_csv(cli::cmd_conjecture(cfg, 0, 2));
  CHECK(empty == "trial,seed,scenario,status,V_end,time_to_threshold,theta_source,detail\n");
}

TEST_CASE("conjecture isolates a disconnected layer") {
  auto cfg = parse_run_config(two_layer_config(
      R"({"layers": [{"matrix": [[-3, 1, 2], [2, -4, 2], [1, 1, -2]], "gamma": [1, 2, 1]},
                     {"matrix": [[-1, 1, 0], [0, 0, 0], [0, 1, -1]]}],
          "integrator": {"t_end": 1.0}})"),
      kData);
  auto rows = cli::cmd_conjecture(cfg, 2, 2);
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 0; i < rows.size(); i += 3) {
    CHECK(rows[i].status == "ok");
    CHECK(rows[i + 1].status == "error");
    CHECK(rows[i + 2].status == "error");
    CHECK(rows[i + 1].detail.find("NotStronglyConnected") != std::string::npos);
  }
}

}  // TEST_SUITE
