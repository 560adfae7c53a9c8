#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qvdp/config.hpp"
#include "qvdp/csv.hpp"
#include "qvdp/error.hpp"
#include "qvdp/spectrum.hpp"
#include "qvdp/sweep.hpp"
#include "support.hpp"

using namespace qvdp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("qvdp_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::config);
    return e.what();
  }
  FAIL("config was accepted");
  return {};
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(csv::format(0.1) == "0.1");
  CHECK(csv::format(-0.0) == "0");
  CHECK(csv::format(1e-300) == "1e-300");
  CHECK(csv::format(std::nan("")) == "nan");
  CHECK(std::stod(csv::format(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("key=value and JSON configs agree") {
  const RunConfig a = parse_config(
      "# minimal\n"
      "delta = 10\nkappa=0.1\n gain = 1\n"
      "eta = 0.02, 0.05\n"
      "eps_scaled = 0:2:0.5\n"
      "seed = 9\ntasks = gaps, steady\n");
  const RunConfig b = parse_config(
      R"({"delta": 10, "kappa": 0.1, "gain": 1, "eta": [0.02, 0.05],
          "eps_scaled": "0:2:0.5", "seed": 9, "tasks": ["gaps", "steady"]})");
  CHECK(a.to_json() == b.to_json());
  CHECK(a.eps_scaled.size() == 5);
  CHECK(a.points().size() == 10);
  CHECK(a.tasks.size() == 2);
  const auto pts = a.points();
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const bool ordered = pts[i - 1].params.eta < pts[i].params.eta ||
                         (pts[i - 1].params.eta == pts[i].params.eta &&
                          pts[i - 1].eps_scaled < pts[i].eps_scaled);
    CHECK(ordered);
  }
}

TEST_CASE("inclusive ranges") {
  CHECK(parse_real_list("x", "0:8:0.5").size() == 17);
  CHECK(parse_real_list("x", "0:8:0.5").back() == 8.0);
  CHECK(parse_real_list("x", "1, 2,3").size() == 3);
}

TEST_CASE("validation errors name the key") {
  CHECK(config_error("kappa = -1\neps_scaled = 1\n").rfind("config error: kappa", 0) == 0);
  CHECK(config_error("eps = 1\neps_scaled = 1\n").find("eps") != std::string::npos);
  CHECK(config_error("eps_scaled = 1\nbogus = 3\n").find("bogus") != std::string::npos);
  CHECK(config_error("eps_scaled = 1\neta = 0\n").find("eta") != std::string::npos);
  CHECK(config_error("eps_scaled = 1\nworkers = 0\n").find("workers") != std::string::npos);
  CHECK(config_error("eps_scaled = 1\ntasks = plot\n").find("tasks") != std::string::npos);
  CHECK(config_error("eps_scaled = 1\ndim = 1\n").find("dim") != std::string::npos);
  CHECK(config_error("eps_scaled = 1\nrtol = x\n").find("rtol") != std::string::npos);
  CHECK(config_error("eps_scaled = 1\neps_scaled = 2\n").find("eps_scaled") != std::string::npos);
  CHECK(config_error(R"({"eps_scaled": 1, "gain": -2})").find("gain") != std::string::npos);
}

TEST_CASE("raw drive values") {
  const RunConfig c = parse_config("eta = 0.04\neps = 10\n");
  const auto pts = c.points();
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].eps_scaled == doctest::Approx(2.0));
  CHECK(pts[0].params.eps == cplx(10.0, 0.0));
}

TEST_CASE("minimal gaps run") {
  const fs::path dir = scratch_dir("minimal");
  fs::path cfg = dir / "run.cfg";
  std::ofstream(cfg) << "eta = 0.1\neps_scaled = 2\ntasks = gaps\n";
  SweepOptions opts;
  opts.out_dir = dir / "out";
  CHECK(run_config(cfg, opts) == 0);

  std::ifstream in(opts.out_dir / "gaps.csv");
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "eta,eps_scaled,gap1,gap2,osc_freq,metastability_ratio,partial_flag");
  CHECK_FALSE(static_cast<bool>(std::getline(in, extra)));
  std::vector<double> cells;
  std::stringstream ss(row);
  for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(std::stod(cell));
  REQUIRE(cells.size() == 7);
  CHECK(cells[2] > 0.0);
  const SpectrumResult oracle = full_spectrum(build_superoperator(testing::paper_rates(0.1, 2.0)));
  CHECK(cells[2] == doctest::Approx(oracle.gap1).epsilon(1e-10));
  CHECK(cells[6] == 0.0);

  const auto manifest = nlohmann::json::parse(slurp(opts.out_dir / "manifest.json"));
  CHECK(manifest["schema_version"] == kCsvSchemaVersion);
  CHECK(manifest["all_ok"] == true);
  CHECK(manifest["points"].size() == 1);
  CHECK(manifest["config"]["eta"][0] == 0.1);
}

TEST_CASE("sweeps are byte-identical across reruns and worker counts") {
  const fs::path dir = scratch_dir("determinism");
  testing::WarningCapture quiet;  // dim 12 is deliberately small
  const std::string text =
      "eta = 0.2, 0.3\neps_scaled = 1, 3\ndim = 12\nt_end = 2\nn_traj = 50\ngrid_n = 11\n"
      "seed = 5\ntasks = gaps, steady, evolve, classical\n";
  RunConfig serial = parse_config(text);
  RunConfig threaded = parse_config(text + "workers = 3\n");
  SweepOptions a, b, c;
  a.out_dir = dir / "a";
  b.out_dir = dir / "b";
  c.out_dir = dir / "c";
  a.evolve_q_grid = b.evolve_q_grid = c.evolve_q_grid = 11;
  CHECK(run_sweep(serial, a).all_ok());
  CHECK(run_sweep(serial, b).all_ok());
  CHECK(run_sweep(threaded, c).all_ok());
  int compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a.out_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    const fs::path rel = fs::relative(entry.path(), a.out_dir);
    const std::string first = slurp(entry.path());
    CHECK(first == slurp(b.out_dir / rel));
    CHECK(first == slurp(c.out_dir / rel));
    ++compared;
  }
  // 3 merged files plus 7 per point
  CHECK(compared == 3 + 4 * 7);
}

TEST_CASE("a failing point is recorded without aborting the sweep") {
  const fs::path dir = scratch_dir("failure");
  // Pure two-photon loss keeps |0> and |1> dark, so the steady state is
  // not unique at the second point.
  const RunConfig c = parse_config(
      "delta = 0\nkappa = 0\ngain = 0\neta = 0.2\neps_scaled = 0, 1\ndim = 10\ngrid_n = 11\n"
      "tasks = steady\n");
  SweepOptions o;
  o.out_dir = dir;
  testing::WarningCapture cap;
  const SweepReport r = run_sweep(c, o);
  REQUIRE(r.points.size() == 2);
  CHECK_FALSE(r.all_ok());
  CHECK_FALSE(r.points[0].ok);
  CHECK(r.points[0].error.find("steady") != std::string::npos);
  CHECK(r.points[1].ok);
  CHECK(cap.messages.size() >= 1);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["all_ok"] == false);
  CHECK(manifest["points"][0]["ok"] == false);
  CHECK(manifest["points"][1]["ok"] == true);
  std::ifstream merged(dir / "steady.csv");
  int lines = 0;
  for (std::string line; std::getline(merged, line);) ++lines;
  CHECK(lines == 2);
}
