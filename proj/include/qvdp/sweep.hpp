#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qvdp/config.hpp"
#include "qvdp/spectrum.hpp"
#include "qvdp/steady.hpp"

namespace qvdp {

inline constexpr int kCsvSchemaVersion = 1;

std::string_view library_version();

struct SweepOptions {
  std::filesystem::path out_dir = "out";
  int dense_limit = 40;  // full dense spectrum up to this Fock dimension
  int rightmost_k = 12;  // otherwise this many rightmost eigenvalues
  double evolve_dt = 0.01;
  int evolve_q_grid = 41;
};

struct GapsRow {
  double gap1 = 0.0;
  double gap2 = 0.0;
  double osc_freq = 0.0;
  double metastability_ratio = 0.0;  // nan when undefined
  bool partial = false;
};

struct SteadyRow {
  SteadyObservables obs;
  double residual = 0.0;
  double q_max = 0.0;
  cplx q_argmax;
  std::optional<int> suggested_dim;
};

struct ClassicalRow {
  double hopf_threshold = 0.0;  // nan below the gain threshold
  bool limit_cycle = false;
  double period = 0.0;  // nan without a cycle
  double freq = 0.0;
  cplx fixed_point;
  bool fixed_stable = false;
};

struct PointResult {
  SweepPoint point;
  bool ok = true;
  std::string error;
  double wall_seconds = 0.0;
  std::optional<GapsRow> gaps;
  std::optional<SteadyRow> steady;
  std::optional<ClassicalRow> classical;
  std::vector<std::string> files;  // relative to the output directory
};

struct SweepReport {
  std::vector<PointResult> points;  // sorted by (eta, eps_scaled)
  double wall_seconds = 0.0;
  bool all_ok() const;
};

/// Directory name of one point, e.g. "eta_0.05__es_2".
std::string point_tag(const SweepPoint& pt);

/// Runs every task at every point on config.workers threads. Per-point
/// files go under out_dir/points/<tag>/; the merged gaps.csv, steady.csv
/// and classical.csv plus manifest.json go to out_dir. A failing point is
/// recorded and skipped; it never aborts the sweep.
SweepReport run_sweep(const RunConfig& config, const SweepOptions& opts);

/// Loads, validates and runs a config file. Returns 0 only when every point
/// succeeded.
int run_config(const std::filesystem::path& config_path, const SweepOptions& opts);

}  // namespace qvdp
