#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qvdp/fock.hpp"

namespace qvdp {

enum class Task { gaps, steady, evolve, classical };

std::string_view task_name(Task t);

/// One (eta, eps) point of a sweep. `params.dim` is already resolved.
struct SweepPoint {
  SystemParams params;
  double eps_scaled = 0.0;
};

/// Resolved run configuration. eta and the drive are lists; every
/// combination is a sweep point. Exactly one of eps / eps_scaled is set.
struct RunConfig {
  double delta = 10.0;
  double kappa = 0.1;
  double gain = 1.0;
  std::vector<double> eta{0.05};
  std::vector<double> eps;         // raw drive amplitudes
  std::vector<double> eps_scaled;  // eps * sqrt(eta)
  int dim = 0;                     // 0: default heuristic per point
  double t_end = 40.0;
  double rtol = 1e-8;
  double atol = 1e-10;
  std::uint64_t seed = 1;
  int n_traj = 10000;
  int grid_n = 201;
  double grid_radius = 0.0;  // 0: automatic
  int workers = 1;
  std::vector<Task> tasks{Task::gaps};

  /// Errc::config with a message starting with the offending key.
  void validate() const;

  /// Sorted by (eta, eps_scaled).
  std::vector<SweepPoint> points() const;

  nlohmann::json to_json() const;
};

/// Flat `key = value` lines ('#' starts a comment) or, when the first
/// non-blank character is '{', the equivalent JSON object. List-valued keys
/// (eta, eps, eps_scaled, tasks) take comma lists or `start:stop:step`.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// "0.5,1,2" or "0:8:0.5" (inclusive of stop within half a step).
std::vector<double> parse_real_list(std::string_view key, std::string_view text);

}  // namespace qvdp
