#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "qvdp/classical.hpp"
#include "qvdp/dynamics.hpp"
#include "qvdp/husimi.hpp"
#include "qvdp/spectrum.hpp"
#include "qvdp/steady.hpp"

namespace qvdp::csv {

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite.
std::string format(double value);

/// UTF-8, '.' decimal separator, '\n' line ends, fixed header row.
class Writer {
 public:
  Writer(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(std::initializer_list<double> values);
  void row(const std::vector<std::string>& cells);
  void comment_line(const std::string& line);  // written verbatim

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t columns_;
};

inline const std::vector<std::string> kSpectrumHeader{"re", "im"};
inline const std::vector<std::string> kGapsHeader{
    "eta", "eps_scaled", "gap1", "gap2", "osc_freq", "metastability_ratio", "partial_flag"};
inline const std::vector<std::string> kEvolveHeader{
    "t", "n_photon", "n_rescaled", "var_n", "purity", "q_max", "trace_err"};
inline const std::vector<std::string> kHusimiHeader{"re_alpha", "im_alpha", "q"};
inline const std::vector<std::string> kTrajectoryHeader{"t", "re", "im"};
inline const std::vector<std::string> kEnsembleHeader{"re", "im"};
inline const std::vector<std::string> kPhaseMapHeader{"re0", "im0", "phase", "singular_flag"};
inline const std::vector<std::string> kCycleHeader{"re", "im"};
inline const std::vector<std::string> kSteadyHeader{
    "eta", "eps_scaled", "dim", "n_photon", "var_n", "purity", "fluct_eta_sigma",
    "fluct_eta2_var", "residual", "q_max", "q_argmax_re", "q_argmax_im"};
inline const std::vector<std::string> kDistributionHeader{"n", "p"};
inline const std::vector<std::string> kClassicalHeader{
    "eta", "eps_scaled", "hopf_threshold", "limit_cycle", "period", "freq", "fixed_re",
    "fixed_im", "fixed_stable"};

void write_spectrum(const std::filesystem::path& path, const SpectrumResult& spec);
void write_evolve(const std::filesystem::path& path, const EvolutionRecord& rec);
void write_husimi(const std::filesystem::path& path, const QGrid& grid);
void write_trajectory(const std::filesystem::path& path, const std::vector<ClassicalState>& traj);
void write_ensemble(const std::filesystem::path& path, const ClassicalEnsemble& ensemble);
void write_phase_map(const std::filesystem::path& path, const PhaseMap& map);
/// First line "period=<T>,freq=<f>", then the re,im header and one period.
void write_cycle(const std::filesystem::path& path, const LimitCycle& cycle);
void write_distribution(const std::filesystem::path& path, const std::vector<double>& p);

}  // namespace qvdp::csv
