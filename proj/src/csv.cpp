#include "qvdp/csv.hpp"

#include <charconv>
#include <cmath>

#include "qvdp/error.hpp"

namespace qvdp::csv {

std::string format(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

Writer::Writer(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error(Errc::io, "cannot open " + path.string() + " for writing");
  row(header);
}

void Writer::row(std::initializer_list<double> values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (const double v : values) cells.push_back(format(v));
  row(cells);
}

void Writer::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) {
    throw Error(Errc::io, path_.string() + ": row has " + std::to_string(cells.size()) +
                              " cells, header has " + std::to_string(columns_));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
  if (!out_) throw Error(Errc::io, "write failed: " + path_.string());
}

void Writer::comment_line(const std::string& line) { out_ << line << '\n'; }

void write_spectrum(const std::filesystem::path& path, const SpectrumResult& spec) {
  Writer w(path, kSpectrumHeader);
  for (const cplx l : spec.eigenvalues) w.row({l.real(), l.imag()});
}

void write_evolve(const std::filesystem::path& path, const EvolutionRecord& rec) {
  Writer w(path, kEvolveHeader);
  const double nan = std::nan("");
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    const double q = i < rec.q_max.size() ? rec.q_max[i] : nan;
    w.row({rec.times[i], rec.n_photon[i], rec.n_rescaled[i], rec.var_n[i], rec.purity[i], q,
           rec.trace_err[i]});
  }
}

void write_husimi(const std::filesystem::path& path, const QGrid& grid) {
  Writer w(path, kHusimiHeader);
  for (std::size_t i = 0; i < grid.re_axis.size(); ++i) {
    for (std::size_t j = 0; j < grid.im_axis.size(); ++j) {
      w.row({grid.re_axis[i], grid.im_axis[j],
             grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
    }
  }
}

void write_trajectory(const std::filesystem::path& path, const std::vector<ClassicalState>& traj) {
  Writer w(path, kTrajectoryHeader);
  for (const auto& s : traj) w.row({s.t, s.alpha.real(), s.alpha.imag()});
}

void write_ensemble(const std::filesystem::path& path, const ClassicalEnsemble& ensemble) {
  Writer w(path, kEnsembleHeader);
  for (const cplx a : ensemble.samples_t) w.row({a.real(), a.imag()});
}

void write_phase_map(const std::filesystem::path& path, const PhaseMap& map) {
  Writer w(path, kPhaseMapHeader);
  for (std::size_t i = 0; i < map.re0.size(); ++i) {
    for (std::size_t j = 0; j < map.im0.size(); ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      w.row({map.re0[i], map.im0[j], map.phase(ii, jj), static_cast<double>(map.singular(ii, jj))});
    }
  }
}

void write_cycle(const std::filesystem::path& path, const LimitCycle& cycle) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  {
    std::ofstream head(path, std::ios::binary | std::ios::trunc);
    if (!head) throw Error(Errc::io, "cannot open " + path.string());
    head << "period=" << format(cycle.period) << ",freq=" << format(cycle.freq) << '\n';
    head << "re,im\n";
    for (const auto& s : cycle.points) {
      head << format(s.alpha.real()) << ',' << format(s.alpha.imag()) << '\n';
    }
  }
}

void write_distribution(const std::filesystem::path& path, const std::vector<double>& p) {
  Writer w(path, kDistributionHeader);
  for (std::size_t n = 0; n < p.size(); ++n) w.row({static_cast<double>(n), p[n]});
}

}  // namespace qvdp::csv
