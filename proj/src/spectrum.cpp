#include "qvdp/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <lapacke.h>

#include "qvdp/arnoldi.hpp"
#include "qvdp/error.hpp"

namespace qvdp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void sort_descending_real(std::vector<cplx>& values) {
  std::sort(values.begin(), values.end(), [](cplx l, cplx r) {
    if (l.real() != r.real()) return l.real() > r.real();
    return l.imag() > r.imag();
  });
}

std::vector<cplx> dense_eigenvalues(CMatrix m) {
  const lapack_int n = static_cast<lapack_int>(m.rows());
  std::vector<lapack_complex_double> w(n);
  lapack_complex_double dummy[1];
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, reinterpret_cast<lapack_complex_double*>(m.data()),
                    n, w.data(), dummy, 1, dummy, 1);
  if (info != 0) {
    throw Error(Errc::no_convergence, "zgeev failed with info=" + std::to_string(info));
  }
  std::vector<cplx> out(n);
  for (lapack_int i = 0; i < n; ++i) out[i] = reinterpret_cast<const cplx&>(w[i]);
  return out;
}

}  // namespace

double resolve_tol_imag(const SpectrumOptions& opts, const SystemParams& p) {
  return opts.tol_imag >= 0.0 ? opts.tol_imag : 1e-6 * std::max(1.0, std::abs(p.delta));
}

SpectrumResult analyze_spectrum(std::vector<cplx> eigenvalues, double tol_imag, double tol_zero,
                                bool partial) {
  SpectrumResult s;
  sort_descending_real(eigenvalues);
  s.eigenvalues = std::move(eigenvalues);
  s.tol_imag = tol_imag;
  s.tol_zero = tol_zero;
  s.partial = partial;
  s.gap1 = kNaN;
  s.gap2 = kNaN;
  s.osc_freq = kNaN;
  for (const cplx l : s.eigenvalues) {
    if (std::abs(l) < tol_zero) {
      ++s.null_count;
      continue;
    }
    if (std::abs(l.imag()) > tol_imag) {
      if (std::isnan(s.gap1)) {
        s.gap1 = std::max(0.0, -l.real());
        s.osc_freq = std::abs(l.imag());
      }
    } else if (std::isnan(s.gap2)) {
      s.gap2 = std::max(0.0, -l.real());
    }
  }
  try {
    s.metastability_ratio = metastability_ratio(s);
  } catch (const Error&) {
    s.metastability_ratio.reset();
  }
  return s;
}

double metastability_ratio(const SpectrumResult& spec) {
  std::vector<double> re;
  for (const cplx l : spec.eigenvalues) {
    if (std::abs(l) >= spec.tol_zero) re.push_back(l.real());
  }
  if (re.size() < 3) {
    throw Error(Errc::insufficient_data, "metastability ratio needs >= 3 non-null eigenvalues");
  }
  std::sort(re.begin(), re.end(), std::greater<>());
  double best = 1.0;
  for (std::size_t i = 0; i + 1 < re.size(); ++i) {
    const double num = -re[i + 1];
    const double den = -re[i];
    if (den <= 0.0) continue;
    best = std::max(best, num / den);
  }
  return best;
}

SpectrumResult full_spectrum(const Superoperator& l, const SpectrumOptions& opts) {
  auto values = dense_eigenvalues(l.to_dense());
  return analyze_spectrum(std::move(values), resolve_tol_imag(opts, l.params()), opts.tol_zero,
                          false);
}

std::vector<cplx> sector_spectrum(const SystemParams& p) {
  std::vector<cplx> all;
  all.reserve(static_cast<std::size_t>(p.dim) * p.dim);
  for (const auto& block : sector_blocks(p)) {
    const auto values = dense_eigenvalues(block.matrix);
    all.insert(all.end(), values.begin(), values.end());
  }
  return all;
}

namespace {

// Eigenvalues within the disk of the `nev` nearest to `sigma`.
struct ShiftSolve {
  double y = 0.0;
  double radius = 0.0;
  std::vector<cplx> values;
};

ShiftSolve solve_at_shift(const SparseCMatrix& a, cplx sigma, int nev, double tol,
                          std::uint64_t seed) {
  const Eigen::Index n = a.rows();
  SparseCMatrix shifted = a;
  SparseCMatrix id(n, n);
  id.setIdentity();
  shifted -= sigma * id;
  shifted.makeCompressed();
  Eigen::SparseLU<SparseCMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) {
    std::ostringstream os;
    os << "sparse LU failed at shift " << sigma.real() << "+" << sigma.imag() << "i";
    throw Error(Errc::no_convergence, os.str());
  }
  LinearMap op = [&lu](const CVector& x, CVector& out) { out = lu.solve(x); };
  ArnoldiOptions ao;
  ao.nev = nev;
  ao.tol = tol;
  ao.seed = seed;
  const auto res = arnoldi_largest_magnitude(op, n, ao);
  if (!res.converged) {
    std::ostringstream os;
    os << "shift-invert Arnoldi did not converge at shift " << sigma.real() << "+"
       << sigma.imag() << "i; residuals:";
    for (const auto& pr : res.pairs) os << ' ' << pr.residual / std::abs(pr.theta);
    throw Error(Errc::no_convergence, os.str());
  }
  ShiftSolve out;
  out.y = sigma.imag();
  for (const auto& pr : res.pairs) {
    const cplx lambda = sigma + 1.0 / pr.theta;
    out.values.push_back(lambda);
    out.radius = std::max(out.radius, std::abs(lambda - sigma));
  }
  // The nev-th nearest eigenvalue lies on the boundary; everything strictly
  // inside has been found.
  return out;
}

double gershgorin_imag_bound(const SparseCMatrix& a) {
  std::vector<double> radius(a.rows(), 0.0);
  std::vector<double> center_im(a.rows(), 0.0);
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseCMatrix::InnerIterator it(a, k); it; ++it) {
      if (it.row() == it.col()) {
        center_im[it.row()] = it.value().imag();
      } else {
        radius[it.row()] += std::abs(it.value());
      }
    }
  }
  double bound = 0.0;
  for (std::size_t i = 0; i < radius.size(); ++i) {
    bound = std::max(bound, std::abs(center_im[i]) + radius[i]);
  }
  return bound;
}

}  // namespace

SpectrumResult rightmost_eigenvalues(const Superoperator& l, int k, const RightmostOptions& opts) {
  if (k < 1) throw Error(Errc::invalid_parameter, "rightmost_eigenvalues needs k >= 1");
  const double tol_imag = resolve_tol_imag(opts.spectrum, l.params());
  const Eigen::Index n = l.size();
  if (k >= n) {
    auto full = full_spectrum(l, opts.spectrum);
    full.partial = false;
    return full;
  }

  const SparseCMatrix& a = l.matrix();
  const double s0 = opts.shift_real;
  const double im_max = gershgorin_imag_bound(a);

  std::vector<cplx> found;
  auto add_found = [&](cplx lambda) {
    auto insert = [&](cplx v) {
      for (const cplx f : found) {
        if (std::abs(f - v) <= 1e-8 * std::max(1.0, std::abs(v))) return;
      }
      found.push_back(v);
    };
    insert(lambda);
    if (std::abs(lambda.imag()) > 1e-8 * std::max(1.0, std::abs(lambda))) insert(std::conj(lambda));
  };
  auto kth_real = [&]() {
    if (static_cast<int>(found.size()) < k) return -std::numeric_limits<double>::infinity();
    std::vector<double> re;
    re.reserve(found.size());
    for (const cplx f : found) re.push_back(f.real());
    std::nth_element(re.begin(), re.begin() + (k - 1), re.end(), std::greater<>());
    return re[k - 1];
  };

  std::vector<ShiftSolve> disks;
  // Returns the top of the covered interval [0, top] of the imaginary axis.
  auto covered_top = [&](double depth) {
    std::vector<std::pair<double, double>> intervals;
    for (const auto& d : disks) {
      if (d.radius <= depth) continue;
      const double h = std::sqrt(d.radius * d.radius - depth * depth);
      intervals.emplace_back(d.y - h, d.y + h);
    }
    std::sort(intervals.begin(), intervals.end());
    double top = 0.0;
    bool started = false;
    for (const auto& [lo, hi] : intervals) {
      if (lo > top) break;
      if (lo <= 0.0) started = true;
      if (started) top = std::max(top, hi);
    }
    return started ? top : -1.0;
  };

  int nev = opts.nev_initial > 0 ? opts.nev_initial : k + 6;
  double y = 0.0;
  double last_top = -2.0;
  for (int shift_count = 0;; ++shift_count) {
    if (shift_count >= opts.max_shifts) {
      throw Error(Errc::no_convergence, "rightmost_eigenvalues exceeded the shift budget");
    }
    const int nev_here = static_cast<int>(std::min<Eigen::Index>(nev, n));
    auto solve = solve_at_shift(a, cplx(s0, y), nev_here, opts.arnoldi_tol,
                                0x5eedULL + static_cast<std::uint64_t>(shift_count));
    for (const cplx v : solve.values) add_found(v);
    disks.push_back(std::move(solve));
    if (nev_here == n) break;  // the disk holds every eigenvalue

    const double xk = kth_real();
    if (!std::isfinite(xk)) {
      nev *= 2;
      if (nev > opts.nev_max) {
        throw Error(Errc::no_convergence, "rightmost_eigenvalues: nev budget exhausted");
      }
      continue;
    }
    const double depth = s0 - xk;
    const double top = covered_top(depth);
    if (top >= im_max) break;
    if (top < 0.0 || top <= last_top) {
      // No progress at this position: enlarge the disk.
      nev *= 2;
      if (nev > opts.nev_max) {
        throw Error(Errc::no_convergence, "rightmost_eigenvalues: nev budget exhausted");
      }
    } else {
      nev = opts.nev_initial > 0 ? opts.nev_initial : k + 6;
      y = top + 0.5 * depth;
    }
    last_top = top;
  }

  sort_descending_real(found);
  if (static_cast<int>(found.size()) > k) found.resize(k);
  SpectrumResult s = analyze_spectrum(std::move(found), tol_imag, opts.spectrum.tol_zero, true);
  s.partial = k < n;
  return s;
}

}  // namespace qvdp
