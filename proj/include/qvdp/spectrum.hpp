#pragma once

#include <optional>
#include <vector>

#include "qvdp/liouvillian.hpp"

namespace qvdp {

struct SpectrumOptions {
  // Below this |Im lambda| an eigenvalue counts as real. Negative selects
  // 1e-6 * max(1, |delta|).
  double tol_imag = -1.0;
  // Below this |lambda| an eigenvalue counts as the null eigenvalue.
  double tol_zero = 1e-9;
};

/// Eigenvalues of the Liouvillian plus the quantities read off them.
///
/// gap1 = -max{Re l : |Im l| > tol_imag}, gap2 = -max{Re l : |Im l| <= tol_imag,
/// |l| > tol_zero}; osc_freq = |Im| of the eigenvalue attaining gap1. Gaps
/// are NaN when no qualifying eigenvalue is known (possible for partial
/// spectra).
struct SpectrumResult {
  std::vector<cplx> eigenvalues;  // descending real part
  double gap1 = 0.0;
  double gap2 = 0.0;
  double osc_freq = 0.0;
  std::optional<double> metastability_ratio;
  double tol_imag = 0.0;
  double tol_zero = 0.0;
  bool partial = false;
  int null_count = 0;  // eigenvalues with |l| < tol_zero
};

/// Sorts and derives gaps, frequency and metastability ratio.
SpectrumResult analyze_spectrum(std::vector<cplx> eigenvalues, double tol_imag, double tol_zero,
                                bool partial);

double resolve_tol_imag(const SpectrumOptions& opts, const SystemParams& p);

/// All dim^2 eigenvalues via dense LAPACK (zgeev). Errc::budget_exceeded
/// beyond the superoperator's dense limit.
SpectrumResult full_spectrum(const Superoperator& l, const SpectrumOptions& opts = {});

/// Union of the eps = 0 sideband block spectra.
std::vector<cplx> sector_spectrum(const SystemParams& p);

struct RightmostOptions {
  SpectrumOptions spectrum;
  double shift_real = 1e-2;  // real part of every shift
  int nev_initial = 0;       // 0 selects k + 6
  int nev_max = 512;
  int max_shifts = 2000;
  double arnoldi_tol = 1e-13;
};

/// The k eigenvalues of largest real part.
///
/// Shift-invert Arnoldi is run at shifts sigma = shift_real + i y on the
/// upper half of the imaginary axis (the spectrum is closed under complex
/// conjugation). Each solve finds the eigenvalues inside a disk around its
/// shift; shifts are added until the disks cover the rectangle
/// {Re >= Re l_k, 0 <= Im <= Gershgorin bound}, which certifies that no
/// eigenvalue to the right of the k-th one was missed.
SpectrumResult rightmost_eigenvalues(const Superoperator& l, int k,
                                     const RightmostOptions& opts = {});

/// max over consecutive non-null eigenvalues (descending real part) of
/// Re l_{i+1} / Re l_i. Needs at least three non-null eigenvalues.
double metastability_ratio(const SpectrumResult& spec);

}  // namespace qvdp
