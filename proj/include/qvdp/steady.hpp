#pragma once

#include <optional>
#include <vector>

#include "qvdp/liouvillian.hpp"

namespace qvdp {

struct SteadyObservables {
  double n_photon = 0.0;
  double var_n = 0.0;
  double purity = 0.0;
  // eta * sqrt(Var N) and eta^2 * Var N; both rescalings are reported.
  double fluct_eta_sigma = 0.0;
  double fluct_eta2_var = 0.0;
  std::vector<double> distribution;
};

SteadyObservables steady_observables(const DensityMatrix& rho, double eta);

struct SteadyStateOptions {
  double shift = 1e-3;     // real shift for the shift-invert solves
  double tol_zero = 1e-9;  // second eigenvalue below this is a degenerate null space
  int refinement_sweeps = 3;
};

struct SteadyState {
  DensityMatrix rho;
  double residual = 0.0;      // max |L rho|
  cplx second_eigenvalue;     // nearest non-null eigenvalue to the shift
  SteadyObservables observables;
  std::optional<int> suggested_dim;  // set when the truncation looks inadequate
};

/// Null vector of L by shift-invert Arnoldi, polished by inverse iteration,
/// then hermitized and trace-normalized.
SteadyState steady_state(const Superoperator& l, const SteadyStateOptions& opts = {});

}  // namespace qvdp
