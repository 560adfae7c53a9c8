#include "qvdp/steady.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SparseLU>

#include "qvdp/arnoldi.hpp"
#include "qvdp/error.hpp"

namespace qvdp {

SteadyObservables steady_observables(const DensityMatrix& rho, double eta) {
  SteadyObservables o;
  o.n_photon = photon_number(rho);
  o.var_n = photon_var(rho);
  o.purity = purity(rho);
  o.fluct_eta_sigma = eta * std::sqrt(std::max(0.0, o.var_n));
  o.fluct_eta2_var = eta * eta * o.var_n;
  o.distribution = photon_distribution(rho);
  return o;
}

SteadyState steady_state(const Superoperator& l, const SteadyStateOptions& opts) {
  const int d = l.dim_fock();
  const Eigen::Index n = l.size();
  SparseCMatrix shifted = l.matrix();
  SparseCMatrix id(n, n);
  id.setIdentity();
  shifted -= cplx(opts.shift, 0.0) * id;
  shifted.makeCompressed();
  Eigen::SparseLU<SparseCMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) {
    throw Error(Errc::no_convergence, "sparse LU of the shifted Liouvillian failed");
  }
  LinearMap op = [&lu](const CVector& x, CVector& y) { y = lu.solve(x); };
  ArnoldiOptions ao;
  ao.nev = 2;
  ao.tol = 1e-13;
  const auto res = arnoldi_largest_magnitude(op, n, ao);
  if (res.pairs.size() < 2) {
    throw Error(Errc::no_convergence, "steady state: Arnoldi returned too few pairs");
  }
  const cplx lambda0 = opts.shift + 1.0 / res.pairs[0].theta;
  const cplx lambda1 = opts.shift + 1.0 / res.pairs[1].theta;
  if (std::abs(lambda1) < opts.tol_zero) {
    std::ostringstream os;
    os << "two eigenvalues near zero (" << std::abs(lambda0) << ", " << std::abs(lambda1)
       << "); the steady state is not unique";
    throw Error(Errc::ambiguous_steady_state, os.str());
  }

  CVector x = res.pairs[0].vector;
  auto to_state = [d](const CVector& v) {
    CMatrix m = unvec(v, d);
    return hermitize(DensityMatrix{m / m.trace()});
  };
  SteadyState out;
  out.rho = to_state(x);
  out.residual = qvdp::apply(l.params(), out.rho.m).cwiseAbs().maxCoeff();
  for (int sweep = 0; sweep < opts.refinement_sweeps && out.residual > 1e-13; ++sweep) {
    x = lu.solve(x);
    x.normalize();
    DensityMatrix candidate = to_state(x);
    const double r = qvdp::apply(l.params(), candidate.m).cwiseAbs().maxCoeff();
    if (r >= out.residual) break;
    out.rho = std::move(candidate);
    out.residual = r;
  }
  out.second_eigenvalue = lambda1;
  out.observables = steady_observables(out.rho, l.params().eta);
  out.suggested_dim = check_truncation(out.rho);
  return out;
}

}  // namespace qvdp
