#include "qvdp/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/Polynomials>

#include "qvdp/error.hpp"
#include "qvdp/log.hpp"

namespace qvdp {

namespace {

void require_dim(int dim) {
  if (dim < 2) {
    throw Error(Errc::invalid_dimension, "Fock dimension must be >= 2, got " + std::to_string(dim));
  }
}

void require_same_dim(int a, int b) {
  if (a != b) {
    throw Error(Errc::dimension_mismatch,
                "operator dim " + std::to_string(a) + " vs state dim " + std::to_string(b));
  }
}

// Largest non-negative root n of n((a - eta n)^2 + delta^2) = |eps|^2.
double largest_fixed_point_occupation(const SystemParams& p) {
  const double a = 0.5 * (p.gain - p.kappa);
  const double e2 = std::norm(p.eps);
  if (e2 == 0.0) return 0.0;
  const double lin = a * a + p.delta * p.delta;
  if (p.eta == 0.0) return lin > 0.0 ? e2 / lin : 0.0;
  Eigen::Matrix<double, 4, 1> coeffs(-e2, lin, -2.0 * a * p.eta, p.eta * p.eta);
  Eigen::PolynomialSolver<double, 3> solver(coeffs);
  bool found = false;
  const double n = solver.greatestRealRoot(found);
  return found ? std::max(n, 0.0) : 0.0;
}

}  // namespace

void SystemParams::validate() const {
  auto bad = [](const char* key, double v) {
    std::ostringstream os;
    os << key << " must be finite and >= 0, got " << v;
    throw Error(Errc::invalid_parameter, os.str());
  };
  if (!std::isfinite(delta)) throw Error(Errc::invalid_parameter, "delta must be finite");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) bad("kappa", kappa);
  if (!(gain >= 0.0) || !std::isfinite(gain)) bad("gain", gain);
  if (!(eta >= 0.0) || !std::isfinite(eta)) bad("eta", eta);
  if (!std::isfinite(eps.real()) || !std::isfinite(eps.imag())) {
    throw Error(Errc::invalid_parameter, "eps must be finite");
  }
  require_dim(dim);
}

double SystemParams::eps_scaled() const { return std::abs(eps) * std::sqrt(eta); }

void SystemParams::set_eps_scaled(double eps_scaled) {
  if (!(eta > 0.0)) {
    throw Error(Errc::invalid_parameter, "eps_scaled requires eta > 0");
  }
  eps = cplx(eps_scaled / std::sqrt(eta), 0.0);
}

std::string SystemParams::describe() const {
  std::ostringstream os;
  os.precision(10);
  os << "delta=" << delta << " kappa=" << kappa << " gain=" << gain << " eta=" << eta
     << " eps=" << eps.real();
  if (eps.imag() != 0.0) os << (eps.imag() < 0 ? "-" : "+") << std::abs(eps.imag()) << "i";
  os << " eps_scaled=" << eps_scaled() << " dim=" << dim;
  return os.str();
}

double estimated_occupation(const SystemParams& p) {
  double n = largest_fixed_point_occupation(p);
  if (p.gain > p.kappa) {
    if (p.eta > 0.0) n = std::max(n, (p.gain - p.kappa) / (2.0 * p.eta));
  } else if (p.gain > 0.0 && p.kappa > p.gain) {
    n = std::max(n, p.gain / (p.kappa - p.gain));
  }
  return n;
}

int default_dimension(const SystemParams& p) {
  if (p.gain > p.kappa && p.eta == 0.0) {
    throw Error(Errc::invalid_parameter, "gain > kappa with eta = 0 has no bounded steady state");
  }
  return static_cast<int>(std::ceil(3.0 * estimated_occupation(p) + 20.0));
}

Operator annihilation(int dim) {
  require_dim(dim);
  Operator a{CMatrix::Zero(dim, dim)};
  for (int n = 1; n < dim; ++n) a.m(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Operator creation(int dim) { return Operator{annihilation(dim).m.adjoint()}; }

Operator number(int dim) {
  require_dim(dim);
  Operator n{CMatrix::Zero(dim, dim)};
  for (int k = 0; k < dim; ++k) n.m(k, k) = static_cast<double>(k);
  return n;
}

Operator a_squared(int dim) {
  const auto a = annihilation(dim);
  return Operator{a.m * a.m};
}

Operator hamiltonian(const SystemParams& p) {
  p.validate();
  const auto a = annihilation(p.dim);
  CMatrix h = -p.delta * number(p.dim).m + p.eps * a.m.adjoint() + std::conj(p.eps) * a.m;
  return Operator{std::move(h)};
}

CVector coherent_amplitudes(cplx alpha, int dim) {
  require_dim(dim);
  CVector c(dim);
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return c;
}

DensityMatrix coherent_state(cplx alpha, int dim, double* tail_weight) {
  CVector c = coherent_amplitudes(alpha, dim);
  const double kept = c.squaredNorm();
  const double tail = std::max(0.0, 1.0 - kept);
  if (tail_weight) *tail_weight = tail;
  if (tail > 1e-6) {
    std::ostringstream os;
    os << "coherent state |alpha|^2=" << std::norm(alpha) << " loses tail weight " << tail
       << " at dim=" << dim;
    warn(os.str());
  }
  c /= std::sqrt(kept);
  return DensityMatrix{c * c.adjoint()};
}

DensityMatrix fock_state(int n, int dim) {
  require_dim(dim);
  if (n < 0 || n >= dim) {
    throw Error(Errc::invalid_dimension, "Fock level " + std::to_string(n) + " outside truncation");
  }
  DensityMatrix rho{CMatrix::Zero(dim, dim)};
  rho.m(n, n) = 1.0;
  return rho;
}

DensityMatrix diagonal_state(const std::vector<double>& populations) {
  const int dim = static_cast<int>(populations.size());
  require_dim(dim);
  DensityMatrix rho{CMatrix::Zero(dim, dim)};
  for (int n = 0; n < dim; ++n) rho.m(n, n) = populations[n];
  return rho;
}

cplx expectation(const Operator& op, const DensityMatrix& rho) {
  require_same_dim(op.dim(), rho.dim());
  // Tr(rho op) without forming the product.
  return (rho.m.transpose().cwiseProduct(op.m)).sum();
}

double photon_number(const DensityMatrix& rho) {
  double n = 0.0;
  for (int k = 0; k < rho.dim(); ++k) n += k * rho.m(k, k).real();
  return n;
}

double photon_var(const DensityMatrix& rho) {
  double n = 0.0;
  double n2 = 0.0;
  for (int k = 0; k < rho.dim(); ++k) {
    const double p = rho.m(k, k).real();
    n += k * p;
    n2 += static_cast<double>(k) * k * p;
  }
  return n2 - n * n;
}

double purity(const DensityMatrix& rho) {
  // Tr(rho^2) = sum_ij rho_ij rho_ji.
  return (rho.m.transpose().cwiseProduct(rho.m)).sum().real();
}

std::vector<double> photon_distribution(const DensityMatrix& rho) {
  std::vector<double> p(rho.dim());
  for (int k = 0; k < rho.dim(); ++k) p[k] = rho.m(k, k).real();
  return p;
}

DensityMatrix hermitize(const DensityMatrix& rho) {
  CMatrix h = 0.5 * (rho.m + rho.m.adjoint());
  const double tr = h.trace().real();
  if (tr != 0.0) h /= tr;
  return DensityMatrix{std::move(h)};
}

DensityDiagnostics validate_density(const DensityMatrix& rho) {
  DensityDiagnostics d;
  d.trace_error = std::abs(rho.m.trace() - 1.0);
  d.hermiticity_error = (rho.m - rho.m.adjoint()).cwiseAbs().maxCoeff();
  const CMatrix h = 0.5 * (rho.m + rho.m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  d.trace_ok = d.trace_error < 1e-8;
  d.hermitian_ok = d.hermiticity_error < 1e-10;
  d.positive_ok = d.min_eigenvalue >= -1e-8;
  return d;
}

std::optional<int> check_truncation(const DensityMatrix& rho, double threshold) {
  const int top = rho.dim() - 1;
  const double p_top = rho.m(top, top).real();
  if (p_top <= threshold) return std::nullopt;
  const int suggested = static_cast<int>(std::ceil(1.5 * rho.dim()));
  std::ostringstream os;
  os << "truncation at dim=" << rho.dim() << " leaves p(" << top << ")=" << p_top
     << " > " << threshold << "; try dim=" << suggested;
  warn(os.str());
  return suggested;
}

}  // namespace qvdp
