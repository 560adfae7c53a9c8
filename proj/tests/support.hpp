#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qvdp/fock.hpp"
#include "qvdp/log.hpp"

namespace testing {

using qvdp::cplx;
using qvdp::CMatrix;

inline CMatrix random_hermitian_density(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = cplx(n(rng), n(rng));
  CMatrix rho = g * g.adjoint();
  return rho / rho.trace();
}

inline CMatrix random_matrix(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = cplx(n(rng), n(rng));
  return g;
}

// Lindblad action written with plain matrix products, independent of the
// library's entrywise kernel.
inline CMatrix lindblad_by_products(const qvdp::SystemParams& p, const CMatrix& rho) {
  const int d = p.dim;
  CMatrix a = CMatrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
  const CMatrix ad = a.adjoint();
  const CMatrix h = -p.delta * ad * a + p.eps * ad + std::conj(p.eps) * a;
  const cplx I(0.0, 1.0);
  CMatrix out = -I * (h * rho - rho * h);
  auto diss = [&](const CMatrix& c, double rate) {
    const CMatrix cdc = c.adjoint() * c;
    out += rate * (c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc));
  };
  diss(a, p.kappa);
  diss(ad, p.gain);
  diss(a * a, p.eta);
  return out;
}

// Dense generator assembled column by column from the product formula.
inline CMatrix dense_generator_oracle(const qvdp::SystemParams& p) {
  const int d = p.dim;
  CMatrix l(d * d, d * d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      CMatrix e = CMatrix::Zero(d, d);
      e(i, j) = 1.0;
      const CMatrix col = lindblad_by_products(p, e);
      l.col(i + d * j) = Eigen::Map<const Eigen::VectorXcd>(col.data(), d * d);
    }
  }
  return l;
}

inline std::vector<cplx> eigen_eigenvalues(const CMatrix& m) {
  Eigen::ComplexEigenSolver<CMatrix> es(m, false);
  const auto& ev = es.eigenvalues();
  std::vector<cplx> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), [](cplx x, cplx y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  return out;
}

// Largest distance under greedy nearest matching of two multisets.
inline double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
  if (a.size() != b.size()) return INFINITY;
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const cplx x : a) {
    double best = INFINITY;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double dist = std::abs(x - b[j]);
      if (dist < best) {
        best = dist;
        arg = j;
      }
    }
    used[arg] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

// Collects warnings for the lifetime of the object.
class WarningCapture {
 public:
  WarningCapture() {
    previous_ = qvdp::set_warning_sink([this](std::string_view m) { messages.emplace_back(m); });
  }
  ~WarningCapture() { qvdp::set_warning_sink(previous_); }
  std::vector<std::string> messages;

 private:
  qvdp::WarningSink previous_;
};

inline qvdp::SystemParams paper_rates(double eta, double eps_scaled, int dim = 0) {
  qvdp::SystemParams p;
  p.delta = 10.0;
  p.kappa = 0.1;
  p.gain = 1.0;
  p.eta = eta;
  p.set_eps_scaled(eps_scaled);
  p.dim = dim > 0 ? dim : qvdp::default_dimension(p);
  return p;
}

}  // namespace testing
