#include "qvdp/husimi.hpp"

#include <algorithm>
#include <cmath>

#include "qvdp/error.hpp"

namespace qvdp {

namespace {

// Coherent amplitudes computed from log-magnitudes so that large |alpha|
// (|alpha|^2 beyond ~700) neither underflows nor overflows.
CVector stable_coherent_amplitudes(cplx alpha, int dim) {
  const double r2 = std::norm(alpha);
  if (r2 < 600.0) return coherent_amplitudes(alpha, dim);
  const double log_r = 0.5 * std::log(r2);
  const double theta = std::arg(alpha);
  CVector c(dim);
  for (int n = 0; n < dim; ++n) {
    const double log_mag = -0.5 * r2 + n * log_r - 0.5 * std::lgamma(n + 1.0);
    c(n) = std::polar(std::exp(log_mag), n * theta);
  }
  return c;
}

}  // namespace

double QGrid::cell_area() const {
  if (re_axis.size() < 2 || im_axis.size() < 2) return 0.0;
  return (re_axis[1] - re_axis[0]) * (im_axis[1] - im_axis[0]);
}

double QGrid::normalization() const { return values.sum() * cell_area() / M_PI; }

QGrid make_grid(const GridSpec& spec) {
  if (spec.n < 2) throw Error(Errc::invalid_parameter, "grid needs n >= 2");
  if (!(spec.radius > 0.0)) throw Error(Errc::invalid_parameter, "grid radius must be > 0");
  QGrid g;
  g.re_axis.resize(spec.n);
  g.im_axis.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    const double u = -spec.radius + 2.0 * spec.radius * i / (spec.n - 1);
    g.re_axis[i] = spec.center.real() + u;
    g.im_axis[i] = spec.center.imag() + u;
  }
  g.values = Eigen::MatrixXd::Zero(spec.n, spec.n);
  return g;
}

double auto_radius(const DensityMatrix& rho) {
  return 1.5 * std::sqrt(std::max(0.0, photon_number(rho))) + 4.0;
}

double husimi_at(const DensityMatrix& rho, cplx alpha) {
  const CVector c = stable_coherent_amplitudes(alpha, rho.dim());
  // negative values are rounding residue for a positive state
  return std::max(0.0, c.dot(rho.m * c).real());
}

QGrid husimi(const DensityMatrix& rho, const GridSpec& spec) {
  GridSpec s = spec;
  if (!(s.radius > 0.0)) s.radius = auto_radius(rho);
  QGrid g = make_grid(s);
  const int d = rho.dim();
  const int n = s.n;
  // One column of coherent kets per imaginary-axis point, one batch per
  // real-axis point.
  CMatrix kets(d, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      kets.col(j) = stable_coherent_amplitudes(cplx(g.re_axis[i], g.im_axis[j]), d);
    }
    const CMatrix rk = rho.m * kets;
    for (int j = 0; j < n; ++j) g.values(i, j) = std::max(0.0, kets.col(j).dot(rk.col(j)).real());
  }
  return g;
}

QMax q_max(const DensityMatrix& rho, const GridSpec& spec) {
  const QGrid g = husimi(rho, spec);
  return refine_max(g, [&rho](cplx a) { return husimi_at(rho, a); });
}

}  // namespace qvdp
