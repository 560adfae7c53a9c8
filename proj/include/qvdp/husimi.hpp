#pragma once

#include <vector>

#include "qvdp/fock.hpp"

namespace qvdp {

/// Uniform square grid of complex amplitudes alpha = center + x + i y with
/// x, y in [-radius, radius].
struct GridSpec {
  int n = 201;
  double radius = 0.0;  // <= 0 selects 1.5 sqrt(N) + 4 from the state
  cplx center{0.0, 0.0};
};

/// Husimi values on a grid; values(i, j) belongs to re_axis[i], im_axis[j].
struct QGrid {
  std::vector<double> re_axis;
  std::vector<double> im_axis;
  Eigen::MatrixXd values;

  double cell_area() const;
  /// sum Q dA / pi, which is 1 for a normalized state when the grid covers
  /// its support.
  double normalization() const;
};

QGrid make_grid(const GridSpec& spec);

double auto_radius(const DensityMatrix& rho);

/// Q(alpha) = <alpha|rho|alpha>, with no 1/pi prefactor, so the vacuum
/// peaks at Q(0) = 1.
double husimi_at(const DensityMatrix& rho, cplx alpha);

QGrid husimi(const DensityMatrix& rho, const GridSpec& spec = {});

struct QMax {
  double value = 0.0;
  cplx argmax;
};

/// Grid maximum refined by a quadratic fit over the 3x3 neighbourhood of
/// the grid argmax; the refined point is kept when Q is larger there.
QMax q_max(const DensityMatrix& rho, const GridSpec& spec = {});

/// Same refinement on precomputed values; `evaluate` gives Q off-grid.
template <class Eval>
QMax refine_max(const QGrid& grid, Eval&& evaluate);

}  // namespace qvdp

#include "qvdp/husimi_impl.hpp"
