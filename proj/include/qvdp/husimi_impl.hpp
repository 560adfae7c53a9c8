#pragma once

#include <Eigen/Dense>

namespace qvdp {

template <class Eval>
QMax refine_max(const QGrid& grid, Eval&& evaluate) {
  Eigen::Index bi = 0, bj = 0;
  QMax best;
  best.value = grid.values.maxCoeff(&bi, &bj);
  best.argmax = cplx(grid.re_axis[bi], grid.im_axis[bj]);
  const Eigen::Index nr = grid.values.rows();
  const Eigen::Index ni = grid.values.cols();
  if (bi == 0 || bj == 0 || bi == nr - 1 || bj == ni - 1) return best;

  // Least squares fit of a + b x + c y + d x^2 + e x y + f y^2 in cell units.
  Eigen::Matrix<double, 9, 6> a;
  Eigen::Matrix<double, 9, 1> rhs;
  int row = 0;
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      a.row(row) << 1.0, dx, dy, dx * dx, dx * dy, dy * dy;
      rhs(row) = grid.values(bi + dx, bj + dy);
      ++row;
    }
  }
  const Eigen::Matrix<double, 6, 1> c = a.colPivHouseholderQr().solve(rhs);
  Eigen::Matrix2d hess;
  hess << 2 * c(3), c(4), c(4), 2 * c(5);
  const Eigen::Vector2d grad(-c(1), -c(2));
  if (std::abs(hess.determinant()) < 1e-300) return best;
  const Eigen::Vector2d off = hess.partialPivLu().solve(grad);
  if (std::abs(off(0)) > 1.0 || std::abs(off(1)) > 1.0) return best;
  const double hx = grid.re_axis[1] - grid.re_axis[0];
  const double hy = grid.im_axis[1] - grid.im_axis[0];
  const cplx alpha(grid.re_axis[bi] + off(0) * hx, grid.im_axis[bj] + off(1) * hy);
  const double v = evaluate(alpha);
  if (v > best.value) {
    best.value = v;
    best.argmax = alpha;
  }
  return best;
}

}  // namespace qvdp
