#include "qvdp/arnoldi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "qvdp/error.hpp"

namespace qvdp {

namespace {

CVector random_unit(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(u(rng), u(rng));
  return v.normalized();
}

// Two passes of classical Gram-Schmidt against the first `k` columns.
CVector orthogonalize(const CMatrix& basis, Eigen::Index k, CVector w, CVector* coeffs) {
  CVector h = basis.leftCols(k).adjoint() * w;
  w.noalias() -= basis.leftCols(k) * h;
  CVector h2 = basis.leftCols(k).adjoint() * w;
  w.noalias() -= basis.leftCols(k) * h2;
  if (coeffs) *coeffs = h + h2;
  return w;
}

}  // namespace

ArnoldiResult arnoldi_largest_magnitude(const LinearMap& op, Eigen::Index n,
                                        const ArnoldiOptions& opts) {
  if (opts.nev < 1) throw Error(Errc::invalid_parameter, "arnoldi needs nev >= 1");
  const Eigen::Index nev = std::min<Eigen::Index>(opts.nev, n);
  Eigen::Index ncv = opts.ncv > 0 ? opts.ncv : std::max<Eigen::Index>(2 * nev + 10, 24);
  ncv = std::min(ncv, n);
  if (ncv <= nev && ncv < n) ncv = std::min(n, nev + 2);

  std::mt19937_64 rng(opts.seed);
  CMatrix v = CMatrix::Zero(n, ncv + 1);
  CMatrix h = CMatrix::Zero(ncv + 1, ncv);
  v.col(0) = random_unit(n, rng);

  ArnoldiResult result;
  Eigen::Index k = 0;
  CVector w(n);
  for (int restart = 0;; ++restart) {
    for (Eigen::Index j = k; j < ncv; ++j) {
      op(v.col(j), w);
      CVector coeffs;
      w = orthogonalize(v, j + 1, w, &coeffs);
      h.block(0, j, j + 1, 1) = coeffs;
      double beta = w.norm();
      if (j + 1 == n) {
        h(j + 1, j) = 0.0;
        break;
      }
      if (beta <= 1e-13 * std::max(1.0, coeffs.norm())) {
        // Invariant subspace: continue from a fresh direction with a zero
        // coupling, which keeps the decomposition exact.
        CVector fresh = orthogonalize(v, j + 1, random_unit(n, rng), nullptr);
        v.col(j + 1) = fresh.normalized();
        h(j + 1, j) = 0.0;
        continue;
      }
      h(j + 1, j) = beta;
      v.col(j + 1) = w / beta;
    }

    const CMatrix hm = h.topLeftCorner(ncv, ncv);
    const Eigen::RowVectorXcd b = h.row(ncv).head(ncv);
    Eigen::ComplexEigenSolver<CMatrix> es(hm, true);
    const auto& theta = es.eigenvalues();
    CMatrix y = es.eigenvectors();
    for (Eigen::Index c = 0; c < y.cols(); ++c) y.col(c).normalize();

    std::vector<Eigen::Index> order(ncv);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) {
      return std::abs(theta(l)) > std::abs(theta(r));
    });

    bool all_converged = true;
    std::vector<double> res(ncv);
    for (Eigen::Index q = 0; q < ncv; ++q) res[q] = std::abs((b * y.col(q)).value());
    for (Eigen::Index q = 0; q < nev; ++q) {
      const Eigen::Index idx = order[q];
      const double scale = std::max(std::abs(theta(idx)), 1e-300);
      if (res[idx] > opts.tol * scale) all_converged = false;
    }

    if (all_converged || restart >= opts.max_restarts || ncv == n) {
      result.converged = all_converged || ncv == n;
      result.restarts = restart;
      for (Eigen::Index q = 0; q < nev; ++q) {
        const Eigen::Index idx = order[q];
        RitzPair pair;
        pair.theta = theta(idx);
        pair.vector = (v.leftCols(ncv) * y.col(idx)).normalized();
        pair.residual = res[idx];
        result.pairs.push_back(std::move(pair));
      }
      return result;
    }

    const Eigen::Index keep = std::min<Eigen::Index>(ncv - 1, nev + (ncv - nev) / 2);
    CMatrix wanted(ncv, keep);
    for (Eigen::Index q = 0; q < keep; ++q) wanted.col(q) = y.col(order[q]);
    Eigen::HouseholderQR<CMatrix> qr(wanted);
    const CMatrix qmat = qr.householderQ() * CMatrix::Identity(ncv, keep);

    const CMatrix new_basis = v.leftCols(ncv) * qmat;
    const CVector residual_vec = v.col(ncv);
    v.leftCols(keep) = new_basis;
    v.col(keep) = residual_vec;
    h.setZero();
    h.topLeftCorner(keep, keep) = qmat.adjoint() * hm * qmat;
    h.block(keep, 0, 1, keep) = b * qmat;
    k = keep;
  }
}

}  // namespace qvdp
