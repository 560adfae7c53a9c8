#include "qvdp/liouvillian.hpp"

#include <cmath>
#include <ostream>

#include <unsupported/Eigen/KroneckerProduct>

#include "qvdp/error.hpp"

namespace qvdp {

CMatrix apply(const SystemParams& p, const CMatrix& rho) {
  const int d = p.dim;
  if (rho.rows() != d || rho.cols() != d) {
    throw Error(Errc::dimension_mismatch, "state is " + std::to_string(rho.rows()) + "x" +
                                              std::to_string(rho.cols()) + ", params dim " +
                                              std::to_string(d));
  }
  const cplx I(0.0, 1.0);
  const cplx eps = p.eps;
  const cplx eps_c = std::conj(p.eps);

  std::vector<double> sq(d + 2);
  for (int k = 0; k < d + 2; ++k) sq[k] = std::sqrt(static_cast<double>(k));
  // Diagonals of a^dag a, a a^dag (truncated) and a^dag^2 a^2.
  std::vector<double> n_op(d), aad(d), n2_op(d);
  for (int k = 0; k < d; ++k) {
    n_op[k] = k;
    aad[k] = (k < d - 1) ? k + 1.0 : 0.0;
    n2_op[k] = static_cast<double>(k) * (k - 1.0);
  }

  CMatrix out(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      const cplx r = rho(i, j);
      // -i(H rho - rho H), H = -delta n + eps a^dag + conj(eps) a
      cplx h_rho = -p.delta * n_op[i] * r;
      if (i > 0) h_rho += eps * sq[i] * rho(i - 1, j);
      if (i + 1 < d) h_rho += eps_c * sq[i + 1] * rho(i + 1, j);
      cplx rho_h = -p.delta * n_op[j] * r;
      if (j + 1 < d) rho_h += eps * sq[j + 1] * rho(i, j + 1);
      if (j > 0) rho_h += eps_c * sq[j] * rho(i, j - 1);
      cplx v = -I * (h_rho - rho_h);

      cplx jump = 0.0;
      if (i + 1 < d && j + 1 < d) jump += p.kappa * sq[i + 1] * sq[j + 1] * rho(i + 1, j + 1);
      if (i > 0 && j > 0) jump += p.gain * sq[i] * sq[j] * rho(i - 1, j - 1);
      if (i + 2 < d && j + 2 < d) {
        jump += p.eta * sq[i + 1] * sq[i + 2] * sq[j + 1] * sq[j + 2] * rho(i + 2, j + 2);
      }
      const double decay = 0.5 * (p.kappa * (n_op[i] + n_op[j]) + p.gain * (aad[i] + aad[j]) +
                                  p.eta * (n2_op[i] + n2_op[j]));
      out(i, j) = v + jump - decay * r;
    }
  }
  return out;
}

DensityMatrix apply(const SystemParams& p, const DensityMatrix& rho) {
  return DensityMatrix{qvdp::apply(p, rho.m)};
}

CVector vec(const CMatrix& rho) {
  return Eigen::Map<const CVector>(rho.data(), rho.size());
}

CMatrix unvec(const CVector& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim) {
    throw Error(Errc::dimension_mismatch, "vector length does not match dim^2");
  }
  return Eigen::Map<const CMatrix>(v.data(), dim, dim);
}

Superoperator::Superoperator(SystemParams params, SparseCMatrix matrix, int dense_dim_limit)
    : params_(std::move(params)), matrix_(std::move(matrix)), dense_dim_limit_(dense_dim_limit) {}

CMatrix Superoperator::to_dense() const {
  if (params_.dim > dense_dim_limit_) {
    throw Error(Errc::budget_exceeded,
                "dense Liouvillian at dim=" + std::to_string(params_.dim) + " exceeds limit " +
                    std::to_string(dense_dim_limit_) + "; use rightmost_eigenvalues instead");
  }
  return CMatrix(matrix_);
}

void Superoperator::write_coordinates(std::ostream& out) const {
  out.precision(17);
  for (int k = 0; k < matrix_.outerSize(); ++k) {
    for (SparseCMatrix::InnerIterator it(matrix_, k); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag()
          << '\n';
    }
  }
}

namespace {

SparseCMatrix to_sparse(const CMatrix& m) { return m.sparseView(0.0, 0.0); }

}  // namespace

Superoperator build_superoperator(const SystemParams& p, const SuperoperatorOptions& opts) {
  p.validate();
  const int d = p.dim;
  // Every Kronecker term is banded with at most 5 distinct shifts per side.
  const long long estimate = 9LL * d * d;
  if (estimate > opts.max_nonzeros) {
    throw Error(Errc::budget_exceeded,
                "superoperator at dim=" + std::to_string(d) +
                    " exceeds the nonzero budget; evolve with the matrix-free apply()");
  }

  const SparseCMatrix id = to_sparse(CMatrix::Identity(d, d));
  const SparseCMatrix h = to_sparse(hamiltonian(p).m);
  const SparseCMatrix a = to_sparse(annihilation(d).m);
  const SparseCMatrix ad = to_sparse(creation(d).m);
  const SparseCMatrix a2 = to_sparse(a_squared(d).m);

  const cplx I(0.0, 1.0);
  SparseCMatrix l = -I * (SparseCMatrix(Eigen::kroneckerProduct(id, h)) -
                          SparseCMatrix(Eigen::kroneckerProduct(SparseCMatrix(h.transpose()), id)));

  auto add_dissipator = [&](const SparseCMatrix& c, double rate) {
    if (rate == 0.0) return;
    const SparseCMatrix cdc = SparseCMatrix(c.adjoint()) * c;
    SparseCMatrix term = SparseCMatrix(Eigen::kroneckerProduct(SparseCMatrix(c.conjugate()), c));
    term -= 0.5 * SparseCMatrix(Eigen::kroneckerProduct(id, cdc));
    term -= 0.5 * SparseCMatrix(Eigen::kroneckerProduct(SparseCMatrix(cdc.transpose()), id));
    l += rate * term;
  };
  add_dissipator(a, p.kappa);
  add_dissipator(ad, p.gain);
  add_dissipator(a2, p.eta);
  l.prune(cplx(0.0, 0.0));
  l.makeCompressed();
  return Superoperator(p, std::move(l), opts.dense_dim_limit);
}

std::vector<SectorBlock> sector_blocks(const SystemParams& p) {
  p.validate();
  if (p.eps != cplx(0.0, 0.0)) {
    throw Error(Errc::sector_unavailable, "sideband blocks require eps == 0");
  }
  const int d = p.dim;
  const cplx I(0.0, 1.0);
  auto sq = [](double x) { return std::sqrt(x); };
  auto aad = [d](int k) { return k < d - 1 ? k + 1.0 : 0.0; };

  std::vector<SectorBlock> blocks;
  blocks.reserve(2 * d - 1);
  for (int m = -(d - 1); m <= d - 1; ++m) {
    const int len = d - std::abs(m);
    const int i0 = std::max(0, -m);
    CMatrix b = CMatrix::Zero(len, len);
    for (int k = 0; k < len; ++k) {
      const double i = i0 + k;
      const double j = i + m;
      // Detuning rotates the coherence rho(i, j) at -i delta (j - i).
      b(k, k) = -I * p.delta * static_cast<double>(m) -
                0.5 * (p.kappa * (i + j) + p.gain * (aad(static_cast<int>(i)) + aad(static_cast<int>(j))) +
                       p.eta * (i * (i - 1) + j * (j - 1)));
      // Loss feeds rho(i, j) from rho(i+1, j+1); gain from rho(i-1, j-1).
      if (k + 1 < len) b(k, k + 1) += p.kappa * sq(i + 1) * sq(j + 1);
      if (k > 0) b(k, k - 1) += p.gain * sq(i) * sq(j);
      if (k + 2 < len) b(k, k + 2) += p.eta * sq((i + 1) * (i + 2) * (j + 1) * (j + 2));
    }
    blocks.push_back(SectorBlock{m, std::move(b)});
  }
  return blocks;
}

}  // namespace qvdp
