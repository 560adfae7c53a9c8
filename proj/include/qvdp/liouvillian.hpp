#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/SparseCore>

#include "qvdp/fock.hpp"

namespace qvdp {

using SparseCMatrix = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;

/// d rho/dt = -i[H, rho] + kappa D[a] rho + gain D[a^dag] rho + eta D[a^2] rho
/// with D[c] rho = c rho c^dag - {c^dag c, rho}/2, evaluated entrywise in
/// O(dim^2) work. The truncated a^dag is used as-is; the generator stays
/// exactly trace preserving.
CMatrix apply(const SystemParams& p, const CMatrix& rho);
DensityMatrix apply(const SystemParams& p, const DensityMatrix& rho);

/// Column-stacking vectorization: vec(rho)[i + dim*j] = rho(i, j), so that
/// vec(A rho B) = (B^T kron A) vec(rho).
CVector vec(const CMatrix& rho);
CMatrix unvec(const CVector& v, int dim);

struct SuperoperatorOptions {
  // Upper bound on stored nonzeros.
  long long max_nonzeros = 50'000'000;
  // Largest Fock dimension for which to_dense() is permitted.
  int dense_dim_limit = 80;
};

/// Materialized generator L with L vec(rho) = vec(apply(rho)).
class Superoperator {
 public:
  Superoperator(SystemParams params, SparseCMatrix matrix, int dense_dim_limit);

  const SystemParams& params() const { return params_; }
  int dim_fock() const { return params_.dim; }
  long long size() const { return matrix_.rows(); }
  const SparseCMatrix& matrix() const { return matrix_; }

  CVector multiply(const CVector& x) const { return matrix_ * x; }

  /// Throws Errc::budget_exceeded beyond the dense dimension limit.
  CMatrix to_dense() const;
  int dense_dim_limit() const { return dense_dim_limit_; }

  /// Coordinate text, one "row col re im" line per stored entry (0-based).
  void write_coordinates(std::ostream& out) const;

 private:
  SystemParams params_;
  SparseCMatrix matrix_;
  int dense_dim_limit_;
};

/// L = -i(I kron H - H^T kron I)
///     + sum_c [conj(c) kron c - (I kron c^dag c)/2 - ((c^dag c)^T kron I)/2]
/// over c in {sqrt(kappa) a, sqrt(gain) a^dag, sqrt(eta) a^2}.
Superoperator build_superoperator(const SystemParams& p, const SuperoperatorOptions& opts = {});

/// Block of L acting on the coherences rho(n, n+m) for a fixed sideband m.
/// Entry k of the block corresponds to rho(i_k, i_k + m) with
/// i_k = k + max(0, -m).
struct SectorBlock {
  int m = 0;
  CMatrix matrix;
};

/// Blocks m = -(dim-1) .. dim-1; only defined for eps == 0, otherwise
/// Errc::sector_unavailable.
std::vector<SectorBlock> sector_blocks(const SystemParams& p);

}  // namespace qvdp
