#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qvdp/fock.hpp"

namespace qvdp {

/// y = Op(x). Both vectors have the operator dimension.
using LinearMap = std::function<void(const CVector& x, CVector& y)>;

struct ArnoldiOptions {
  int nev = 6;
  int ncv = 0;  // Krylov dimension; 0 selects max(2 nev + 10, 24)
  int max_restarts = 500;
  double tol = 1e-12;  // on |Op y - theta y| / |theta|
  std::uint64_t seed = 0x5eed;
};

struct RitzPair {
  cplx theta;
  CVector vector;  // unit norm
  double residual = 0.0;
};

struct ArnoldiResult {
  std::vector<RitzPair> pairs;  // sorted by descending |theta|
  int restarts = 0;
  bool converged = false;
};

/// Thick-restarted Arnoldi (Krylov-Schur style) for the `nev` eigenvalues
/// of largest modulus. Restarts keep an orthonormal basis of the wanted
/// Ritz vectors, so the Krylov relation stays exact across restarts.
ArnoldiResult arnoldi_largest_magnitude(const LinearMap& op, Eigen::Index n,
                                        const ArnoldiOptions& opts);

}  // namespace qvdp
