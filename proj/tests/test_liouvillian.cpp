#include <doctest.h>

#include <random>
#include <sstream>

#include "qvdp/error.hpp"
#include "qvdp/liouvillian.hpp"
#include "support.hpp"

using namespace qvdp;

namespace {

SystemParams random_params(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SystemParams p;
  p.delta = 20.0 * u(rng) - 10.0;
  p.kappa = 0.05 + u(rng);
  p.gain = 1.5 * u(rng);
  p.eta = 0.02 + 0.3 * u(rng);
  p.eps = cplx(2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0);
  p.dim = dim;
  return p;
}

}  // namespace

TEST_CASE("vacuum is dark under pure damping") {
  SystemParams p;
  p.gain = 0;
  p.eta = 0;
  p.dim = 5;
  CHECK(qvdp::apply(p, fock_state(0, 5)).m.norm() == 0.0);
}

TEST_CASE("single photon decay") {
  SystemParams p;
  p.delta = 0;
  p.gain = 0;
  p.eta = 0;
  p.kappa = 0.3;
  p.dim = 4;
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = 0.3;
  expected(1, 1) = -0.3;
  CHECK((qvdp::apply(p, fock_state(1, 4)).m - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("apply agrees with the matrix-product oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const SystemParams p = random_params(rng, 3 + trial);
    const CMatrix x = testing::random_matrix(p.dim, rng);
    const CMatrix diff = qvdp::apply(p, x) - testing::lindblad_by_products(p, x);
    CHECK(diff.cwiseAbs().maxCoeff() < 1e-12 * (1.0 + x.cwiseAbs().maxCoeff()) * p.dim * p.dim);
  }
}

TEST_CASE("trace and Hermiticity preservation") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const SystemParams p = random_params(rng, 12);
    const CMatrix rho = testing::random_hermitian_density(12, rng);
    const CMatrix d = qvdp::apply(p, rho);
    CHECK(std::abs(d.trace()) < 1e-12 * (1.0 + rho.norm()));
    CHECK((d - d.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("column-stacking vectorization") {
  CMatrix m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;
  const CVector v = vec(m);
  CHECK(v(1) == cplx(3.0));
  CHECK(v(2) == cplx(2.0));
  CHECK(unvec(v, 2) == m);
  CHECK_THROWS_AS(unvec(v, 3), Error);
}

TEST_CASE("materialized generator matches apply") {
  std::mt19937_64 rng(13);
  const SystemParams p = random_params(rng, 12);
  const Superoperator l = build_superoperator(p);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix rho = testing::random_hermitian_density(12, rng);
    const CMatrix via_matrix = unvec(l.multiply(vec(rho)), 12);
    worst = std::max(worst, (via_matrix - qvdp::apply(p, rho)).cwiseAbs().maxCoeff());
    const CMatrix h = via_matrix - via_matrix.adjoint();
    CHECK(h.cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(worst < 1e-12);

  const SystemParams q = random_params(rng, 6);
  const CMatrix oracle = testing::dense_generator_oracle(q);
  CHECK((build_superoperator(q).to_dense() - oracle).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("damped oscillator spectrum") {
  SystemParams p;
  p.delta = 10;
  p.kappa = 0.1;
  p.gain = 0;
  p.eta = 0;
  p.dim = 10;
  const auto numeric = testing::eigen_eigenvalues(build_superoperator(p).to_dense());
  // Truncation keeps the ladder exact: sector m has -kappa(nu + |m|/2) - i m delta
  // for nu = 0 .. dim-1-|m|.
  std::vector<cplx> analytic;
  for (int m = -(p.dim - 1); m <= p.dim - 1; ++m) {
    for (int nu = 0; nu < p.dim - std::abs(m); ++nu) {
      analytic.emplace_back(-p.kappa * (nu + std::abs(m) / 2.0), -m * p.delta);
    }
  }
  CHECK(testing::multiset_distance(numeric, analytic) < 1e-8);
}

TEST_CASE("sideband blocks") {
  SystemParams p;
  p.delta = 10;
  p.kappa = 0.3;
  p.gain = 1.0;
  p.eta = 0.2;
  p.dim = 10;
  const auto blocks = sector_blocks(p);
  REQUIRE(blocks.size() == 19);
  std::vector<cplx> all;
  for (const auto& b : blocks) {
    CHECK(b.matrix.rows() == p.dim - std::abs(b.m));
    for (const cplx l : testing::eigen_eigenvalues(b.matrix)) all.push_back(l);
  }
  const auto full = testing::eigen_eigenvalues(testing::dense_generator_oracle(p));
  CHECK(testing::multiset_distance(all, full) < 1e-8);

  const auto& m0 = blocks[p.dim - 1];
  REQUIRE(m0.m == 0);
  int zeros = 0;
  for (const cplx l : testing::eigen_eigenvalues(m0.matrix)) zeros += std::abs(l) < 1e-8;
  CHECK(zeros == 1);

  SystemParams still = p;
  still.delta = 0;
  const auto& m1 = blocks[p.dim];
  const auto& m1_still = sector_blocks(still)[p.dim];
  REQUIRE(m1.m == 1);
  CHECK((m1.matrix - m1_still.matrix - cplx(0, -10) * CMatrix::Identity(9, 9)).norm() == 0.0);
  auto shifted = testing::eigen_eigenvalues(m1_still.matrix);
  for (auto& l : shifted) l += cplx(0, -10);
  CHECK(testing::multiset_distance(testing::eigen_eigenvalues(m1.matrix), shifted) < 1e-10);

  p.eps = 0.1;
  CHECK_THROWS_AS(sector_blocks(p), Error);
}

TEST_CASE("spectral structure at random points") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 4; ++trial) {
    SystemParams p = random_params(rng, 14);
    p.gain = std::min(p.gain, p.kappa + 0.2);
    const auto ev = testing::eigen_eigenvalues(build_superoperator(p).to_dense());
    int zeros = 0;
    double max_re = -INFINITY;
    for (const cplx l : ev) {
      zeros += std::abs(l) < 1e-8;
      max_re = std::max(max_re, l.real());
    }
    CHECK(zeros == 1);
    CHECK(max_re <= 1e-8);
    std::vector<cplx> conj;
    for (const cplx l : ev) conj.push_back(std::conj(l));
    CHECK(testing::multiset_distance(ev, conj) < 1e-8);
  }
}

TEST_CASE("budgets and export") {
  SystemParams p;
  p.dim = 3;
  SuperoperatorOptions tiny;
  tiny.dense_dim_limit = 2;
  const Superoperator l = build_superoperator(p, tiny);
  try {
    l.to_dense();
    FAIL("expected budget error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::budget_exceeded);
  }
  SuperoperatorOptions few;
  few.max_nonzeros = 5;
  CHECK_THROWS_AS(build_superoperator(p, few), Error);

  std::ostringstream os;
  build_superoperator(p).write_coordinates(os);
  std::istringstream in(os.str());
  const CMatrix dense = build_superoperator(p).to_dense();
  int row, col, lines = 0;
  double re, im;
  while (in >> row >> col >> re >> im) {
    CHECK(dense(row, col) == cplx(re, im));
    ++lines;
  }
  CHECK(lines == build_superoperator(p).matrix().nonZeros());
}
