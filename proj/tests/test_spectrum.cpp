#include <doctest.h>

#include <random>

#include "qvdp/error.hpp"
#include "qvdp/husimi.hpp"
#include "qvdp/classical.hpp"
#include "qvdp/spectrum.hpp"
#include "qvdp/steady.hpp"
#include "support.hpp"

using namespace qvdp;

namespace {

SystemParams damped(int dim) {
  SystemParams p;
  p.delta = 10;
  p.kappa = 0.1;
  p.gain = 0;
  p.eta = 0;
  p.dim = dim;
  return p;
}

}  // namespace

TEST_CASE("gaps from a synthetic eigenvalue list") {
  const std::vector<cplx> ev{0.0, -0.5, cplx(-0.2, 3), cplx(-0.2, -3)};
  const SpectrumResult s = analyze_spectrum(ev, 1e-6, 1e-9, false);
  CHECK(s.gap1 == doctest::Approx(0.2));
  CHECK(s.gap2 == doctest::Approx(0.5));
  CHECK(s.osc_freq == doctest::Approx(3.0));
  CHECK(s.null_count == 1);
  CHECK(s.eigenvalues.front() == cplx(0.0));

  std::vector<cplx> flipped;
  for (const cplx l : ev) flipped.push_back(std::conj(l));
  const SpectrumResult f = analyze_spectrum(flipped, 1e-6, 1e-9, false);
  CHECK(f.gap1 == s.gap1);
  CHECK(f.gap2 == s.gap2);
  CHECK(f.osc_freq == s.osc_freq);
}

TEST_CASE("metastability ratio definition") {
  const SpectrumResult s = analyze_spectrum({0.0, -0.01, -0.011, -1.0}, 1e-6, 1e-9, false);
  REQUIRE(s.metastability_ratio.has_value());
  CHECK(*s.metastability_ratio == doctest::Approx(1.0 / 0.011));
  CHECK(metastability_ratio(s) == doctest::Approx(90.909090909));
  const SpectrumResult short_list = analyze_spectrum({0.0, -0.1, -0.2}, 1e-6, 1e-9, false);
  CHECK_FALSE(short_list.metastability_ratio.has_value());
  CHECK_THROWS_AS(metastability_ratio(short_list), Error);
}

TEST_CASE("damped oscillator gaps from the dense spectrum") {
  const SystemParams p = damped(10);
  const SpectrumResult s = full_spectrum(build_superoperator(p));
  CHECK(s.eigenvalues.size() == 100);
  CHECK_FALSE(s.partial);
  CHECK(std::abs(s.gap1 - 0.05) < 1e-8);
  CHECK(std::abs(s.gap2 - 0.1) < 1e-8);
  CHECK(std::abs(s.osc_freq - 10.0) < 1e-8);
  REQUIRE(s.metastability_ratio.has_value());
  CHECK(*s.metastability_ratio <= 2.0 + 1e-8);

  const auto oracle = testing::eigen_eigenvalues(build_superoperator(p).to_dense());
  CHECK(testing::multiset_distance(s.eigenvalues, oracle) < 1e-8);
}

TEST_CASE("sector reassembly in the limit-cycle regime") {
  SystemParams p;
  p.eta = 0.2;
  p.dim = 14;
  const SpectrumResult dense = full_spectrum(build_superoperator(p));
  CHECK(testing::multiset_distance(sector_spectrum(p), dense.eigenvalues) < 1e-8);
}

TEST_CASE("rightmost eigenvalues agree with the dense oracle") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    SystemParams p;
    p.delta = 2.0 + 10.0 * u(rng);
    p.kappa = 0.05 + 0.5 * u(rng);
    p.gain = 1.2 * u(rng);
    p.eta = 0.1 + 0.4 * u(rng);
    p.eps = 2.0 * u(rng);
    p.dim = 20;
    const Superoperator l = build_superoperator(p);
    const SpectrumResult it = rightmost_eigenvalues(l, 10);
    CHECK(it.partial);
    REQUIRE(it.eigenvalues.size() >= 10);
    const auto oracle = testing::eigen_eigenvalues(l.to_dense());
    for (int i = 0; i < 10; ++i) {
      double best = INFINITY;
      for (const cplx o : oracle) best = std::min(best, std::abs(o - it.eigenvalues[i]));
      CHECK(best < 1e-8);
      CHECK(it.eigenvalues[i].real() >= oracle[9].real() - 1e-8);
    }
  }
}

TEST_CASE("the rightmost single eigenvalue is the null eigenvalue") {
  SystemParams p;
  p.eta = 0.2;
  p.eps = 1.0;
  p.dim = 16;
  const SpectrumResult s = rightmost_eigenvalues(build_superoperator(p), 1);
  REQUIRE_FALSE(s.eigenvalues.empty());
  CHECK(std::abs(s.eigenvalues.front()) < 1e-9);
  CHECK(s.partial);
}

TEST_CASE("metastability ratio at the oscillating point") {
  // Dense zgeev value at eta = 0.05, eps*sqrt(eta) = 2, dim 47, frozen.
  const double frozen = 3.843769656416;
  const auto p = testing::paper_rates(0.05, 2.0);
  const SpectrumResult s = rightmost_eigenvalues(build_superoperator(p), 12);
  REQUIRE(s.metastability_ratio.has_value());
  CHECK(*s.metastability_ratio == doctest::Approx(frozen).epsilon(1e-6));
}

TEST_CASE("steady state of pure damping is the vacuum") {
  const SteadyState ss = steady_state(build_superoperator(damped(12)));
  CHECK((ss.rho.m - fock_state(0, 12).m).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(ss.observables.purity == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(ss.residual < 1e-10);
}

TEST_CASE("thermal steady state against the population equations") {
  SystemParams p;
  p.kappa = 1.0;
  p.gain = 0.5;
  p.eta = 0.0;
  p.dim = 60;
  // dp_n/dt = kappa[(n+1)p_{n+1} - n p_n] + gain[n p_{n-1} - (n+1)p_n], with
  // the truncated creation operator annihilating the top level.
  const int d = p.dim;
  Eigen::MatrixXd rate = Eigen::MatrixXd::Zero(d, d);
  for (int n = 0; n < d; ++n) {
    if (n + 1 < d) rate(n, n + 1) += p.kappa * (n + 1);
    rate(n, n) -= p.kappa * n;
    if (n > 0) rate(n, n - 1) += p.gain * n;
    if (n + 1 < d) rate(n, n) -= p.gain * (n + 1);
  }
  rate.row(0).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
  rhs(0) = 1.0;
  const Eigen::VectorXd pops = rate.fullPivLu().solve(rhs);

  const SteadyState ss = steady_state(build_superoperator(p));
  const auto dist = ss.observables.distribution;
  for (int n = 0; n < d; ++n) CHECK(std::abs(dist[n] - pops(n)) < 1e-10);
  CHECK(ss.observables.n_photon == doctest::Approx(1.0).epsilon(1e-10));
  for (int n = 0; n < 20; ++n) CHECK(dist[n] == doctest::Approx(std::pow(0.5, n + 1)).epsilon(1e-8));
}

TEST_CASE("degenerate null space is reported") {
  SystemParams p;
  p.kappa = 0;
  p.gain = 0;
  p.eta = 0;
  p.dim = 6;
  try {
    steady_state(build_superoperator(p));
    FAIL("expected an ambiguity error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ambiguous_steady_state);
  }
}

TEST_CASE("steady state hygiene in the oscillating regime") {
  const auto p = testing::paper_rates(0.1, 2.0);
  const SteadyState ss = steady_state(build_superoperator(p));
  const SteadyObservables& o = ss.observables;
  CHECK(ss.residual < 1e-8);
  CHECK((qvdp::apply(p, ss.rho).m).cwiseAbs().maxCoeff() < 1e-8);
  const auto diag = validate_density(ss.rho);
  CHECK(diag.ok());
  CHECK(diag.min_eigenvalue >= -1e-8);
  CHECK(std::abs(ss.second_eigenvalue) > 1e-9);
  CHECK(o.fluct_eta_sigma == doctest::Approx(p.eta * std::sqrt(o.var_n)));
  CHECK(o.fluct_eta2_var == doctest::Approx(p.eta * p.eta * o.var_n));
  CHECK(o.var_n == doctest::Approx(photon_var(ss.rho)));
}

TEST_CASE("steady Husimi shape: ring versus single peak") {
  const auto ring_p = testing::paper_rates(0.05, 3.2, 60);
  const SteadyState ring = steady_state(build_superoperator(ring_p));
  const QMax ring_max = q_max(ring.rho, GridSpec{101, 0.0, {}});
  const double r_cycle = std::sqrt((ring_p.gain - ring_p.kappa) / (2.0 * ring_p.eta));
  CHECK(std::abs(ring_max.argmax) > 0.5 * r_cycle);

  const auto peak_p = testing::paper_rates(0.05, 6.4, 70);
  const SteadyState peak = steady_state(build_superoperator(peak_p));
  const QMax peak_max = q_max(peak.rho, GridSpec{101, 0.0, {}});
  CHECK(std::abs(peak_max.argmax - fixed_point(peak_p).alpha) < 0.5);
}
