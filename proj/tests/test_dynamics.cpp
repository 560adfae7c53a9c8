#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qvdp/classical.hpp"
#include "qvdp/dynamics.hpp"
#include "qvdp/error.hpp"
#include "qvdp/husimi.hpp"
#include "qvdp/liouvillian.hpp"
#include "qvdp/steady.hpp"
#include "support.hpp"

using namespace qvdp;

TEST_CASE("pure damping of one photon") {
  SystemParams p;
  p.gain = 0;
  p.eta = 0;
  p.dim = 6;
  const auto times = uniform_times(0.0, 50.0, 501);
  const auto rec = evolve(p, fock_state(1, 6), times);
  double worst = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    worst = std::max(worst, std::abs(rec.n_photon[i] - std::exp(-p.kappa * times[i])));
  }
  CHECK(worst < 1e-6);
  CHECK(rec.times.size() == rec.purity.size());
  CHECK(rec.q_max.empty());
}

TEST_CASE("thermal relaxation follows the rate equation") {
  SystemParams p;
  p.delta = 3.0;
  p.kappa = 1.0;
  p.gain = 0.5;
  p.eta = 0.0;
  p.dim = 50;
  const auto times = uniform_times(0.0, 20.0, 201);
  const auto rec = evolve(p, fock_state(0, p.dim), times);

  // dN/dt = gain (N + 1) - kappa N by classic RK4 at a fixed small step.
  auto f = [&](double n) { return p.gain * (n + 1.0) - p.kappa * n; };
  double n = 0.0, worst = 0.0, worst_closed = 0.0;
  const double h = 1e-3;
  const double nbar = p.gain / (p.kappa - p.gain);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0) {
      for (int s = 0; s < 100; ++s) {
        const double k1 = f(n), k2 = f(n + 0.5 * h * k1), k3 = f(n + 0.5 * h * k2),
                     k4 = f(n + h * k3);
        n += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
      }
    }
    worst = std::max(worst, std::abs(rec.n_photon[i] - n));
    const double closed = nbar * (1.0 - std::exp(-(p.kappa - p.gain) * times[i]));
    worst_closed = std::max(worst_closed, std::abs(rec.n_photon[i] - closed));
  }
  CHECK(worst < 1e-5);
  CHECK(worst_closed < 1e-5);
}

TEST_CASE("finite differences converge linearly to the generator") {
  std::mt19937_64 rng(31);
  SystemParams p;
  p.delta = 2.0;
  p.kappa = 0.3;
  p.gain = 0.4;
  p.eta = 0.2;
  p.eps = 0.7;
  p.dim = 8;
  const DensityMatrix rho0{testing::random_hermitian_density(p.dim, rng)};
  const CMatrix exact = qvdp::apply(p, rho0.m);
  EvolveOptions eo;
  eo.ode.rtol = 1e-13;
  eo.ode.atol = 1e-15;
  auto fd_error = [&](double h) {
    const auto rec = evolve(p, rho0, {0.0, h}, eo);
    return ((rec.final_state.m - rho0.m) / h - exact).norm();
  };
  const double e1 = fd_error(1e-3);
  const double e2 = fd_error(5e-4);
  CHECK(e2 < e1);
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("purity stays within its bounds") {
  const auto p = testing::paper_rates(0.05, 2.0);
  const auto rec = evolve(p, fock_state(0, p.dim), uniform_times(0.0, 5.0, 251));
  for (const double pur : rec.purity) {
    CHECK(pur <= 1.0 + 1e-12);
    CHECK(pur >= 1.0 / p.dim);
  }
  for (const double e : rec.trace_err) CHECK(e < 1e-10);
}

TEST_CASE("quantum mean amplitude tracks the classical flow at early times") {
  const auto p = testing::paper_rates(0.05, 2.0);
  const auto times = uniform_times(0.0, 1.0, 101);
  const auto rec = evolve(p, fock_state(0, p.dim), times);
  const auto cl = integrate(rec.a_mean.front(), p, times);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    scale = std::max(scale, std::abs(cl[i].alpha));
    if (i > 0) worst = std::max(worst, std::abs(rec.a_mean[i] - cl[i].alpha) / scale);
  }
  CHECK(worst < 0.05);
}

TEST_CASE("evolve input checks") {
  SystemParams p;
  p.dim = 4;
  CHECK_THROWS_AS(evolve(p, fock_state(0, 5), {0.0, 1.0}), Error);
  CHECK_THROWS_AS(evolve(p, fock_state(0, 4), {1.0, 0.5}), Error);
  CHECK_THROWS_AS(evolve(p, DensityMatrix{2.0 * fock_state(0, 4).m}, {0.0, 1.0}), Error);
  EvolveOptions strict;
  strict.trace_tolerance = 0.0;
  p.eps = 0.5;
  try {
    evolve(p, fock_state(0, 4), {0.0, 5.0}, strict);
    FAIL("expected a trace drift error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::trace_drift);
  }
}

TEST_CASE("hermitized stepping keeps the trace pinned") {
  const auto p = testing::paper_rates(0.1, 2.0);
  EvolveOptions eo;
  eo.hermitize_each_step = true;
  const auto rec = evolve(p, fock_state(0, p.dim), uniform_times(0.0, 2.0, 21), eo);
  for (const double e : rec.trace_err) CHECK(e < 1e-13);
  const auto plain = evolve(p, fock_state(0, p.dim), uniform_times(0.0, 2.0, 21));
  CHECK(std::abs(rec.n_photon.back() - plain.n_photon.back()) < 1e-6);
}

TEST_CASE("purity plateau") {
  EvolutionRecord r;
  r.times = uniform_times(0.0, 20.0, 2001);
  r.purity.assign(r.times.size(), 0.37);
  CHECK(purity_plateau(r, 10.0, 0.6) == doctest::Approx(0.37));
  CHECK_THROWS_AS(purity_plateau(r, 19.9, 1.0), Error);

  SystemParams still;
  still.kappa = 0;
  still.gain = 0;
  still.eta = 0;
  still.dim = 5;
  const auto rec = evolve(still, fock_state(0, 5), uniform_times(0.0, 12.0, 121));
  CHECK(purity_plateau(rec, 10.0, 2.0 * std::numbers::pi / 10.0) == doctest::Approx(1.0));
}

TEST_CASE("oscillation period of a synthetic signal") {
  const auto t = uniform_times(0.0, 20.0, 4001);
  std::vector<double> v;
  for (const double x : t) v.push_back(0.3 * x + std::sin(2.0 * std::numbers::pi * x / 0.7));
  const auto period = oscillation_period(t, v, 2.0, 18.0);
  REQUIRE(period.has_value());
  CHECK(*period == doctest::Approx(0.7).epsilon(1e-3));
  CHECK_FALSE(oscillation_period(t, std::vector<double>(t.size(), 1.0), 0.0, 20.0).has_value());
}

TEST_CASE("Husimi closed forms") {
  const DensityMatrix vac = fock_state(0, 30);
  CHECK(husimi_at(vac, 0.0) == doctest::Approx(1.0));
  const cplx beta(1.2, -0.7);
  const DensityMatrix coh = coherent_state(beta, 40);
  const DensityMatrix mix = diagonal_state(std::vector<double>{0.5, 0.5});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const cplx a(u(rng), u(rng));
    const double r2 = std::norm(a);
    CHECK(std::abs(husimi_at(vac, a) - std::exp(-r2)) < 1e-12);
    CHECK(std::abs(husimi_at(coh, a) - std::exp(-std::norm(a - beta))) < 1e-10);
    CHECK(std::abs(husimi_at(mix, a) - std::exp(-r2) * (1.0 + r2) / 2.0) < 1e-12);
  }
  // Large amplitudes take the logarithmic branch.
  const DensityMatrix far = coherent_state(cplx(26.0, 0.0), 900);
  CHECK(husimi_at(far, cplx(26.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(husimi_at(far, cplx(25.0, 1.0)) == doctest::Approx(std::exp(-2.0)).epsilon(1e-8));

  const QGrid grid = husimi(mix, GridSpec{61, 3.0, {}});
  for (Eigen::Index i = 0; i < grid.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < grid.values.cols(); ++j) {
      const double r2 = grid.re_axis[i] * grid.re_axis[i] + grid.im_axis[j] * grid.im_axis[j];
      CHECK(std::abs(grid.values(i, j) - std::exp(-r2) * (1.0 + r2) / 2.0) < 1e-12);
    }
  }
}

TEST_CASE("Husimi grid normalization") {
  const DensityMatrix coh = coherent_state(cplx(2.0, 1.0), 40);
  const QGrid g = husimi(coh);
  CHECK(g.re_axis.size() == 201);
  CHECK(g.normalization() == doctest::Approx(1.0).epsilon(0.01));
  CHECK(g.values.minCoeff() >= 0.0);
}

TEST_CASE("q_max of simple states") {
  CHECK(q_max(fock_state(0, 20)).value == doctest::Approx(1.0).epsilon(1e-9));
  const QMax c = q_max(coherent_state(cplx(1.3, 2.1), 50), GridSpec{41, 0.0, {}});
  CHECK(c.value == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(std::abs(c.argmax - cplx(1.3, 2.1)) < 0.02);
  // e^{-x}(1 + x)/2 decreases in x = |alpha|^2, so the peak is the origin
  const QMax m = q_max(diagonal_state(std::vector<double>{0.5, 0.5}), GridSpec{41, 3.0, {}});
  CHECK(m.value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(m.argmax) < 1e-12);
}

TEST_CASE("oscillating-phase steady state has a ring-shaped Husimi") {
  const auto p = testing::paper_rates(0.01, 2.0);
  const SteadyState ss = steady_state(build_superoperator(p));
  const QMax m = q_max(ss.rho, GridSpec{101, 0.0, {}});
  const double r_cycle = std::sqrt((p.gain - p.kappa) / (2.0 * p.eta));
  CHECK(m.value < 0.5);
  CHECK(std::abs(m.argmax) > 0.5 * r_cycle);
  // The density is spread evenly along the classical cycle and empty at
  // its centre.
  const LimitCycle lc = limit_cycle(p);
  for (std::size_t i = 0; i < lc.points.size(); i += 16) {
    CHECK(husimi_at(ss.rho, lc.points[i].alpha) > 0.8 * m.value);
  }
  CHECK(husimi_at(ss.rho, lc.centroid) < 1e-3 * m.value);
}
