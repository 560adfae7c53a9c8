#include "qvdp/classical.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include <unsupported/Eigen/Polynomials>

#include "qvdp/error.hpp"
#include "qvdp/parallel.hpp"

namespace qvdp {

cplx vdp_rhs(cplx alpha, const SystemParams& p) {
  const cplx linear(-(p.kappa - p.gain) / 2.0, p.delta);
  return linear * alpha - p.eta * std::norm(alpha) * alpha - cplx(0.0, 1.0) * p.eps;
}

double hopf_threshold(const SystemParams& p) {
  const double net = p.gain - p.kappa;
  if (net < 0.0) {
    throw Error(Errc::no_bifurcation, "gain < kappa: the origin never loses stability");
  }
  return std::sqrt(net * (net * net + 4.0 * p.delta * p.delta)) / 4.0;
}

OdeOptions classical_ode_defaults() {
  OdeOptions o;
  o.rtol = 1e-10;
  o.atol = 1e-12;
  return o;
}

namespace {

std::array<cplx, 2> jacobian_eigenvalues(cplx alpha, const SystemParams& p) {
  const cplx linear(-(p.kappa - p.gain) / 2.0, p.delta);
  const cplx dz = linear - 2.0 * p.eta * std::norm(alpha);  // d f / d alpha
  const cplx dzb = -p.eta * alpha * alpha;                   // d f / d conj(alpha)
  const cplx fx = dz + dzb;
  const cplx fy = cplx(0.0, 1.0) * (dz - dzb);
  const double j11 = fx.real(), j12 = fy.real(), j21 = fx.imag(), j22 = fy.imag();
  const double tr = j11 + j22;
  const double det = j11 * j22 - j12 * j21;
  const cplx root = std::sqrt(cplx(tr * tr - 4.0 * det, 0.0));
  return {0.5 * (tr + root), 0.5 * (tr - root)};
}

cplx newton_polish(cplx alpha, const SystemParams& p) {
  const cplx linear(-(p.kappa - p.gain) / 2.0, p.delta);
  for (int it = 0; it < 50; ++it) {
    const cplx f = vdp_rhs(alpha, p);
    if (std::abs(f) < 1e-15 * std::max(1.0, std::abs(p.eps))) break;
    const cplx dz = linear - 2.0 * p.eta * std::norm(alpha);
    const cplx dzb = -p.eta * alpha * alpha;
    // Solve dz d + dzb conj(d) = -f as a real 2x2 system.
    Eigen::Matrix2d j;
    const cplx fx = dz + dzb;
    const cplx fy = cplx(0.0, 1.0) * (dz - dzb);
    j << fx.real(), fy.real(), fx.imag(), fy.imag();
    const Eigen::Vector2d step = j.partialPivLu().solve(Eigen::Vector2d(-f.real(), -f.imag()));
    if (!step.allFinite()) break;
    alpha += cplx(step(0), step(1));
  }
  return alpha;
}

}  // namespace

std::vector<FixedPoint> fixed_points(const SystemParams& p) {
  const double a = 0.5 * (p.gain - p.kappa);
  const cplx linear(a, p.delta);
  const double e2 = std::norm(p.eps);
  std::vector<double> occupations;
  if (e2 == 0.0) {
    occupations.push_back(0.0);
  } else if (p.eta == 0.0) {
    if (std::abs(linear) == 0.0) throw Error(Errc::no_convergence, "no fixed point: zero linear rate with drive");
    occupations.push_back(e2 / std::norm(linear));
  } else {
    Eigen::Matrix<double, 4, 1> coeffs(-e2, a * a + p.delta * p.delta, -2.0 * a * p.eta,
                                       p.eta * p.eta);
    Eigen::PolynomialSolver<double, 3> solver(coeffs);
    std::vector<double> roots;
    solver.realRoots(roots, 1e-9);
    for (double n : roots) {
      if (n > 0.0) occupations.push_back(n);
    }
    if (occupations.empty()) {
      throw Error(Errc::no_convergence, "fixed point cubic has no positive root");
    }
  }

  std::vector<FixedPoint> out;
  for (const double n : occupations) {
    cplx alpha = (e2 == 0.0) ? cplx(0.0, 0.0) : cplx(0.0, 1.0) * p.eps / (linear - p.eta * n);
    alpha = newton_polish(alpha, p);
    if (std::abs(vdp_rhs(alpha, p)) > 1e-8 * std::max(1.0, std::abs(p.eps))) {
      throw Error(Errc::no_convergence, "Newton polish of fixed point did not converge");
    }
    bool duplicate = false;
    for (const auto& fp : out) {
      if (std::abs(fp.alpha - alpha) < 1e-9 * std::max(1.0, std::abs(alpha))) duplicate = true;
    }
    if (duplicate) continue;
    FixedPoint fp;
    fp.alpha = alpha;
    fp.jacobian_eigenvalues = jacobian_eigenvalues(alpha, p);
    fp.stable = fp.jacobian_eigenvalues[0].real() < 0.0 && fp.jacobian_eigenvalues[1].real() < 0.0;
    out.push_back(fp);
  }
  return out;
}

FixedPoint fixed_point(const SystemParams& p) {
  const auto all = fixed_points(p);
  const FixedPoint* best = nullptr;
  for (const auto& fp : all) {
    if (fp.stable && (!best || std::abs(fp.alpha) > std::abs(best->alpha))) best = &fp;
  }
  if (best) return *best;
  return all.front();
}

std::vector<ClassicalState> integrate(cplx alpha0, const SystemParams& p,
                                      const std::vector<double>& t_grid, const OdeOptions& opts) {
  auto rhs = [&p](double, cplx a) { return vdp_rhs(a, p); };
  auto stepper = make_dormand_prince<cplx>(rhs, opts);
  std::vector<ClassicalState> out;
  out.reserve(t_grid.size());
  double t = t_grid.empty() ? 0.0 : std::min(0.0, t_grid.front());
  cplx y = alpha0;
  for (const double t_out : t_grid) {
    stepper.advance(t, y, t_out);
    out.push_back({y, t_out});
  }
  return out;
}

cplx propagate(cplx alpha0, const SystemParams& p, double duration, const OdeOptions& opts) {
  if (duration <= 0.0) return alpha0;
  auto rhs = [&p](double, cplx a) { return vdp_rhs(a, p); };
  auto stepper = make_dormand_prince<cplx>(rhs, opts);
  double t = 0.0;
  cplx y = alpha0;
  stepper.advance(t, y, duration);
  return y;
}

namespace {

struct Crossing {
  double t = 0.0;
  cplx alpha;
};

class SectionTracker {
 public:
  SectionTracker(const SystemParams& p, const OdeOptions& ode, cplx center, double angle, double dt)
      : p_(p), ode_(ode), center_(center), rot_(std::polar(1.0, -angle)), dt_(dt) {}

  double g(cplx a) const { return ((a - center_) * rot_).imag(); }
  double along(cplx a) const { return ((a - center_) * rot_).real(); }

  // Integrates from (t, alpha) until the next crossing of the ray in the
  // requested orientation (+1: g increasing); orientation 0 accepts either
  // and is set to the one found.
  std::optional<Crossing> next(double& t, cplx& alpha, int& orientation, double horizon) const {
    auto rhs = [this](double, cplx a) { return vdp_rhs(a, p_); };
    auto stepper = make_dormand_prince<cplx>(rhs, ode_);
    const double t_stop = t + horizon;
    while (t < t_stop) {
      const double t0 = t;
      const cplx a0 = alpha;
      stepper.advance(t, alpha, t0 + dt_);
      const double g0 = g(a0);
      const double g1 = g(alpha);
      const bool up = g0 < 0.0 && g1 >= 0.0;
      const bool down = g0 > 0.0 && g1 <= 0.0;
      if (!(up || down)) continue;
      const int dir = up ? 1 : -1;
      if (orientation != 0 && dir != orientation) continue;
      // Locate the root by Illinois false position on the flow.
      double lo = 0.0, hi = dt_;
      double flo = g0, fhi = g1;
      cplx a_root = alpha;
      double tau = hi;
      int side = 0;
      for (int it = 0; it < 100; ++it) {
        tau = (lo * fhi - hi * flo) / (fhi - flo);
        a_root = propagate(a0, p_, tau, ode_);
        const double f = g(a_root);
        if (std::abs(f) <= 1e-14 * (1.0 + std::abs(along(a_root))) || hi - lo < 1e-15 * dt_) break;
        if ((f < 0.0) == (flo < 0.0)) {
          lo = tau;
          flo = f;
          if (side == -1) fhi *= 0.5;
          side = -1;
        } else {
          hi = tau;
          fhi = f;
          if (side == 1) flo *= 0.5;
          side = 1;
        }
      }
      if (along(a_root) <= 0.0) continue;
      orientation = dir;
      return Crossing{t0 + tau, a_root};
    }
    return std::nullopt;
  }

 private:
  const SystemParams& p_;
  OdeOptions ode_;
  cplx center_;
  cplx rot_;
  double dt_;
};

}  // namespace

LimitCycle limit_cycle(const SystemParams& p, const LimitCycleOptions& opts) {
  p.validate();
  const double net = p.gain - p.kappa;
  if (!(net > 0.0) || !(p.eta > 0.0)) {
    throw Error(Errc::not_in_limit_cycle, "limit cycles need gain > kappa and eta > 0");
  }
  const double r_est = std::sqrt(net / (2.0 * p.eta));
  const double t_burn = opts.t_burn > 0.0 ? opts.t_burn : 20.0 / net;
  const double omega = std::max(std::abs(p.delta), 1e-3);
  const double t_rot = 2.0 * M_PI / omega;

  cplx alpha = fixed_point(p).alpha + r_est;
  alpha = propagate(alpha, p, t_burn, opts.ode);

  // Running centroid over a window of rotations.
  const int window_samples = 400;
  const double window = 8.0 * t_rot;
  std::vector<double> window_grid(window_samples);
  for (int i = 0; i < window_samples; ++i) window_grid[i] = window * (i + 1) / window_samples;
  auto window_pts = integrate(alpha, p, window_grid, opts.ode);
  cplx centroid = 0.0;
  double spread = 0.0;
  for (const auto& s : window_pts) centroid += s.alpha;
  centroid /= static_cast<double>(window_pts.size());
  for (const auto& s : window_pts) spread = std::max(spread, std::abs(s.alpha - centroid));
  alpha = window_pts.back().alpha;
  if (spread < 1e-6 * (1.0 + std::abs(centroid))) {
    throw Error(Errc::not_in_limit_cycle, "trajectory settled on a fixed point");
  }

  SectionTracker tracker(p, opts.ode, centroid, opts.section_angle, t_rot / 256.0);
  int orientation = 0;
  double t = 0.0;
  const double horizon = 50.0 * t_rot + 200.0 / net;
  auto first = tracker.next(t, alpha, orientation, horizon);
  if (!first) throw Error(Errc::not_in_limit_cycle, "no Poincare crossings within horizon");

  double period = 0.0;
  cplx x_cross = first->alpha;
  double t_prev = first->t;
  bool closed = false;
  for (int k = 0; k < opts.max_periods; ++k) {
    auto c = tracker.next(t, alpha, orientation, horizon);
    if (!c) throw Error(Errc::not_in_limit_cycle, "Poincare crossings stopped");
    const double new_period = c->t - t_prev;
    const double scale = std::max(std::abs(c->alpha), std::abs(x_cross));
    const bool close = std::abs(c->alpha - x_cross) < opts.closure_tol * scale;
    const bool steady = std::abs(new_period - period) < 1e-9 * new_period;
    period = new_period;
    x_cross = c->alpha;
    t_prev = c->t;
    if (close && steady) {
      closed = true;
      break;
    }
  }
  if (!closed) throw Error(Errc::no_convergence, "limit cycle did not close");
  if (std::abs(x_cross - centroid) < 1e-6 * (1.0 + r_est)) {
    throw Error(Errc::not_in_limit_cycle, "orbit collapsed onto the section center");
  }

  // Floquet multiplier of the first-return map along the section ray.
  {
    const double delta = 1e-5 * std::abs(x_cross - centroid);
    const cplx dir = (x_cross - centroid) / std::abs(x_cross - centroid);
    cplx perturbed = x_cross + delta * dir;
    double tp = 0.0;
    // Leave the section before looking for the return.
    perturbed = propagate(perturbed, p, 0.25 * period, opts.ode);
    tp = 0.25 * period;
    int orient = orientation;
    auto ret = tracker.next(tp, perturbed, orient, 4.0 * period);
    if (!ret) throw Error(Errc::not_in_limit_cycle, "perturbed orbit did not return");
    const double mult = (tracker.along(ret->alpha) - tracker.along(x_cross)) / delta;
    if (!(std::abs(mult) < 1.0)) {
      throw Error(Errc::not_in_limit_cycle, "cycle is not attracting (multiplier " +
                                                std::to_string(mult) + ")");
    }
    LimitCycle lc;
    lc.floquet_multiplier = mult;
    lc.period = period;
    lc.freq = 2.0 * M_PI / period;
    const int ns = std::max(8, opts.samples);
    std::vector<double> grid(ns);
    for (int i = 0; i < ns; ++i) grid[i] = period * i / ns;
    lc.points = integrate(x_cross, p, grid, opts.ode);
    cplx c = 0.0;
    for (const auto& s : lc.points) c += s.alpha;
    lc.centroid = c / static_cast<double>(ns);
    double r = 0.0;
    for (const auto& s : lc.points) r += std::abs(s.alpha - lc.centroid);
    lc.mean_radius = r / ns;
    return lc;
  }
}

double distance_to_cycle(const LimitCycle& cycle, cplx alpha) {
  const auto& pts = cycle.points;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const cplx a = pts[i].alpha;
    const cplx b = pts[(i + 1) % pts.size()].alpha;
    const cplx ab = b - a;
    const double len2 = std::norm(ab);
    double s = len2 > 0.0 ? ((alpha - a) * std::conj(ab)).real() / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    best = std::min(best, std::abs(alpha - (a + s * ab)));
  }
  return best;
}

double occupied_arc(const LimitCycle& cycle, const std::vector<cplx>& samples) {
  if (samples.empty()) return 0.0;
  std::vector<double> ang;
  ang.reserve(samples.size());
  for (const cplx s : samples) ang.push_back(std::arg(s - cycle.centroid));
  std::sort(ang.begin(), ang.end());
  double largest_gap = ang.front() + 2.0 * M_PI - ang.back();
  for (std::size_t i = 1; i < ang.size(); ++i) largest_gap = std::max(largest_gap, ang[i] - ang[i - 1]);
  return 2.0 * M_PI - largest_gap;
}

cplx sample_vacuum(std::uint64_t seed, std::uint64_t index, double sigma) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 gen(seq);
  // 53-bit uniforms; u1 in (0, 1] keeps the logarithm finite.
  const double u1 = (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  const double r = sigma * std::sqrt(-2.0 * std::log(u1));
  return std::polar(r, 2.0 * M_PI * u2);
}

ClassicalEnsemble mc_ensemble(const SystemParams& p, int n_traj, std::uint64_t seed,
                              double t_query, const EnsembleOptions& opts) {
  if (n_traj < 1) throw Error(Errc::invalid_parameter, "n_traj must be >= 1");
  ClassicalEnsemble e;
  e.seed = seed;
  e.n_traj = n_traj;
  e.t_query = t_query;
  e.initial.resize(n_traj);
  e.samples_t.resize(n_traj);
  parallel_for(static_cast<std::size_t>(n_traj), opts.workers, [&](std::size_t i) {
    const cplx a0 = sample_vacuum(seed, i, opts.sigma);
    e.initial[i] = a0;
    e.samples_t[i] = propagate(a0, p, t_query, opts.ode);
  });
  return e;
}

QGrid classical_husimi(const ClassicalEnsemble& ensemble, const GridSpec& spec) {
  GridSpec s = spec;
  const auto& pts = ensemble.samples_t;
  if (!(s.radius > 0.0)) {
    double m2 = 0.0;
    for (const cplx a : pts) m2 += std::norm(a);
    m2 /= std::max<std::size_t>(1, pts.size());
    s.radius = 1.5 * std::sqrt(m2) + 4.0;
  }
  QGrid g = make_grid(s);
  if (pts.empty()) return g;
  // exp(-|alpha - alpha_i|^2) factorizes over the two quadratures.
  const Eigen::Index np = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd gx(np, s.n), gy(np, s.n);
  for (Eigen::Index i = 0; i < np; ++i) {
    for (int k = 0; k < s.n; ++k) {
      const double dx = g.re_axis[k] - pts[i].real();
      const double dy = g.im_axis[k] - pts[i].imag();
      gx(i, k) = std::exp(-dx * dx);
      gy(i, k) = std::exp(-dy * dy);
    }
  }
  g.values = (gx.transpose() * gy) / static_cast<double>(np);
  return g;
}

PhaseMap phase_map(const SystemParams& p, const std::vector<double>& re0,
                   const std::vector<double>& im0, double t_query, const PhaseMapOptions& opts) {
  const LimitCycle cycle = limit_cycle(p, opts.cycle);
  PhaseMap pm;
  pm.re0 = re0;
  pm.im0 = im0;
  pm.centroid = cycle.centroid;
  pm.r_cycle = cycle.mean_radius;
  const Eigen::Index nr = static_cast<Eigen::Index>(re0.size());
  const Eigen::Index ni = static_cast<Eigen::Index>(im0.size());
  pm.phase = Eigen::MatrixXd::Zero(nr, ni);
  pm.singular = Eigen::MatrixXi::Zero(nr, ni);
  parallel_for(static_cast<std::size_t>(nr * ni), opts.workers, [&](std::size_t idx) {
    const Eigen::Index i = static_cast<Eigen::Index>(idx) / ni;
    const Eigen::Index j = static_cast<Eigen::Index>(idx) % ni;
    const cplx end = propagate(cplx(re0[i], im0[j]), p, t_query, opts.cycle.ode);
    const cplx rel = end - cycle.centroid;
    double ph = std::arg(rel);
    if (ph <= -M_PI) ph += 2.0 * M_PI;
    pm.phase(i, j) = ph;
    pm.singular(i, j) = std::abs(rel) < opts.singular_fraction * cycle.mean_radius ? 1 : 0;
  });
  return pm;
}

}  // namespace qvdp
