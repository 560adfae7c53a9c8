#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include <Eigen/Core>

#include "qvdp/error.hpp"

namespace qvdp {

struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double h_initial = 0.0;  // 0 picks a step from the initial derivative
  double h_min = 1e-14;
  long long max_steps = 50'000'000;
};

namespace ode_detail {

inline double weighted_sq(std::complex<double> e, std::complex<double> y0,
                          std::complex<double> y1, double atol, double rtol) {
  const double sc = atol + rtol * std::max(std::abs(y0), std::abs(y1));
  return std::norm(e) / (sc * sc);
}

inline double error_norm(std::complex<double> e, std::complex<double> y0, std::complex<double> y1,
                         double atol, double rtol) {
  return std::sqrt(weighted_sq(e, y0, y1, atol, rtol));
}

template <class Derived>
double error_norm(const Eigen::MatrixBase<Derived>& e, const Eigen::MatrixBase<Derived>& y0,
                  const Eigen::MatrixBase<Derived>& y1, double atol, double rtol) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < e.cols(); ++j) {
    for (Eigen::Index i = 0; i < e.rows(); ++i) {
      acc += weighted_sq(e(i, j), y0(i, j), y1(i, j), atol, rtol);
    }
  }
  return std::sqrt(acc / static_cast<double>(e.size()));
}

inline double state_norm(std::complex<double> y) { return std::abs(y); }

template <class Derived>
double state_norm(const Eigen::MatrixBase<Derived>& y) {
  return y.norm() / std::sqrt(static_cast<double>(std::max<Eigen::Index>(1, y.size())));
}

}  // namespace ode_detail

/// Dormand-Prince 5(4) with PI step-size control, for any state type with
/// vector-space arithmetic (std::complex<double>, Eigen matrices).
///
/// `rhs(t, y)` returns dy/dt. The stepper carries its step size across
/// calls to `advance`, so integrating a sequence of output times reuses
/// the controller state.
template <class State, class Rhs>
class DormandPrince {
 public:
  DormandPrince(Rhs rhs, OdeOptions opts) : rhs_(std::move(rhs)), opts_(opts) {}

  /// Integrates y from t to t_end in place. Throws Errc::step_underflow.
  void advance(double& t, State& y, double t_end) {
    if (t_end <= t) return;
    if (!have_k1_) {
      k1_ = rhs_(t, y);
      have_k1_ = true;
    }
    if (h_ <= 0.0) h_ = initial_step(y);
    while (t < t_end) {
      if (++steps_ > opts_.max_steps) {
        throw Error(Errc::step_underflow, "maximum number of steps exceeded");
      }
      double h = std::min(h_, t_end - t);
      const bool last = (h == t_end - t);
      State y_new, err;
      step(t, y, h, y_new, err);
      const double en = ode_detail::error_norm(err, y, y_new, opts_.atol, opts_.rtol);
      if (en <= 1.0 || h <= opts_.h_min) {
        if (h <= opts_.h_min && en > 1.0) {
          std::ostringstream os;
          os << "step size " << h << " below minimum at t=" << t;
          throw Error(Errc::step_underflow, os.str());
        }
        t = last ? t_end : t + h;
        y = std::move(y_new);
        k1_ = k7_;  // FSAL
        // PI controller (Hairer-Wanner), exponents 0.7/5 and 0.4/5.
        const double e = std::max(en, 1e-10);
        double factor = 0.9 * std::pow(e, -0.14) * std::pow(err_prev_, 0.08);
        factor = std::clamp(factor, 0.2, 5.0);
        if (rejected_) factor = std::min(factor, 1.0);
        if (!last || h == h_) h_ = h * factor;
        err_prev_ = std::max(en, 1e-4);
        rejected_ = false;
        ++accepted_;
      } else {
        const double factor = std::max(0.2, 0.9 * std::pow(en, -0.2));
        h_ = h * factor;
        rejected_ = true;
      }
    }
  }

  /// Replaces the state between `advance` calls (e.g. after projecting it);
  /// the cached derivative is recomputed on the next step.
  void invalidate() { have_k1_ = false; }

  long long accepted_steps() const { return accepted_; }
  double step_size() const { return h_; }

 private:
  double initial_step(const State& y) const {
    if (opts_.h_initial > 0.0) return opts_.h_initial;
    const double d0 = ode_detail::state_norm(y);
    const double d1 = ode_detail::state_norm(k1_);
    const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    return std::max(h0, 10 * opts_.h_min);
  }

  void step(double t, const State& y, double h, State& y_new, State& err) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const State k2 = rhs_(t + c2 * h, State(y + h * (a21 * k1_)));
    const State k3 = rhs_(t + c3 * h, State(y + h * (a31 * k1_ + a32 * k2)));
    const State k4 = rhs_(t + c4 * h, State(y + h * (a41 * k1_ + a42 * k2 + a43 * k3)));
    const State k5 =
        rhs_(t + c5 * h, State(y + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4)));
    const State k6 =
        rhs_(t + h, State(y + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    y_new = y + h * (b1 * k1_ + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7_ = rhs_(t + h, y_new);
    err = h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7_);
  }

  Rhs rhs_;
  OdeOptions opts_;
  State k1_{};
  State k7_{};
  bool have_k1_ = false;
  bool rejected_ = false;
  double h_ = 0.0;
  double err_prev_ = 1e-4;
  long long steps_ = 0;
  long long accepted_ = 0;
};

template <class State, class Rhs>
DormandPrince<State, Rhs> make_dormand_prince(Rhs rhs, OdeOptions opts) {
  return DormandPrince<State, Rhs>(std::move(rhs), opts);
}

}  // namespace qvdp
