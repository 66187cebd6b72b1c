// Adaptive Dormand-Prince 5(4) stepping along parametrized curves in the
// z-plane. State components are complex; the independent variable is the
// curve parameter t in [0,1].
#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "phlab/core.hpp"

namespace phlab {

struct Curve {
  enum class Kind { line, arc };
  Kind kind = Kind::line;
  Complex a{}, b{};              // line endpoints
  Complex center{};              // arc
  double radius = 0.0, th0 = 0.0, th1 = 0.0;

  static Curve line(Complex a, Complex b) {
    Curve c;
    c.kind = Kind::line;
    c.a = a;
    c.b = b;
    return c;
  }
  static Curve arc(Complex center, double radius, double th0, double th1) {
    Curve c;
    c.kind = Kind::arc;
    c.center = center;
    c.radius = radius;
    c.th0 = th0;
    c.th1 = th1;
    return c;
  }

  Complex z(double t) const {
    if (kind == Kind::line) return a + t * (b - a);
    double th = th0 + t * (th1 - th0);
    return center + std::polar(radius, th);
  }
  Complex dz(double t) const {
    if (kind == Kind::line) return b - a;
    double th = th0 + t * (th1 - th0);
    return Complex(0.0, th1 - th0) * std::polar(radius, th);
  }
  double length() const {
    if (kind == Kind::line) return std::abs(b - a);
    return radius * std::abs(th1 - th0);
  }

  // parameters t in (t_from, 1] where the curve crosses |z - c| = r,
  // ascending; at most two entries
  int circle_crossings(Complex c, double r, double t_from,
                       std::array<double, 2>& out) const;
};

constexpr int kMaxDim = 4;
using StateVec = std::array<Complex, kMaxDim>;

struct RkControl {
  double rel = 1e-10;
  double abs = 1e-12;
  double max_arc = 1e30;   // cap on |dz| per step
  double safety = 0.9;
};

enum class LegStatus { done, blown, underflow };

// rhs: (Complex z, const StateVec& y, StateVec& dy) giving d(y)/dz
// on_sample: (double t, Complex z, const StateVec& y) after accepted steps
// blown: (Complex z, const StateVec& y) -> bool, stops the leg when true
template <class RHS, class OnSample, class Blown>
LegStatus integrate_curve_raw(const RHS& rhs, const Curve& curve, int dim,
                              StateVec& y, double& t, const RkControl& ctl,
                              const OnSample& on_sample, const Blown& blown,
                              long* n_acc = nullptr, long* n_rej = nullptr) {
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto f = [&](double tt, const StateVec& yy, StateVec& dy) {
    Complex zz = curve.z(tt);
    Complex zp = curve.dz(tt);
    StateVec g{};
    rhs(zz, yy, g);
    for (int i = 0; i < dim; ++i) dy[i] = zp * g[i];
  };

  StateVec k1{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, yt{}, ynew{};
  f(t, y, k1);

  // initial step from the derivative scale
  double fs = 0.0, ys = 0.0;
  for (int i = 0; i < dim; ++i) {
    fs = std::max(fs, std::abs(k1[i]));
    ys = std::max(ys, std::abs(y[i]));
  }
  double dt = std::min(0.1, 0.01 * (1.0 + ys) / (fs + 1e-30));
  dt = std::min(dt, 1.0 - t);
  double err_old = 1e-4;

  while (t < 1.0) {
    double zp_mag = std::abs(curve.dz(t));
    if (zp_mag > 0.0) dt = std::min(dt, ctl.max_arc / zp_mag);
    if (t + dt > 1.0) dt = 1.0 - t;
    double arc = dt * zp_mag;
    if (arc < 1e-14 * (1.0 + std::abs(curve.z(t))) && dt < 1.0 - t)
      return LegStatus::underflow;

    for (int i = 0; i < dim; ++i) yt[i] = y[i] + dt * a21 * k1[i];
    f(t + c2 * dt, yt, k2);
    for (int i = 0; i < dim; ++i) yt[i] = y[i] + dt * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * dt, yt, k3);
    for (int i = 0; i < dim; ++i)
      yt[i] = y[i] + dt * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * dt, yt, k4);
    for (int i = 0; i < dim; ++i)
      yt[i] = y[i] + dt * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * dt, yt, k5);
    for (int i = 0; i < dim; ++i)
      yt[i] = y[i] + dt * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                           a64 * k4[i] + a65 * k5[i]);
    f(t + dt, yt, k6);
    for (int i = 0; i < dim; ++i)
      ynew[i] = y[i] + dt * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                             b5 * k5[i] + b6 * k6[i]);
    f(t + dt, ynew, k7);

    double err = 0.0;
    for (int i = 0; i < dim; ++i) {
      Complex de = dt * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                         e6 * k6[i] + e7 * k7[i]);
      double sc = ctl.abs + ctl.rel * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += std::norm(de) / (sc * sc);
    }
    err = std::sqrt(err / dim);

    // The embedded estimate can look deceptively small on a step that jumps
    // straight across a simple pole. Reject any step that moves a large
    // solution by an order-one fraction of itself.
    double ymax = 0.0, jump = 0.0;
    for (int i = 0; i < dim; ++i) {
      ymax = std::max(ymax, std::max(std::abs(y[i]), std::abs(ynew[i])));
      jump = std::max(jump, std::abs(ynew[i] - y[i]));
    }
    if (ymax > 50.0 * (1.0 + std::abs(curve.z(t))) && jump > 0.5 * ymax)
      err = std::max(err, 2.0);

    if (err <= 1.0) {
      t += dt;
      y = ynew;
      k1 = k7;
      if (n_acc) ++(*n_acc);
      on_sample(t, curve.z(t), y);
      if (blown(curve.z(t), y)) return LegStatus::blown;
      double fac = ctl.safety * std::pow(err + 1e-30, -0.7 / 5.0) *
                   std::pow(err_old, 0.4 / 5.0);
      fac = std::min(5.0, std::max(0.2, fac));
      dt *= fac;
      err_old = std::max(err, 1e-4);
    } else {
      if (n_rej) ++(*n_rej);
      double fac = std::max(0.1, ctl.safety * std::pow(err, -0.2));
      dt *= fac;
    }
  }
  return LegStatus::done;
}

}  // namespace phlab
