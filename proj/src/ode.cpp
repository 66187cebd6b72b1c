#include "phlab/ode.hpp"

#include <algorithm>

namespace phlab {

int Curve::circle_crossings(Complex c, double r, double t_from,
                            std::array<double, 2>& out) const {
  int n = 0;
  auto push = [&](double t) {
    if (t > t_from + 1e-15 && t <= 1.0 && n < 2) {
      // keep ascending, unique
      for (int i = 0; i < n; ++i)
        if (std::abs(out[size_t(i)] - t) < 1e-15) return;
      out[size_t(n++)] = t;
    }
  };
  if (kind == Kind::line) {
    Complex d = b - a, w = a - c;
    double A = std::norm(d);
    if (A == 0.0) return 0;
    double B = (std::conj(d) * w).real();
    double C = std::norm(w) - r * r;
    double disc = B * B - A * C;
    if (disc < 0.0) return 0;
    double s = std::sqrt(disc);
    push((-B - s) / A);
    push((-B + s) / A);
  } else {
    Complex w = c - center;
    double aw = std::abs(w);
    if (aw == 0.0) return 0;
    double m = (radius * radius + aw * aw - r * r) / (2.0 * radius);
    double u = m / aw;
    if (u < -1.0 || u > 1.0) return 0;
    double phi = std::arg(w);
    double dth = th1 - th0;
    if (dth == 0.0) return 0;
    double ac = std::acos(u);
    for (double theta : {phi + ac, phi - ac}) {
      // shift by full turns so that t lands inside [0, 1]
      double tbase = (theta - th0) / dth;
      double period = 2.0 * 3.14159265358979323846 / std::abs(dth);
      double k0 = std::floor((0.0 - tbase) / period);
      for (int k = int(k0) - 1; k <= int(k0) + 3; ++k) push(tbase + k * period);
    }
  }
  if (n == 2 && out[0] > out[1]) std::swap(out[0], out[1]);
  return n;
}

}  // namespace phlab
