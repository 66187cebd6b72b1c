#include "phlab/rescale.hpp"

#include <cmath>

namespace phlab {

namespace {
constexpr double kInf = 1e300;
}

std::pair<Complex, Complex> rescale_eval(const SolutionOracle& sol,
                                         Complex kappa, Complex zeta) {
  if (std::abs(kappa) == 0.0)
    throw LabError(Err::ConfigError, "rescale_eval: kappa must be nonzero");
  Complex z = kappa + zeta / kappa;
  try {
    OracleSample s = sol.eval(z);
    return {s.p / kappa, s.q / kappa};
  } catch (const LabError&) {
    return {Complex(kInf, 0), Complex(kInf, 0)};
  }
}

Complex cluster_estimate_at(const SolutionOracle& sol, Complex kappa) {
  OracleSample s = sol.eval(kappa);
  Complex H = hamiltonian(State{kappa, s.p, s.q}, sol.params());
  return H / (kappa * kappa * kappa);
}

Complex cluster_estimate_pole(const PoleRecord& rec) {
  Complex l3 = rec.lambda * rec.lambda * rec.lambda;
  return (2.0 * rec.h + l3 / 3.0) / l3;
}

std::vector<ClusterPoint> cluster_estimates(const SolutionOracle& sol,
                                            const std::vector<Complex>& kappas) {
  std::vector<ClusterPoint> out;
  for (Complex k : kappas) out.push_back({k, cluster_estimate_at(sol, k), false});
  return out;
}

std::vector<ClusterPoint> cluster_estimates_poles(
    const std::vector<PoleRecord>& recs) {
  std::vector<ClusterPoint> out;
  for (const auto& r : recs)
    out.push_back({r.lambda, cluster_estimate_pole(r), true});
  return out;
}

double rescale_residual(const SolutionOracle& sol, Complex kappa,
                        double zeta_radius, int grid_n) {
  double worst = 0.0;
  OracleAnchor hint{};
  const OracleAnchor* hp = nullptr;
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      Complex zeta(zeta_radius * (2.0 * i / (grid_n - 1) - 1.0),
                   zeta_radius * (2.0 * j / (grid_n - 1) - 1.0));
      if (std::abs(zeta) > zeta_radius) continue;
      Complex z = kappa + zeta / kappa;
      OracleSample s;
      try {
        s = sol.eval(z, hp);
      } catch (const LabError&) {
        continue;
      }
      hint = s.anchor;
      hp = &hint;
      Complex pk = s.p / kappa, qk = s.q / kappa;
      if (std::abs(pk) + std::abs(qk) > 10.0) continue;  // pole disc
      Complex k2 = kappa * kappa;
      Complex r1 = s.dp / k2 + qk * qk + pk;
      Complex r2 = s.dq / k2 - pk * pk - qk;
      worst = std::max(worst, std::abs(r1) + std::abs(r2));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Limit system

Complex limit_first_integral(Complex u, Complex v) {
  return (u * u * u + v * v * v) / 3.0 + u * v;
}

namespace {

// local series of the limit system through a pole at t0 with residue rho:
// coefficient arrays for u and v, orders -1..n
struct LimitModel {
  Complex t0;
  ThirdRoot rho;
  Complex h;
  std::vector<Complex> a, b;  // index k+1 holds order k

  Complex eval_u(Complex t) const {
    Complex s = t - t0, acc{0, 0};
    for (size_t i = a.size(); i-- > 1;) acc = acc * s + a[i];
    return acc + a[0] / s;
  }
  Complex eval_v(Complex t) const {
    Complex s = t - t0, acc{0, 0};
    for (size_t i = b.size(); i-- > 1;) acc = acc * s + b[i];
    return acc + b[0] / s;
  }
};

LimitModel limit_expand(ThirdRoot rho, Complex t0, Complex h, int order) {
  LimitModel m;
  m.t0 = t0;
  m.rho = rho;
  m.h = h;
  int n = order;
  std::vector<Complex> a(size_t(n + 2)), b(size_t(n + 2));
  auto ax = [&](int k) -> Complex& { return a[size_t(k + 1)]; };
  auto bx = [&](int k) -> Complex& { return b[size_t(k + 1)]; };
  ax(-1) = 1.0;
  bx(-1) = -1.0;
  ax(0) = 0.5;
  bx(0) = 0.5;
  auto conv_low = [&](const std::vector<Complex>& c, int j) {
    Complex s{0, 0};
    for (int mm = -1; mm <= j; ++mm) {
      int nn = j - mm;
      if (nn < -1 || nn > j) continue;
      s += c[size_t(mm + 1)] * c[size_t(nn + 1)];
    }
    return s;
  };
  for (int j = 0; j + 1 <= n; ++j) {
    Complex ra = -conv_low(b, j) - ax(j);
    Complex rb = conv_low(a, j) + bx(j);
    if (j == 1) {
      ax(2) = h + 0.25 * ra;
      bx(2) = h - 0.25 * ra;
      continue;
    }
    double det = double(j + 1) * double(j + 1) - 4.0;
    ax(j + 1) = (double(j + 1) * ra + 2.0 * rb) / det;
    bx(j + 1) = (2.0 * ra + double(j + 1) * rb) / det;
  }
  Complex rv = rho.value(), rb2 = rho.conj().value();
  for (auto& c : a) c *= rv;
  for (auto& c : b) c *= rb2;
  m.a = std::move(a);
  m.b = std::move(b);
  return m;
}

// Gauss-Newton fit of (t0, h) of the limit model on approach samples.
struct LimitSample {
  Complex t, u, v;
};

LimitModel limit_fit(const std::vector<LimitSample>& samples, Complex t0_init,
                     ThirdRoot rho, int order) {
  Complex t0 = t0_init, h{0, 0};
  std::vector<Complex> r0, r1, r2;
  auto resid = [&](Complex tt, Complex hh, std::vector<Complex>& r) {
    LimitModel m = limit_expand(rho, tt, hh, order);
    r.clear();
    for (const auto& s : samples) {
      Complex um = m.eval_u(s.t), vm = m.eval_v(s.t);
      double w = 1.0 / (1.0 + std::abs(um));
      r.push_back(w * (um - s.u));
      r.push_back(w * (vm - s.v));
    }
  };
  for (int it = 0; it < 12; ++it) {
    resid(t0, h, r0);
    double dt = 1e-7, dh = 1e-7 * (1.0 + std::abs(h));
    resid(t0 + dt, h, r1);
    resid(t0, h + dh, r2);
    Complex j11{0, 0}, j12{0, 0}, j22{0, 0}, g1{0, 0}, g2{0, 0};
    for (size_t i = 0; i < r0.size(); ++i) {
      Complex c1 = (r1[i] - r0[i]) / dt;
      Complex c2 = (r2[i] - r0[i]) / dh;
      j11 += std::conj(c1) * c1;
      j12 += std::conj(c1) * c2;
      j22 += std::conj(c2) * c2;
      g1 += std::conj(c1) * r0[i];
      g2 += std::conj(c2) * r0[i];
    }
    Complex det = j11 * j22 - j12 * std::conj(j12);
    if (std::abs(det) == 0.0) break;
    Complex d1 = -(j22 * g1 - j12 * g2) / det;
    Complex d2 = -(j11 * g2 - std::conj(j12) * g1) / det;
    t0 += d1;
    h += d2;
    if (std::abs(d1) < 1e-13 && std::abs(d2) < 1e-12) break;
  }
  return limit_expand(rho, t0, h, order);
}

}  // namespace

LimitSystemState limit_integrate(const LimitSystemState& init, Complex t_end,
                                 const Tolerances& tol) {
  auto lrhs = [](Complex, const StateVec& y, StateVec& dy) {
    dy[0] = -y[1] * y[1] - y[0];
    dy[1] = y[0] * y[0] + y[1];
  };
  RkControl ctl;
  ctl.rel = tol.rel;
  ctl.abs = tol.abs;
  StateVec y{init.u, init.v};
  Complex t_cur = init.t;

  std::vector<LimitSample> approach;
  int guard = 0;
  while (t_cur != t_end) {
    if (++guard > 10000)
      throw LabError(Err::NumericError, "limit_integrate: too many vaults");
    Curve leg = Curve::line(t_cur, t_end);
    double tpar = 0.0;
    auto on_sample = [&](double, Complex tz, const StateVec& yy) {
      approach.push_back(LimitSample{tz, yy[0], yy[1]});
      if (approach.size() > 2048)
        approach.erase(approach.begin(), approach.begin() + 1024);
    };
    auto blown = [&](Complex, const StateVec& yy) {
      return std::abs(yy[0]) + std::abs(yy[1]) > tol.pole_trigger;
    };
    LegStatus st = integrate_curve_raw(lrhs, leg, 2, y, tpar, ctl, on_sample, blown);
    Complex t_stop = leg.z(tpar);
    if (st == LegStatus::done) return LimitSystemState{
        t_end, y[0], y[1], limit_first_integral(y[0], y[1])};
    if (st == LegStatus::underflow)
      throw LabError(Err::StepSizeUnderflow, "limit_integrate: stalled");

    // pole: locate, fit the local series, vault across
    StateVec dy{};
    lrhs(t_stop, y, dy);
    Complex t0 = t_stop + y[0] / dy[0];
    double margin = 0.0;
    ThirdRoot rho = ThirdRoot::nearest(-y[0] * y[0] / dy[0], &margin);
    if (margin > 0.25)
      throw LabError(Err::AmbiguousResidue, "limit_integrate: residue unclear");
    std::vector<LimitSample> fitset;
    for (auto it = approach.rbegin(); it != approach.rend(); ++it) {
      double d = std::abs(it->t - t0);
      if (d >= 1e-4 && d <= 0.45) fitset.push_back(*it);
      if (fitset.size() >= 120) break;
    }
    if (fitset.size() < 6)
      throw LabError(Err::NumericError, "limit_integrate: thin pole approach");
    LimitModel model = limit_fit(fitset, t0, rho, 12);

    double rv = 0.25;
    std::array<double, 2> ts{};
    int nc = leg.circle_crossings(model.t0, rv, tpar, ts);
    if (nc == 0) {
      // target inside the vault disc
      if (std::abs(t_end - model.t0) < 1e-12)
        throw LabError(Err::NumericError, "limit_integrate: target is a pole");
      y[0] = model.eval_u(t_end);
      y[1] = model.eval_v(t_end);
      return LimitSystemState{t_end, y[0], y[1],
                              limit_first_integral(y[0], y[1])};
    }
    Complex t_exit = leg.z(ts[size_t(nc - 1)]);
    y[0] = model.eval_u(t_exit);
    y[1] = model.eval_v(t_exit);
    t_cur = t_exit;
    approach.clear();
  }
  return LimitSystemState{t_end, y[0], y[1], limit_first_integral(y[0], y[1])};
}

// ---------------------------------------------------------------------------
// Closed-form limit solutions

std::pair<Complex, Complex> explicit_limit(LimitCase which, ThirdRoot rho,
                                           Complex t) {
  const Complex om = ThirdRoot::omega().value();
  const Complex omb = ThirdRoot::omega_bar().value();
  if (which == LimitCase::reducible_branch) {
    Complex E = std::exp(Complex(0, kSqrt3) * t);
    if (std::abs(E - 1.0) < 1e-12)
      throw LabError(Err::PoleOfClosedForm, "reducible branch pole");
    Complex u1 = (E * omb - om) / (1.0 - E);
    Complex v1 = 1.0 - u1;
    Complex rv = rho.value(), rb = rho.conj().value();
    return {rv * u1, rb * v1};
  }
  Complex e1 = std::exp(t), e2 = e1 * e1, e3 = e2 * e1;
  if (std::abs(e3 + 1.0) < 1e-12)
    throw LabError(Err::PoleOfClosedForm, "genus-zero pole");
  return {-3.0 * om * e2 / (e3 + 1.0), -3.0 * omb * e1 / (e3 + 1.0)};
}

std::pair<Complex, Complex> explicit_limit_deriv(LimitCase which, ThirdRoot rho,
                                                 Complex t) {
  const Complex om = ThirdRoot::omega().value();
  const Complex omb = ThirdRoot::omega_bar().value();
  if (which == LimitCase::reducible_branch) {
    Complex E = std::exp(Complex(0, kSqrt3) * t);
    if (std::abs(E - 1.0) < 1e-12)
      throw LabError(Err::PoleOfClosedForm, "reducible branch pole");
    Complex om2 = 1.0 - E;
    Complex du1 = 3.0 * E / (om2 * om2);
    Complex rv = rho.value(), rb = rho.conj().value();
    return {rv * du1, rb * (-du1)};
  }
  Complex e1 = std::exp(t), e2 = e1 * e1, e3 = e2 * e1;
  Complex den = e3 + 1.0;
  if (std::abs(den) < 1e-12)
    throw LabError(Err::PoleOfClosedForm, "genus-zero pole");
  Complex du = -3.0 * om * e2 * (2.0 - e3) / (den * den);
  Complex dv = -3.0 * omb * e1 * (1.0 - 2.0 * e3) / (den * den);
  return {du, dv};
}

}  // namespace phlab
