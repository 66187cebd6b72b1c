#include "phlab/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace phlab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925;
}

// ---------------------------------------------------------------------------
// PathSpec

PathSpec PathSpec::line(Complex a, Complex b) {
  PathSpec p;
  p.kind = Kind::polyline;
  p.vertices = {a, b};
  return p;
}

PathSpec PathSpec::polyline(std::vector<Complex> pts) {
  if (pts.size() < 2)
    throw LabError(Err::ConfigError, "polyline needs at least two vertices");
  PathSpec p;
  p.kind = Kind::polyline;
  p.vertices = std::move(pts);
  return p;
}

PathSpec PathSpec::circle(Complex center, double radius, double th0, double th1) {
  if (radius <= 0.0)
    throw LabError(Err::ConfigError, "circle path needs positive radius");
  PathSpec p;
  p.kind = Kind::circle;
  p.center = center;
  p.radius = radius;
  p.th0 = th0;
  p.th1 = th1;
  return p;
}

PathSpec PathSpec::ray(double angle, double r0, double r1) {
  if (r0 <= 0.0 || r1 <= 0.0)
    throw LabError(Err::ConfigError, "ray path needs positive radii");
  PathSpec p;
  p.kind = Kind::ray;
  p.angle = angle;
  p.r0 = r0;
  p.r1 = r1;
  return p;
}

std::vector<Curve> PathSpec::curves() const {
  std::vector<Curve> out;
  switch (kind) {
    case Kind::polyline:
      for (size_t i = 0; i + 1 < vertices.size(); ++i)
        out.push_back(Curve::line(vertices[i], vertices[i + 1]));
      break;
    case Kind::circle:
      out.push_back(Curve::arc(center, radius, th0, th1));
      break;
    case Kind::ray: {
      Complex dir = std::polar(1.0, angle);
      out.push_back(Curve::line(r0 * dir, r1 * dir));
      break;
    }
  }
  return out;
}

Complex PathSpec::start() const {
  switch (kind) {
    case Kind::polyline: return vertices.front();
    case Kind::circle: return center + std::polar(radius, th0);
    case Kind::ray: return std::polar(r0, angle);
  }
  return Complex(0, 0);
}

// ---------------------------------------------------------------------------
// Flows

void FullFlow::rhs(Complex z, const StateVec& y, StateVec& dy) const {
  dy[0] = -y[1] * y[1] - z * y[0] - prm_.alpha;
  dy[1] = y[0] * y[0] + z * y[1] + prm_.beta;
}

void FullFlow::pq(Complex, const StateVec& y, Complex& p, Complex& q) const {
  p = y[0];
  q = y[1];
}

void FullFlow::from_model(const LaurentModel& m, Complex z, StateVec& y) const {
  y[0] = m.eval_p(z);
  y[1] = m.eval_q(z);
}

RiccatiFlow::RiccatiFlow(ThirdRoot rho, Complex alpha) : rho_(rho) {
  prm_.alpha = alpha;
  // class condition: conj(rho) alpha - rho beta + 1 = 0
  prm_.beta = rho.value() * alpha + rho.conj().value();
}

void RiccatiFlow::rhs(Complex z, const StateVec& y, StateVec& dy) const {
  const Complex rho = rho_.value(), rhob = rho_.conj().value();
  dy[0] = -prm_.alpha - rho * z * z + z * y[0] - rhob * y[0] * y[0];
}

void RiccatiFlow::pq(Complex z, const StateVec& y, Complex& p, Complex& q) const {
  const Complex rho = rho_.value(), rhob = rho_.conj().value();
  p = y[0];
  q = rhob * z - rho * y[0];
}

void RiccatiFlow::from_model(const LaurentModel& m, Complex z, StateVec& y) const {
  y[0] = m.eval_p(z);
}

// ---------------------------------------------------------------------------
// Tracing with vaults

namespace {

struct ApproachBuffer {
  std::vector<State> buf;
  void push(const State& s) {
    if (buf.size() >= 4096) buf.erase(buf.begin(), buf.begin() + 2048);
    buf.push_back(s);
  }
  // samples within radius window of lam, deepest last
  std::vector<State> near(Complex lam, double inner, double outer) const {
    std::vector<State> out;
    for (auto it = buf.rbegin(); it != buf.rend(); ++it) {
      double d = std::abs(it->z - lam);
      if (d > 1.5 * outer && !out.empty()) break;
      if (d >= inner && d <= outer) out.push_back(*it);
      if (out.size() >= 200) break;
    }
    return out;
  }
};

// model self-consistency at z: series derivative against the system rhs
double model_defect(const LaurentModel& m, Complex z) {
  Complex p = m.eval_p(z), q = m.eval_q(z);
  State s{z, p, q};
  auto [dp, dq] = rhs(s, m.params());
  double sc = 1.0 + std::abs(dp) + std::abs(dq);
  return (std::abs(m.eval_dp(z) - dp) + std::abs(m.eval_dq(z) - dq)) / sc;
}

}  // namespace

Complex trace_curve(const Flow& flow, const Curve& curve, StateVec& y,
                    const TraceOptions& opt, const TraceSink& sink,
                    TrajStats* stats) {
  RkControl ctl;
  ctl.rel = opt.tol.rel;
  ctl.abs = opt.tol.abs;
  ctl.max_arc = opt.max_arc_step;

  ApproachBuffer approach;
  const int dim = flow.dim();
  double t = 0.0;
  long acc = 0, rej = 0;

  auto frhs = [&](Complex z, const StateVec& yy, StateVec& dy) {
    flow.rhs(z, yy, dy);
  };
  auto emit = [&](Complex z, const StateVec& yy) {
    Complex p, q;
    flow.pq(z, yy, p, q);
    State s{z, p, q};
    approach.push(s);
    if (sink.sample) sink.sample(s);
  };
  // Past ~1e8 the passage itself destroys accuracy, so pole handling starts
  // no later than that regardless of the configured trigger.
  const double trigger = std::min(opt.tol.pole_trigger, 1e8);
  auto blown = [&](Complex z, const StateVec& yy) {
    Complex p, q;
    flow.pq(z, yy, p, q);
    return std::abs(p) + std::abs(q) > trigger * (1.0 + std::abs(z));
  };

  int guard = 0;
  while (t < 1.0) {
    if (++guard > 100000)
      throw LabError(Err::NumericError, "trace_curve: too many vaults on one leg");
    LegStatus st = integrate_curve_raw(
        frhs, curve, dim, y, t, ctl,
        [&](double, Complex z, const StateVec& yy) { emit(z, yy); }, blown,
        &acc, &rej);
    if (stats) {
      stats->accepted += acc;
      stats->rejected += rej;
      acc = rej = 0;
    }
    if (st == LegStatus::done) break;
    if (st == LegStatus::underflow)
      throw LabError(Err::StepSizeUnderflow,
                     "step size underflow without pole confirmation near z = " +
                         std::to_string(curve.z(t).real()) + "+" +
                         std::to_string(curve.z(t).imag()) + "i");

    // pole approach: initial location from the leading-order balance
    Complex zb = curve.z(t);
    StateVec dy{};
    flow.rhs(zb, y, dy);
    Complex p, q;
    flow.pq(zb, y, p, q);
    if (std::abs(dy[0]) == 0.0)
      throw LabError(Err::NumericError, "blow-up with degenerate derivative");
    Complex lam0 = zb + p / dy[0];
    if (std::abs(lam0) < 0.05)
      throw LabError(Err::PathThroughOrigin,
                     "path runs into a singularity at the origin");

    double inner = opt.eps_min_factor / std::abs(lam0);
    double outer = 0.32 / std::abs(lam0);
    std::vector<State> fitset = approach.near(lam0, inner, outer);
    if (fitset.size() < 8) fitset = approach.near(lam0, inner, 2.0 * outer);
    if (fitset.size() < 4)
      throw LabError(Err::NumericError,
                     "pole approach produced too few usable samples");
    FitOptions fopt;
    fopt.order = opt.model_order;
    PoleFit fit = fit_pole(fitset, flow.params(), fopt);
    fit.record.source = PoleSource::vaulted;
    const Complex lam = fit.record.lambda;

    // choose a vault radius at which the truncated model is still consistent
    double rv = opt.tol.vault_radius_factor / std::abs(lam);
    Complex outward = (zb - lam) / std::abs(zb - lam);
    bool ok = false;
    for (int attempt = 0; attempt < 4; ++attempt) {
      if (model_defect(fit.model, lam + rv * outward) < 1e-5 &&
          model_defect(fit.model, lam - rv * outward) < 1e-5) {
        ok = true;
        break;
      }
      rv *= 0.6;
    }
    if (!ok)
      throw LabError(Err::VaultRadiusTooLarge,
                     "local model inconsistent at every tried vault radius");

    // exit point: last crossing of the leg with the vault disc
    std::array<double, 2> ts{};
    int nc = curve.circle_crossings(lam, rv, t, ts);
    double t_exit;
    bool leg_ends_inside = false;
    if (nc == 0) {
      leg_ends_inside = true;
      t_exit = 1.0;
    } else {
      t_exit = ts[size_t(nc - 1)];
    }
    Complex z_exit = curve.z(t_exit);
    double eps_min = opt.eps_min_factor / std::abs(lam);
    if (leg_ends_inside && std::abs(z_exit - lam) < 1e-13 / std::abs(lam))
      throw LabError(Err::NumericError,
                     "path terminates numerically at a pole");

    // model samples across the disc keep the sweep stream gap-free
    if (sink.sample) {
      double arc = std::abs(curve.dz(0.5 * (t + t_exit))) * (t_exit - t);
      int n = std::max(16, std::min(4000, int(arc / std::min(opt.max_arc_step, 0.02 * rv + 1e-30)) + 1));
      for (int i = 1; i < n; ++i) {
        double tt = t + (t_exit - t) * double(i) / double(n);
        Complex zz = curve.z(tt);
        if (std::abs(zz - lam) < eps_min) continue;
        sink.sample(State{zz, fit.model.eval_p(zz), fit.model.eval_q(zz)});
      }
    }

    flow.from_model(fit.model, z_exit, y);
    t = t_exit;
    if (stats) stats->vaults += 1;
    if (sink.pole) sink.pole(fit.record, fit.model);
    emit(z_exit, y);
    if (leg_ends_inside) break;
  }
  return curve.z(t);
}

// ---------------------------------------------------------------------------
// Public operations

Trajectory integrate(const State& init, const Params& prm, const PathSpec& path,
                     const Tolerances& tol) {
  if (std::abs(init.z - path.start()) > 1e-9 * (1.0 + std::abs(init.z)))
    throw LabError(Err::ConfigError, "integrate: init.z must be the path start");
  if (!is_finite(init.p) || !is_finite(init.q))
    throw LabError(Err::ConfigError, "integrate: initial state must be finite");

  FullFlow flow(prm);
  Trajectory out;
  out.tol = tol;
  TraceOptions topt;
  topt.tol = tol;

  TraceSink sink;
  sink.sample = [&](const State& s) { out.samples.push_back(s); };
  sink.pole = [&](const PoleRecord& r, const LaurentModel&) {
    out.poles.push_back(r);
    // honor the exclusion radius around freshly recorded poles
    double eps = topt.eps_min_factor / std::abs(r.lambda);
    auto& v = out.samples;
    v.erase(std::remove_if(v.begin(), v.end(),
                           [&](const State& s) {
                             return std::abs(s.z - r.lambda) < eps;
                           }),
            v.end());
  };

  StateVec y{init.p, init.q};
  out.samples.push_back(init);
  for (const Curve& c : path.curves())
    trace_curve(flow, c, y, topt, sink, &out.stats);
  return out;
}

State continue_to_point(const State& init, const Params& prm, Complex target,
                        const Tolerances& tol) {
  if (target == init.z) return init;
  FullFlow flow(prm);
  TraceOptions topt;
  topt.tol = tol;
  StateVec y{init.p, init.q};
  Complex zf = trace_curve(flow, Curve::line(init.z, target), y, topt, {});
  return State{zf, y[0], y[1]};
}

namespace {

class AugmentedFlow : public Flow {
 public:
  AugmentedFlow(Params prm, PathIntegrand which) : prm_(prm), which_(which) {}
  int dim() const override { return 3; }
  const Params& params() const override { return prm_; }
  void rhs(Complex z, const StateVec& y, StateVec& dy) const override {
    dy[0] = -y[1] * y[1] - z * y[0] - prm_.alpha;
    dy[1] = y[0] * y[0] + z * y[1] + prm_.beta;
    dy[2] = which_ == PathIntegrand::pq ? y[0] * y[1] : y[0];
  }
  void pq(Complex, const StateVec& y, Complex& p, Complex& q) const override {
    p = y[0];
    q = y[1];
  }
  void from_model(const LaurentModel&, Complex, StateVec&) const override {
    throw LabError(Err::NumericError,
                   "path integral is not defined across a pole");
  }

 private:
  Params prm_;
  PathIntegrand which_;
};

}  // namespace

PathIntegral integrate_along(const State& init, const Params& prm,
                             const std::vector<Curve>& curves,
                             PathIntegrand which, const Tolerances& tol) {
  AugmentedFlow flow(prm, which);
  TraceOptions topt;
  topt.tol = tol;
  StateVec y{init.p, init.q, Complex(0, 0)};
  Complex zf = init.z;
  for (const Curve& c : curves) zf = trace_curve(flow, c, y, topt, {});
  return PathIntegral{State{zf, y[0], y[1]}, y[2]};
}

State vault(const PoleRecord& record, int model_order, const State& entry,
            Complex exit_z, const Params& prm, double vault_radius_factor) {
  double rv = vault_radius_factor / std::abs(record.lambda);
  if (std::abs(entry.z - record.lambda) > rv ||
      std::abs(exit_z - record.lambda) > rv)
    throw LabError(Err::VaultRadiusTooLarge,
                   "vault: entry or exit outside the vault disc");
  LaurentModel m = laurent_expand(prm, record.residue, record.lambda, record.h,
                                  model_order);
  return State{exit_z, m.eval_p(exit_z), m.eval_q(exit_z)};
}

}  // namespace phlab
