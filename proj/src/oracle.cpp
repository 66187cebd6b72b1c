#include "phlab/oracle.hpp"

#include <cmath>

namespace phlab {

// ---------------------------------------------------------------------------
// ClosedFormOracle

OracleSample ClosedFormOracle::eval(Complex z, const OracleAnchor*) const {
  auto [p, q] = fn_(z);
  State s{z, p, q};
  auto [dp, dq] = rhs(s, prm_);
  return OracleSample{z, p, q, dp, dq, OracleAnchor{z, p, q, this}};
}

void ClosedFormOracle::sweep_curves(const std::vector<Curve>& curves,
                                    const SweepOptions& opt,
                                    const SweepSink& sink,
                                    const OracleAnchor*) const {
  for (const Curve& c : curves) {
    double len = c.length();
    int n = std::max(64, int(len / std::min(opt.max_arc, len) * 1.0) + 1);
    n = std::min(n, 2000000);
    for (int i = 0; i <= n; ++i) {
      Complex z = c.z(double(i) / n);
      sink(eval(z));
    }
  }
}

// ---------------------------------------------------------------------------
// FlowOracle

FlowOracle::FlowOracle(std::shared_ptr<const Flow> flow, State seed,
                       Tolerances tol, std::string desc)
    : flow_(std::move(flow)), seed_(seed), tol_(tol), desc_(std::move(desc)) {
  if (!is_finite(seed_.p) || !is_finite(seed_.q))
    throw LabError(Err::ConfigError, "oracle seed must be finite");
}

void FlowOracle::load(const State& s, StateVec& y) const {
  y = StateVec{};
  y[0] = s.p;
  if (flow_->dim() >= 2) y[1] = s.q;
}

OracleSample FlowOracle::pack(Complex z, Complex p, Complex q,
                              const OracleAnchor& anchor) const {
  State s{z, p, q};
  auto [dp, dq] = rhs(s, flow_->params());
  return OracleSample{z, p, q, dp, dq, anchor};
}

OracleSample FlowOracle::eval(Complex z, const OracleAnchor* hint) const {
  State start = seed_;
  if (hint && hint->owner == this && is_finite(hint->p) && is_finite(hint->q)) {
    double scale = 1.0 + std::abs(hint->z);
    if (std::abs(hint->p) + std::abs(hint->q) < 0.3 * tol_.pole_trigger * scale)
      start = State{hint->z, hint->p, hint->q};
  }
  TraceOptions topt;
  topt.tol = tol_;
  StateVec y{};
  load(start, y);
  if (z != start.z)
    trace_curve(*flow_, Curve::line(start.z, z), y, topt, {});
  Complex p, q;
  flow_->pq(z, y, p, q);
  // anchor at the evaluation point only if it is safely finite
  OracleAnchor anchor{start.z, start.p, start.q, this};
  if (std::abs(p) + std::abs(q) < 0.3 * tol_.pole_trigger * (1.0 + std::abs(z)))
    anchor = OracleAnchor{z, p, q, this};
  return pack(z, p, q, anchor);
}

void FlowOracle::sweep_curves(const std::vector<Curve>& curves,
                              const SweepOptions& opt, const SweepSink& sink,
                              const OracleAnchor* start_hint) const {
  if (curves.empty()) return;
  TraceOptions topt;
  topt.tol = opt.tol;
  topt.max_arc_step = opt.max_arc;

  State start = seed_;
  if (start_hint && start_hint->owner == this && is_finite(start_hint->p) &&
      is_finite(start_hint->q))
    start = State{start_hint->z, start_hint->p, start_hint->q};

  // lead-in to the first curve
  StateVec y{};
  load(start, y);
  Complex z0 = curves.front().z(0.0);
  if (z0 != start.z) {
    TraceOptions lead = topt;
    lead.max_arc_step = 1e30;
    trace_curve(*flow_, Curve::line(start.z, z0), y, lead, {});
  }

  OracleAnchor safe{start.z, start.p, start.q, this};
  TraceSink ts;
  ts.sample = [&](const State& s) {
    double scale = 1.0 + std::abs(s.z);
    bool calm = std::abs(s.p) + std::abs(s.q) < 0.3 * opt.tol.pole_trigger * scale;
    if (calm) safe = OracleAnchor{s.z, s.p, s.q, this};
    sink(pack(s.z, s.p, s.q, safe));
  };
  for (const Curve& c : curves) trace_curve(*flow_, c, y, topt, ts);
}

OraclePtr make_ode_oracle(const Params& prm, const State& seed,
                          const Tolerances& tol) {
  return std::make_shared<FlowOracle>(std::make_shared<FullFlow>(prm), seed,
                                      tol, "ode-seeded solution");
}

OraclePtr make_zero_oracle() {
  return std::make_shared<ClosedFormOracle>(
      Params{0, 0}, [](Complex) { return std::pair<Complex, Complex>{0, 0}; },
      "zero solution");
}

OraclePtr make_polynomial_oracle() {
  return std::make_shared<ClosedFormOracle>(
      Params{1, -1},
      [](Complex z) { return std::pair<Complex, Complex>{-z, -z}; },
      "polynomial solution p=q=-z");
}

// ---------------------------------------------------------------------------

double probe_residual(const SolutionOracle& sol, int n_probes, double r0,
                      double r1, std::uint64_t seed) {
  Rng rng(seed);
  const Params& prm = sol.params();
  double worst = 0.0;
  int used = 0;
  OracleAnchor hint{};
  const OracleAnchor* hp = nullptr;
  for (int i = 0; i < n_probes * 4 && used < n_probes; ++i) {
    Complex z = rng.annulus(r0, r1);
    OracleSample s;
    try {
      s = sol.eval(z, hp);
    } catch (const LabError&) {
      continue;
    }
    hint = s.anchor;
    hp = &hint;
    if (std::abs(s.p) + std::abs(s.q) > 30.0 * (1.0 + std::abs(z))) continue;
    Complex rp = s.dp - (-s.q * s.q - z * s.p - prm.alpha);
    Complex rq = s.dq - (s.p * s.p + z * s.q + prm.beta);
    double sc = 1.0 + std::abs(s.q * s.q) + std::abs(z * s.p) +
                std::abs(prm.alpha) + std::abs(s.p * s.p);
    worst = std::max(worst, (std::abs(rp) + std::abs(rq)) / sc);
    ++used;
  }
  if (used < n_probes / 2)
    throw LabError(Err::NumericError,
                   "probe_residual: too few usable probe points");
  return worst;
}

}  // namespace phlab
