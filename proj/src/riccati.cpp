#include "phlab/riccati.hpp"

#include <cmath>

namespace phlab {

Complex riccati_rhs_first(ThirdRoot rho, const Params& prm, Complex z, Complex p) {
  Complex rv = rho.value(), rb = rho.conj().value();
  if (std::abs(rb * prm.alpha - rv * prm.beta + 1.0) > 1e-10)
    throw LabError(Err::ClassConditionViolated,
                   "riccati_rhs_first: conj(rho) alpha - rho beta + 1 != 0");
  return -prm.alpha - rv * z * z + z * p - rb * p * p;
}

OraclePtr make_first_kind(ThirdRoot rho, Complex alpha,
                          const FirstKindOptions& opt, FirstKindReport* report) {
  if (!is_finite(alpha) || !is_finite(opt.seed.p))
    throw LabError(Err::ClassConditionViolated, "make_first_kind: bad inputs");
  auto flow = std::make_shared<RiccatiFlow>(rho, alpha);
  char desc[160];
  std::snprintf(desc, sizeof desc,
                "first-kind[rho=%d,alpha=%.9g%+.9gi,seed=(%.3g%+.3gi,%.3g%+.3gi)]",
                rho.k(), alpha.real(), alpha.imag(), opt.seed.z.real(),
                opt.seed.z.imag(), opt.seed.p.real(), opt.seed.p.imag());
  auto sol = std::make_shared<FlowOracle>(flow, opt.seed, opt.tol, desc);

  if (report) *report = FirstKindReport{};
  if (!opt.validate) return sol;

  FirstKindReport rep;
  const Params prm = flow->params();
  const Complex rb = rho.conj().value(), rv = rho.value();

  // probe checks: system residual, class identity, Hamiltonian identity
  Rng rng(4242);
  OracleAnchor hint{};
  const OracleAnchor* hp = nullptr;
  int used = 0;
  for (int i = 0; i < 128 && used < 24; ++i) {
    Complex z = rng.annulus(2, 10);
    OracleSample s;
    try {
      s = sol->eval(z, hp);
    } catch (const LabError&) {
      continue;
    }
    hint = s.anchor;
    hp = &hint;
    if (std::abs(s.p) + std::abs(s.q) > 30.0 * (1.0 + std::abs(z))) continue;
    ++used;
    Complex rp = s.dp - (-s.q * s.q - z * s.p - prm.alpha);
    Complex rq = s.dq - (s.p * s.p + z * s.q + prm.beta);
    double sc = 1.0 + std::abs(z * s.p) + std::abs(s.q * s.q);
    rep.max_system_residual =
        std::max(rep.max_system_residual, (std::abs(rp) + std::abs(rq)) / sc);
    rep.max_identity =
        std::max(rep.max_identity, std::abs(rb * s.p + rv * s.q - z));
    Complex H = hamiltonian(State{z, s.p, s.q}, prm);
    Complex Hid = z * z * z / 3.0 + rb * prm.alpha * z + rb * s.p;
    rep.max_H_residual = std::max(rep.max_H_residual,
                                  std::abs(H - Hid) / (1.0 + std::abs(Hid)));
  }
  if (used < 12)
    throw LabError(Err::NumericError, "make_first_kind: too few usable probes");
  if (rep.max_system_residual > opt.probe_tol || rep.max_identity > opt.probe_tol)
    throw LabError(Err::NumericError,
                   "make_first_kind: probe validation failed, residual " +
                       std::to_string(rep.max_system_residual));

  if (opt.validate_poles > 0) {
    ScanOptions sopt;
    sopt.tol = opt.tol;
    PoleDB db = scan(sol, Annulus{Complex(0, 0), 2.0, 6.5}, sopt);
    int checked = 0;
    for (const auto& rec : db.records()) {
      if (checked >= opt.validate_poles) break;
      ++checked;
      rep.max_h = std::max(rep.max_h, std::abs(rec.h));
      if (!(rec.residue == rho)) rep.all_residues_match = false;
    }
    rep.poles_checked = checked;
    if (checked < 3)
      // a rational member would defeat the transcendence requirement
      throw LabError(Err::DiagnosticsError,
                     "make_first_kind: fewer than 3 poles found in the "
                     "certification scan; seed may give a rational member");
    if (!rep.all_residues_match)
      throw LabError(Err::DiagnosticsError,
                     "make_first_kind: pole with foreign residue class");
  }
  if (report) *report = rep;
  return sol;
}

Complex u_omega_value(const State& s, ThirdRoot omega) {
  return omega.value() * s.p + omega.conj().value() * s.q + 0.5 * s.z;
}

Complex second_kind_a(Complex lambda, ThirdRoot omega, const Params& prm) {
  Complex w = omega.value(), wb = omega.conj().value();
  double im = w.imag();
  return -0.5 + ((w + 2.0) * prm.alpha - (wb + 2.0) * prm.beta) / 3.0 +
         Complex(0, 0.5) * im * lambda * lambda;
}

SecondKindResiduals second_kind_residuals(const SolutionOracle& sol,
                                          ThirdRoot omega, const PoleDB* db,
                                          int n_probes) {
  SecondKindResiduals out;
  const Params& prm = sol.params();
  const Complex w = omega.value(), wb = omega.conj().value();
  const Complex two_i_im(0, 2.0 * w.imag());

  Rng rng(5150);
  OracleAnchor hint{};
  const OracleAnchor* hp = nullptr;
  int used = 0;
  for (int i = 0; i < n_probes * 4 && used < n_probes; ++i) {
    Complex z = rng.annulus(2, 10);
    OracleSample s;
    try {
      s = sol.eval(z, hp);
    } catch (const LabError&) {
      continue;
    }
    hint = s.anchor;
    hp = &hint;
    if (std::abs(s.p) + std::abs(s.q) > 30.0 * (1.0 + std::abs(z))) continue;
    ++used;
    Complex u = u_omega_value(State{z, s.p, s.q}, omega);
    Complex du = w * s.dp + wb * s.dq + 0.5;
    Complex r31 = du - 3.0 * second_kind_a(z, omega, prm) - u * u / two_i_im;
    double sc = 1.0 + std::abs(u * u) + std::abs(z * z);
    out.riccati = std::max(out.riccati, std::abs(r31) / sc);

    Complex K = s.p * s.p + s.q * s.q + z * z - s.p * s.q + z * (s.p + s.q) +
                3.0 * prm.beta + 3.0;
    out.K = std::max(out.K, std::abs(K) / sc);

    Complex H = hamiltonian(State{z, s.p, s.q}, prm);
    Complex Hid = s.q - s.p + z * z * z / 3.0 + (prm.beta + 1.0) * z;
    out.H = std::max(out.H, std::abs(H - Hid) / (1.0 + std::abs(Hid)));
  }

  if (db) {
    for (const auto& rec : db->records()) {
      Complex wres = rec.residue.value();
      Complex law = rec.h + Complex(0, wres.imag()) - (prm.beta + 1.0) * rec.lambda;
      out.h_law = std::max(out.h_law, std::abs(law) / (1.0 + std::abs(rec.lambda)));
      ++out.poles_checked;
    }
  }
  return out;
}

OraclePtr make_second_kind(Complex beta, ThirdRoot rho,
                           const SecondKindOptions& opt) {
  if (std::abs(beta + 1.0) < 1e-12)
    throw LabError(Err::ExceptionalParameters,
                   "make_second_kind: the class at (alpha, beta) = (1, -1) "
                   "is empty");
  if (rho == ThirdRoot::one())
    throw LabError(Err::ClassConditionViolated,
                   "make_second_kind: rho must be a nontrivial third root");

  // first-kind base with parameters (rho beta - conj(rho),
  // conj(rho) beta + conj(rho) - 1), then B_rho
  Complex rv = rho.value(), rb = rho.conj().value();
  Complex alpha_base = rv * beta - rb;
  FirstKindOptions fopt;
  fopt.tol = opt.tol;
  fopt.seed = opt.base_seed;
  fopt.validate_poles = opt.certify_transcendence ? 3 : 0;
  OraclePtr base = make_first_kind(rho, alpha_base, fopt);

  ApplyOptions aopt;
  aopt.tol = opt.tol;
  OraclePtr out = apply_B(rho, base, aopt);
  // arrival parameters are (beta + 2, beta)
  if (std::abs(out->params().alpha - (beta + 2.0)) > 1e-9 ||
      std::abs(out->params().beta - beta) > 1e-9)
    throw LabError(Err::DiagnosticsError,
                   "make_second_kind: parameter bookkeeping mismatch");
  return out;
}

}  // namespace phlab
