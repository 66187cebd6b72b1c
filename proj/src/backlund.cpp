#include "phlab/backlund.hpp"

#include <cmath>
#include <sstream>

namespace phlab {

namespace {

char root_tag(ThirdRoot r) {
  switch (r.k()) {
    case 1: return 'w';
    case 2: return 'W';
    default: return '1';
  }
}

ThirdRoot tag_root(char c) {
  switch (c) {
    case '1': return ThirdRoot::one();
    case 'w': return ThirdRoot::omega();
    case 'W': return ThirdRoot::omega_bar();
    default:
      throw LabError(Err::ConfigError,
                     std::string("bad root tag '") + c + "' in chain spec");
  }
}

}  // namespace

std::string BacklundStep::name() const {
  switch (kind) {
    case Kind::M: return std::string("M") + root_tag(omega);
    case Kind::B: return std::string("B") + root_tag(omega);
    case Kind::R: return "R";
    case Kind::Conj: return "C";
  }
  return "?";
}

std::vector<BacklundStep> parse_chain(const std::string& spec) {
  std::vector<BacklundStep> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ';')) {
    // trim blanks
    size_t b = tok.find_first_not_of(" \t");
    size_t e = tok.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    tok = tok.substr(b, e - b + 1);
    if (tok == "R")
      out.push_back(BacklundStep::R());
    else if (tok == "C")
      out.push_back(BacklundStep::C());
    else if (tok.size() == 2 && tok[0] == 'M')
      out.push_back(BacklundStep::M(tag_root(tok[1])));
    else if (tok.size() == 2 && tok[0] == 'B')
      out.push_back(BacklundStep::B(tag_root(tok[1])));
    else
      throw LabError(Err::ConfigError, "bad chain token '" + tok + "'");
  }
  return out;
}

std::string chain_name(const std::vector<BacklundStep>& steps) {
  std::string s;
  for (const auto& st : steps) {
    if (!s.empty()) s += ';';
    s += st.name();
  }
  return s;
}

Params map_params(const BacklundStep& step, const Params& prm) {
  Complex w = step.omega.value(), wb = step.omega.conj().value();
  switch (step.kind) {
    case BacklundStep::Kind::M: return Params{wb * prm.alpha, w * prm.beta};
    case BacklundStep::Kind::R: return Params{-prm.beta, -prm.alpha};
    case BacklundStep::Kind::Conj:
      return Params{std::conj(prm.alpha), std::conj(prm.beta)};
    case BacklundStep::Kind::B:
      return Params{w * prm.beta - wb, wb * prm.alpha + w};
  }
  return prm;
}

Complex inner_point(const BacklundStep& step, Complex z) {
  switch (step.kind) {
    case BacklundStep::Kind::R: return Complex(0, 1) * z;
    case BacklundStep::Kind::Conj: return std::conj(z);
    default: return z;
  }
}

OracleSample map_sample(const BacklundStep& step, const Params& inner_prm,
                        const OracleSample& in, Complex z_outer) {
  OracleSample out;
  out.z = z_outer;
  out.anchor = in.anchor;
  Complex w = step.omega.value(), wb = step.omega.conj().value();
  switch (step.kind) {
    case BacklundStep::Kind::M:
      out.p = wb * in.p;
      out.q = w * in.q;
      out.dp = wb * in.dp;
      out.dq = w * in.dq;
      break;
    case BacklundStep::Kind::R:
      out.p = Complex(0, -1) * in.q;
      out.q = Complex(0, -1) * in.p;
      out.dp = in.dq;
      out.dq = in.dp;
      break;
    case BacklundStep::Kind::Conj:
      out.p = std::conj(in.p);
      out.q = std::conj(in.q);
      out.dp = std::conj(in.dp);
      out.dq = std::conj(in.dq);
      break;
    case BacklundStep::Kind::B: {
      Complex nu = w * inner_prm.alpha - wb * inner_prm.beta + 1.0;
      Complex den = w * in.p + wb * in.q - in.z;
      Complex g = nu / den;
      Complex dden = w * in.dp + wb * in.dq - 1.0;
      Complex dg = -nu * dden / (den * den);
      out.p = in.p - wb * g;
      out.q = in.q + w * g;
      out.dp = in.dp - wb * dg;
      out.dq = in.dq + w * dg;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Curve> map_curves(const BacklundStep& step,
                              const std::vector<Curve>& curves) {
  if (step.kind != BacklundStep::Kind::R &&
      step.kind != BacklundStep::Kind::Conj)
    return curves;
  std::vector<Curve> out = curves;
  for (Curve& c : out) {
    if (step.kind == BacklundStep::Kind::R) {
      const Complex i(0, 1);
      c.a *= i;
      c.b *= i;
      c.center *= i;
      c.th0 += 1.5707963267948966;
      c.th1 += 1.5707963267948966;
    } else {
      c.a = std::conj(c.a);
      c.b = std::conj(c.b);
      c.center = std::conj(c.center);
      c.th0 = -c.th0;
      c.th1 = -c.th1;
    }
  }
  return out;
}

Complex outer_point(const BacklundStep& step, Complex z_inner) {
  switch (step.kind) {
    case BacklundStep::Kind::R: return Complex(0, -1) * z_inner;
    case BacklundStep::Kind::Conj: return std::conj(z_inner);
    default: return z_inner;
  }
}

class TransformedOracle : public SolutionOracle {
 public:
  TransformedOracle(BacklundStep step, OraclePtr inner)
      : step_(step), inner_(std::move(inner)),
        prm_(map_params(step_, inner_->params())) {}

  const Params& params() const override { return prm_; }
  std::string description() const override {
    return step_.name() + "(" + inner_->description() + ")";
  }
  OracleSample eval(Complex z, const OracleAnchor* hint) const override {
    OracleSample in = inner_->eval(inner_point(step_, z), hint);
    return map_sample(step_, inner_->params(), in, z);
  }
  void sweep_curves(const std::vector<Curve>& curves, const SweepOptions& opt,
                    const SweepSink& sink,
                    const OracleAnchor* start_hint = nullptr) const override {
    inner_->sweep_curves(map_curves(step_, curves), opt,
                         [&](const OracleSample& s) {
                           sink(map_sample(step_, inner_->params(), s,
                                           outer_point(step_, s.z)));
                         },
                         start_hint);
  }

 private:
  BacklundStep step_;
  OraclePtr inner_;
  Params prm_;
};

void validate_result(const OraclePtr& out, const BacklundStep& step,
                     const ApplyOptions& opt) {
  if (!opt.validate) return;
  double r = probe_residual(*out, opt.n_probes);
  if (r > opt.residual_tol)
    throw LabError(Err::DiagnosticsError,
                   step.name() + ": transformed oracle violates the system, "
                                 "probe residual " + std::to_string(r));
}

}  // namespace

OraclePtr apply_trivial(const BacklundStep& step, OraclePtr sol,
                        const ApplyOptions& opt) {
  if (step.kind == BacklundStep::Kind::B)
    throw LabError(Err::ConfigError, "apply_trivial cannot apply a B step");
  OraclePtr out = std::make_shared<TransformedOracle>(step, std::move(sol));
  validate_result(out, step, opt);
  return out;
}

OraclePtr apply_B(ThirdRoot omega, OraclePtr sol, const ApplyOptions& opt) {
  const Complex w = omega.value(), wb = omega.conj().value();
  const Params& prm = sol->params();

  // denominator scan on deterministic probes in 2 <= |z| <= 10
  Rng rng(977);
  int tested = 0, vanishing = 0;
  OracleAnchor hint{};
  const OracleAnchor* hp = nullptr;
  for (int i = 0; i < 64 && tested < 16; ++i) {
    Complex z = rng.annulus(2, 10);
    OracleSample s;
    try {
      s = sol->eval(z, hp);
    } catch (const LabError&) {
      continue;
    }
    hint = s.anchor;
    hp = &hint;
    if (std::abs(s.p) + std::abs(s.q) > 50.0 * (1.0 + std::abs(z))) continue;
    ++tested;
    if (std::abs(w * s.p + wb * s.q - z) < 1e-8 * (1.0 + std::abs(z)))
      ++vanishing;
  }
  if (tested < 8)
    throw LabError(Err::NumericError, "apply_B: too few usable probes");
  bool probe_singular = (vanishing == tested);
  bool class_singular = std::abs(w * prm.alpha - wb * prm.beta + 1.0) < 1e-10;
  if (probe_singular && !class_singular)
    throw LabError(Err::DiagnosticsError,
                   "apply_B: denominator vanishes on all probes but the class "
                   "condition does not hold");
  if (probe_singular)
    throw LabError(Err::IdenticallySingular,
                   "apply_B: omega p + conj(omega) q - z vanishes identically");

  BacklundStep step = BacklundStep::B(omega);
  OraclePtr out = std::make_shared<TransformedOracle>(step, std::move(sol));
  validate_result(out, step, opt);
  return out;
}

OraclePtr apply_step(const BacklundStep& step, OraclePtr sol,
                     const ApplyOptions& opt) {
  if (step.kind == BacklundStep::Kind::B)
    return apply_B(step.omega, std::move(sol), opt);
  return apply_trivial(step, std::move(sol), opt);
}

OraclePtr chain(const std::vector<BacklundStep>& steps, OraclePtr sol,
                const ApplyOptions& opt) {
  for (size_t i = 0; i < steps.size(); ++i) {
    try {
      sol = apply_step(steps[i], std::move(sol), opt);
    } catch (LabError& e) {
      throw LabError(e.kind(),
                     "chain step " + std::to_string(i) + " (" +
                         steps[i].name() + "): " + e.what(),
                     int(i));
    }
  }
  return sol;
}

// ---------------------------------------------------------------------------

std::optional<PoleRecord> residue_transition(ThirdRoot omega,
                                             const PoleRecord& record) {
  if (record.residue == omega.conj()) return std::nullopt;  // pole removed
  PoleRecord out = record;
  out.h = Complex(0, 0);  // not transported; refit when needed
  out.source = PoleSource::constructed;
  out.string_id.reset();
  return out;
}

// ---------------------------------------------------------------------------

std::string Signature::str() const {
  std::string s = "<";
  for (int i = 0; i < 4; ++i) {
    s += root_tag(tau[size_t(i)]);
    if (i < 3) s += ' ';
  }
  return s + ">";
}

Complex Signature::alternating_sum() const {
  Complex s{0, 0};
  for (int nu = 1; nu <= 4; ++nu)
    s += (nu % 2 == 0 ? 1.0 : -1.0) * tau[size_t(nu - 1)].value();
  return s;
}

Signature signature_map(const BacklundStep& step, const Signature& sig) {
  Signature out;
  switch (step.kind) {
    case BacklundStep::Kind::M:
      for (int i = 0; i < 4; ++i)
        out.tau[size_t(i)] = step.omega.conj() * sig.tau[size_t(i)];
      break;
    case BacklundStep::Kind::B:
      for (int i = 0; i < 4; ++i) {
        ThirdRoot t = sig.tau[size_t(i)];
        out.tau[size_t(i)] = (step.omega == t.conj()) ? t : t.conj();
      }
      break;
    case BacklundStep::Kind::R:
      // quadrant nu of the image looks at quadrant nu+1 of the original
      for (int i = 0; i < 4; ++i)
        out.tau[size_t(i)] = sig.tau[size_t((i + 1) % 4)].conj();
      break;
    case BacklundStep::Kind::Conj:
      for (int i = 0; i < 4; ++i)
        out.tau[size_t(i)] = sig.tau[size_t(3 - i)].conj();
      break;
  }
  return out;
}

}  // namespace phlab
