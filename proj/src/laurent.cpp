#include "phlab/laurent.hpp"

#include <algorithm>
#include <array>
#include <cassert>

namespace phlab {

const char* pole_source_name(PoleSource s) {
  switch (s) {
    case PoleSource::scanned: return "scanned";
    case PoleSource::vaulted: return "vaulted";
    case PoleSource::constructed: return "constructed";
  }
  return "scanned";
}

PoleSource pole_source_from_name(const std::string& n) {
  if (n == "vaulted") return PoleSource::vaulted;
  if (n == "constructed") return PoleSource::constructed;
  return PoleSource::scanned;
}

// ---------------------------------------------------------------------------
// Expansion

LaurentModel laurent_expand(const Params& prm, ThirdRoot residue,
                            Complex lambda, Complex h, int order) {
  if (order < 2)
    throw LabError(Err::NumericError,
                   "laurent_expand: order must be >= 2 (free coefficient "
                   "enters at order 2)");
  if (!is_finite(lambda))
    throw LabError(Err::NumericError, "laurent_expand: lambda not finite");

  const Complex rho = residue.value();
  const Complex rhob = residue.conj().value();
  // normalized series x = conj(rho) p, y = rho q obey the same system with
  // parameters (conj(rho) alpha, rho beta)
  const Complex A = rhob * prm.alpha;
  const Complex B = rho * prm.beta;

  const int n = order;
  // index shift: c[k+1] is the coefficient of (z-lambda)^k
  std::vector<Complex> a(size_t(n + 2)), b(size_t(n + 2));
  auto ax = [&](int k) -> Complex& { return a[size_t(k + 1)]; };
  auto bx = [&](int k) -> Complex& { return b[size_t(k + 1)]; };

  ax(-1) = Complex(1.0, 0.0);
  bx(-1) = Complex(-1.0, 0.0);
  ax(0) = 0.5 * lambda;
  bx(0) = 0.5 * lambda;

  // convolution sum_{m+n=j, -1<=m,n<=j} c_m c_n (terms with index j+1 excluded)
  auto conv_low = [&](const std::vector<Complex>& c, int j) {
    Complex s(0.0, 0.0);
    for (int m = -1; m <= j; ++m) {
      int nn = j - m;
      if (nn < -1 || nn > j) continue;
      s += c[size_t(m + 1)] * c[size_t(nn + 1)];
    }
    return s;
  };

  for (int j = 0; j + 1 <= n; ++j) {
    Complex ra = -conv_low(b, j) - lambda * ax(j) - ax(j - 1);
    Complex rb = conv_low(a, j) + lambda * bx(j) + bx(j - 1);
    if (j == 0) {
      ra -= A;
      rb += B;
    }
    if (j == 1) {
      // resonance: the symmetric part is free and carries h
      ax(2) = h + 0.25 * ra;
      bx(2) = h - 0.25 * ra;
      continue;
    }
    double det = double(j + 1) * double(j + 1) - 4.0;
    ax(j + 1) = (double(j + 1) * ra + 2.0 * rb) / det;
    bx(j + 1) = (2.0 * ra + double(j + 1) * rb) / det;
  }

  for (auto& c : a) c *= rho;
  for (auto& c : b) c *= rhob;

  PoleRecord rec;
  rec.lambda = lambda;
  rec.residue = residue;
  rec.h = h;
  rec.source = PoleSource::constructed;
  return LaurentModel(rec, prm, n, std::move(a), std::move(b));
}

static Complex eval_series(const std::vector<Complex>& c, Complex t) {
  // c[0]/t + c[1] + c[2] t + ...
  Complex poly(0.0, 0.0);
  for (size_t i = c.size(); i-- > 1;) poly = poly * t + c[i];
  return poly + c[0] / t;
}

static Complex eval_series_deriv(const std::vector<Complex>& c, Complex t) {
  Complex poly(0.0, 0.0);
  for (size_t i = c.size(); i-- > 2;) poly = poly * t + double(i - 1) * c[i];
  return poly - c[0] / (t * t);
}

Complex LaurentModel::eval_p(Complex z) const { return eval_series(a_, z - record_.lambda); }
Complex LaurentModel::eval_q(Complex z) const { return eval_series(b_, z - record_.lambda); }
Complex LaurentModel::eval_dp(Complex z) const { return eval_series_deriv(a_, z - record_.lambda); }
Complex LaurentModel::eval_dq(Complex z) const { return eval_series_deriv(b_, z - record_.lambda); }

double LaurentModel::tail_estimate(double r) const {
  double rn = std::pow(r, order_);
  return (std::abs(a_.back()) + std::abs(b_.back())) * rn;
}

// ---------------------------------------------------------------------------
// Hamiltonian series

namespace {

// Laurent polynomial with support lo..hi, c[i] holds the coefficient of t^(lo+i)
struct LSeries {
  int lo = 0;
  std::vector<Complex> c;
  int hi() const { return lo + int(c.size()) - 1; }
  Complex at(int k) const {
    if (k < lo || k > hi()) return Complex(0.0, 0.0);
    return c[size_t(k - lo)];
  }
};

LSeries mul(const LSeries& x, const LSeries& y, int hi_cut) {
  LSeries out;
  out.lo = x.lo + y.lo;
  int hi = std::min(x.hi() + y.hi(), hi_cut);
  out.c.assign(size_t(std::max(0, hi - out.lo + 1)), Complex(0.0, 0.0));
  for (int i = x.lo; i <= x.hi(); ++i)
    for (int j = y.lo; j <= y.hi(); ++j) {
      int k = i + j;
      if (k > hi) continue;
      out.c[size_t(k - out.lo)] += x.at(i) * y.at(j);
    }
  return out;
}

void add_into(LSeries& acc, const LSeries& x, Complex scale) {
  if (x.c.empty()) return;
  int lo = std::min(acc.lo, x.lo);
  int hi = std::max(acc.hi(), x.hi());
  std::vector<Complex> c(size_t(hi - lo + 1), Complex(0.0, 0.0));
  for (int k = acc.lo; k <= acc.hi(); ++k) c[size_t(k - lo)] += acc.at(k);
  for (int k = x.lo; k <= x.hi(); ++k) c[size_t(k - lo)] += scale * x.at(k);
  acc.lo = lo;
  acc.c = std::move(c);
}

}  // namespace

std::vector<Complex> hamiltonian_series(const LaurentModel& model) {
  const int n = model.order();
  const int hi = n - 2;  // products of truncated series are reliable up to here
  LSeries p, q;
  p.lo = q.lo = -1;
  p.c.resize(size_t(n + 2));
  q.c.resize(size_t(n + 2));
  for (int k = -1; k <= n; ++k) {
    p.c[size_t(k + 1)] = model.coeff_p(k);
    q.c[size_t(k + 1)] = model.coeff_q(k);
  }
  LSeries z;  // z = lambda + t
  z.lo = 0;
  z.c = {model.record().lambda, Complex(1.0, 0.0)};

  LSeries p2 = mul(p, p, hi + 1);
  LSeries q2 = mul(q, q, hi + 1);
  LSeries acc;
  acc.lo = -3;
  acc.c.assign(size_t(hi + 4), Complex(0.0, 0.0));
  add_into(acc, mul(p2, p, hi), Complex(1.0 / 3.0, 0.0));
  add_into(acc, mul(q2, q, hi), Complex(1.0 / 3.0, 0.0));
  add_into(acc, mul(z, mul(p, q, hi + 1), hi), Complex(1.0, 0.0));
  add_into(acc, p, model.params().beta);
  add_into(acc, q, model.params().alpha);

  // orders -3 and -2 cancel identically; keep -1..hi
  std::vector<Complex> out(size_t(hi + 2));
  for (int k = -1; k <= hi; ++k) out[size_t(k + 1)] = acc.at(k);
  return out;
}

// ---------------------------------------------------------------------------
// Fitting

PoleFit fit_pole(const std::vector<State>& samples, const Params& prm,
                 const FitOptions& opt) {
  if (samples.size() < 4)
    throw LabError(Err::NoPoleFound, "fit_pole: too few samples");

  // locate the sample deepest into the pole
  size_t best = 0;
  double pmax = 0.0;
  Complex centroid(0.0, 0.0);
  for (size_t i = 0; i < samples.size(); ++i) {
    centroid += samples[i].z;
    double m = std::abs(samples[i].p);
    if (m > pmax) {
      pmax = m;
      best = i;
    }
  }
  centroid /= double(samples.size());
  if (pmax < 40.0)
    throw LabError(Err::NoPoleFound, "fit_pole: |p| moderate on all samples");

  const State& sb = samples[best];
  auto [dpb, dqb] = rhs(sb, prm);
  if (std::abs(dpb) == 0.0)
    throw LabError(Err::NoPoleFound, "fit_pole: degenerate derivative");
  Complex lambda = sb.z + sb.p / dpb;

  double spread = 0.0;
  for (const auto& s : samples) spread = std::max(spread, std::abs(s.z - centroid));
  if (std::abs(lambda - centroid) > 2.0 * spread + 1e-12)
    throw LabError(Err::NoPoleFound, "fit_pole: no root of 1/p inside sample hull");
  if (std::abs(lambda) < opt.min_lambda)
    throw LabError(Err::NoPoleFound, "fit_pole: pole at the origin is excluded");

  // residue from the leading balance p ~ rho/(z-lambda): rho = -p^2/p'
  double margin = 0.0;
  Complex rho_est = -sb.p * sb.p / dpb;
  ThirdRoot residue = ThirdRoot::nearest(rho_est, &margin);
  if (margin > opt.residue_margin)
    throw LabError(Err::AmbiguousResidue, "fit_pole: residue margin " +
                                              std::to_string(margin));

  // Gauss-Newton over (lambda, h) on the full local model, residuals weighted
  // by 1/(1+|p|) so every sample contributes at a comparable relative level.
  Complex h(0.0, 0.0);
  double rms = 0.0;
  auto residual = [&](Complex lam, Complex hh, std::vector<Complex>& r) {
    LaurentModel m = laurent_expand(prm, residue, lam, hh, opt.order);
    r.clear();
    r.reserve(2 * samples.size());
    for (const auto& s : samples) {
      Complex pm = m.eval_p(s.z), qm = m.eval_q(s.z);
      double w = 1.0 / (1.0 + std::abs(pm));
      r.push_back(w * (pm - s.p));
      r.push_back(w * (qm - s.q));
    }
  };

  std::vector<Complex> r0, rl, rh;
  for (int it = 0; it < opt.max_gn_iter; ++it) {
    residual(lambda, h, r0);
    double dl = 1e-7 / std::max(1.0, std::abs(lambda));
    double dh = 1e-7 * (1.0 + std::abs(h));
    residual(lambda + dl, h, rl);
    residual(lambda, h + dh, rh);
    // columns of the Jacobian
    Complex j11(0, 0), j12(0, 0), j22(0, 0), g1(0, 0), g2(0, 0);
    for (size_t i = 0; i < r0.size(); ++i) {
      Complex c1 = (rl[i] - r0[i]) / dl;
      Complex c2 = (rh[i] - r0[i]) / dh;
      j11 += std::conj(c1) * c1;
      j12 += std::conj(c1) * c2;
      j22 += std::conj(c2) * c2;
      g1 += std::conj(c1) * r0[i];
      g2 += std::conj(c2) * r0[i];
    }
    Complex det = j11 * j22 - j12 * std::conj(j12);
    if (std::abs(det) == 0.0) break;
    Complex dlam = -(j22 * g1 - j12 * g2) / det;
    Complex dhh = -(j11 * g2 - std::conj(j12) * g1) / det;
    lambda += dlam;
    h += dhh;
    if (std::abs(dlam) < 1e-13 * (1.0 + std::abs(lambda)) &&
        std::abs(dhh) < 1e-12 * (1.0 + std::abs(h)))
      break;
  }
  residual(lambda, h, r0);
  double s2 = 0.0;
  for (auto& v : r0) s2 += std::norm(v);
  rms = std::sqrt(s2 / double(r0.size()));
  if (!is_finite(lambda) || !is_finite(h) || rms > 1e-3)
    throw LabError(Err::NoPoleFound, "fit_pole: model fit did not converge, rms " +
                                         std::to_string(rms));
  if (std::abs(lambda) < opt.min_lambda)
    throw LabError(Err::NoPoleFound, "fit_pole: pole at the origin is excluded");

  PoleFit out;
  out.record.lambda = lambda;
  out.record.residue = residue;
  out.record.h = h;
  out.record.source = PoleSource::scanned;
  out.model = laurent_expand(prm, residue, lambda, h, opt.order);
  out.rms = rms;
  return out;
}

}  // namespace phlab
