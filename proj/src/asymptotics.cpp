#include "phlab/asymptotics.hpp"

#include <algorithm>
#include <cmath>

namespace phlab {

namespace {

// series in x = 1/z with support lo..hi over the exponent of x
struct XSeries {
  int lo = 0;
  std::vector<Complex> c;
  int hi() const { return lo + int(c.size()) - 1; }
  Complex at(int k) const {
    return (k < lo || k > hi()) ? Complex(0, 0) : c[size_t(k - lo)];
  }
};

XSeries xmul(const XSeries& a, const XSeries& b, int hi_cut) {
  XSeries out;
  out.lo = a.lo + b.lo;
  int hi = std::min(a.hi() + b.hi(), hi_cut);
  out.c.assign(size_t(std::max(0, hi - out.lo + 1)), Complex(0, 0));
  for (int i = a.lo; i <= a.hi(); ++i)
    for (int j = b.lo; j <= b.hi(); ++j)
      if (i + j <= hi) out.c[size_t(i + j - out.lo)] += a.at(i) * b.at(j);
  return out;
}

void xadd(XSeries& acc, const XSeries& a, Complex scale) {
  int lo = std::min(acc.lo, a.lo), hi = std::max(acc.hi(), a.hi());
  std::vector<Complex> c(size_t(hi - lo + 1), Complex(0, 0));
  for (int k = acc.lo; k <= acc.hi(); ++k) c[size_t(k - lo)] = acc.at(k);
  for (int k = a.lo; k <= a.hi(); ++k) c[size_t(k - lo)] += scale * a.at(k);
  acc.lo = lo;
  acc.c = std::move(c);
}

// H = (p^3 + q^3)/3 + z p q + beta p + alpha q in powers of x = 1/z
XSeries hamiltonian_xseries(const XSeries& p, const XSeries& q,
                            const Params& prm, int hi_cut) {
  XSeries p2 = xmul(p, p, hi_cut + 2);
  XSeries q2 = xmul(q, q, hi_cut + 2);
  XSeries acc;
  acc.lo = std::min(3 * p.lo, 2 * p.lo + q.lo) - 1;
  acc.c.assign(1, Complex(0, 0));
  xadd(acc, xmul(p2, p, hi_cut), Complex(1.0 / 3.0, 0));
  xadd(acc, xmul(q2, q, hi_cut), Complex(1.0 / 3.0, 0));
  XSeries zpq = xmul(p, q, hi_cut + 1);
  zpq.lo -= 1;  // multiply by z = x^-1
  xadd(acc, zpq, Complex(1, 0));
  xadd(acc, p, prm.beta);
  xadd(acc, q, prm.alpha);
  return acc;
}

}  // namespace

AsySeries series_zero(const Params& prm, int N) {
  if (N < 1) throw LabError(Err::ConfigError, "series_zero: N >= 1 required");
  AsySeries s;
  s.family = AsyFamily::zero;
  s.params = prm;
  s.N = N;
  auto& a = s.p_coeffs;
  auto& b = s.q_coeffs;
  a.assign(size_t(N + 1), Complex(0, 0));
  b.assign(size_t(N + 1), Complex(0, 0));
  a[0] = -prm.alpha;
  b[0] = -prm.beta;
  for (int k = 0; k + 1 <= N; ++k) {
    Complex cb{0, 0}, ca{0, 0};
    for (int i = 0; i <= k; ++i) {
      cb += b[size_t(i)] * b[size_t(k - i)];
      ca += a[size_t(i)] * a[size_t(k - i)];
    }
    a[size_t(k + 1)] = double(2 * k + 1) * a[size_t(k)] - cb;
    b[size_t(k + 1)] = -double(2 * k + 1) * b[size_t(k)] - ca;
  }

  XSeries px, qx;
  px.lo = qx.lo = 1;
  px.c.resize(size_t(2 * N + 1));
  qx.c.resize(size_t(2 * N + 1));
  for (int v = 0; v <= N; ++v) {
    px.c[size_t(2 * v)] = a[size_t(v)];
    qx.c[size_t(2 * v)] = b[size_t(v)];
  }
  XSeries H = hamiltonian_xseries(px, qx, prm, 2 * N + 1);
  s.H_coeffs.assign(size_t(N + 1), Complex(0, 0));
  for (int v = 0; v <= N; ++v) s.H_coeffs[size_t(v)] = H.at(2 * v + 1);
  return s;
}

AsySeries series_third(const Params& prm, ThirdRoot tau, int N) {
  if (N < 1) throw LabError(Err::ConfigError, "series_third: N >= 1 required");
  AsySeries s;
  s.family = AsyFamily::third;
  s.tau = tau;
  s.params = prm;
  s.N = N;
  const Complex tv = tau.value(), tb = tau.conj().value();
  auto& c = s.p_coeffs;
  auto& d = s.q_coeffs;
  c.assign(size_t(N + 2), Complex(0, 0));
  d.assign(size_t(N + 2), Complex(0, 0));
  c[0] = -tv;
  d[0] = -tb;
  for (int m = 1; m <= N + 1; ++m) {
    Complex sum_d{0, 0}, sum_c{0, 0};
    for (int i = 1; i <= m - 1; ++i) {
      sum_d += d[size_t(i)] * d[size_t(m - i)];
      sum_c += c[size_t(i)] * c[size_t(m - i)];
    }
    Complex r1 = -double(3 - 2 * m) * c[size_t(m - 1)] - sum_d;
    Complex r2 = -double(3 - 2 * m) * d[size_t(m - 1)] + sum_c;
    if (m == 1) {
      r1 -= prm.alpha;
      r2 += prm.beta;
    }
    c[size_t(m)] = (-r1 + 2.0 * tb * r2) / 3.0;
    d[size_t(m)] = (-2.0 * tv * r1 + r2) / 3.0;
  }

  XSeries px, qx;
  px.lo = qx.lo = -1;
  px.c.resize(size_t(2 * N + 3));
  qx.c.resize(size_t(2 * N + 3));
  for (int k = 0; k <= N + 1; ++k) {
    px.c[size_t(2 * k)] = c[size_t(k)];
    qx.c[size_t(2 * k)] = d[size_t(k)];
  }
  XSeries H = hamiltonian_xseries(px, qx, prm, 2 * N + 1);
  s.H_coeffs.assign(size_t(N + 3), Complex(0, 0));
  for (int k = 0; k <= N + 2; ++k) s.H_coeffs[size_t(k)] = H.at(2 * k - 3);
  return s;
}

SeriesEval eval_series(const AsySeries& s, Complex z) {
  SeriesEval out;
  Complex x = 1.0 / z;
  Complex x2 = x * x;
  if (s.family == AsyFamily::zero) {
    Complex p{0, 0}, q{0, 0}, H{0, 0};
    for (size_t v = s.p_coeffs.size(); v-- > 0;) {
      p = p * x2 + s.p_coeffs[v];
      q = q * x2 + s.q_coeffs[v];
      H = H * x2 + s.H_coeffs[v];
    }
    out.p = p * x;
    out.q = q * x;
    out.H = H * x;
    double xr = std::abs(x);
    out.err_proxy = std::max(std::abs(s.p_coeffs.back()),
                             std::abs(s.q_coeffs.back())) *
                    std::pow(xr, 2.0 * s.N + 1.0);
  } else {
    Complex p{0, 0}, q{0, 0};
    for (size_t k = s.p_coeffs.size(); k-- > 0;) {
      p = p * x2 + s.p_coeffs[k];
      q = q * x2 + s.q_coeffs[k];
    }
    out.p = p * z;
    out.q = q * z;
    Complex H{0, 0};
    for (size_t k = s.H_coeffs.size(); k-- > 0;) H = H * x2 + s.H_coeffs[k];
    out.H = H * z * z * z;
    double xr = std::abs(x);
    out.err_proxy = std::max(std::abs(s.p_coeffs.back()),
                             std::abs(s.q_coeffs.back())) *
                    std::pow(xr, 2.0 * s.N + 1.0);
  }
  return out;
}

namespace {

bool near_int(double v, double tol, double* out) {
  double r = std::round(v);
  if (std::abs(v - r) > tol) return false;
  if (out) *out = r;
  return true;
}

bool nonneg_int_triple(double n1, double nw, double nwb, double tol,
                       RationalReport* rep) {
  double a, b, c;
  if (!near_int(n1, tol, &a) || !near_int(nw, tol, &b) ||
      !near_int(nwb, tol, &c))
    return false;
  if (a < -0.5 || b < -0.5 || c < -0.5) return false;
  rep->n1 = a;
  rep->nw = b;
  rep->nwb = c;
  return true;
}

}  // namespace

RationalReport rational_conditions(const Params& prm) {
  RationalReport rep;
  const double tol = 1e-9;
  if (std::abs(prm.beta + std::conj(prm.alpha)) > tol) return rep;

  double u = prm.alpha.real(), v = prm.alpha.imag();
  double a2 = std::norm(prm.alpha);

  // first kind: total -alpha beta = |alpha|^2
  {
    double A = -u;
    double S = (2.0 / 3.0) * (a2 - A);
    double D = -2.0 * v / kSqrt3;
    RationalReport cand;
    if (nonneg_int_triple(a2 - S, 0.5 * (S + D), 0.5 * (S - D), 1e-7, &cand)) {
      cand.kind = RationalReport::Kind::first_kind;
      cand.degree = a2;
      return cand;
    }
  }

  // second kind, tau = 1 normalization
  {
    Complex tot_c = (prm.alpha * prm.alpha + prm.beta * prm.beta +
                     prm.alpha * prm.beta - 1.0) / 3.0;
    if (std::abs(tot_c.imag()) > 1e-7) return rep;
    double tot = tot_c.real();
    double A = (1.0 - u) / 3.0;
    double S = (2.0 / 3.0) * (tot - A);
    double D = 2.0 * v / kSqrt3;
    RationalReport cand;
    if (nonneg_int_triple(tot - S, 0.5 * (S + D), 0.5 * (S - D), 1e-7, &cand)) {
      cand.kind = RationalReport::Kind::second_kind;
      cand.degree = tot;
      return cand;
    }
  }
  return rep;
}

}  // namespace phlab
