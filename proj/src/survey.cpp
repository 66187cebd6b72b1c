#include "phlab/survey.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace phlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kVarpiReal = 3.6275987284684357;  // 2 pi / sqrt 3
constexpr double kVarpiImag = 2.0943951023931953;  // |2 pi i / 3|
}  // namespace

// ---------------------------------------------------------------------------
// PoleDB

bool PoleDB::insert(const PoleRecord& rec, double rms) {
  for (size_t i = 0; i < records_.size(); ++i) {
    double tol = 0.1 / std::max(std::abs(records_[i].lambda), 1.0);
    if (std::abs(records_[i].lambda - rec.lambda) < tol) {
      if (rms < rms_[i]) {
        records_[i] = rec;
        rms_[i] = rms;
      }
      return false;
    }
  }
  records_.push_back(rec);
  rms_.push_back(rms);
  return true;
}

// ---------------------------------------------------------------------------
// Scan

namespace {

std::vector<double> scan_radii(const Annulus& region, double density) {
  std::vector<double> radii;
  double r = region.r0;
  double base = std::abs(region.center);
  while (r < region.r1) {
    radii.push_back(r);
    r += density * kPi / (3.0 * std::max(base + r, 1.0));
  }
  radii.push_back(region.r1);
  return radii;
}

struct Candidate {
  Complex z;
  OracleAnchor anchor;
};

// Newton refinement of a pole of the oracle from a nearby start point.
// Returns the pole estimate or nullopt.
std::optional<Complex> refine_pole(const SolutionOracle& sol, const Candidate& cand,
                                   double reach) {
  OracleAnchor hint = cand.anchor;
  Complex z = cand.z;
  OracleSample s;
  try {
    s = sol.eval(z, &hint);
  } catch (const LabError&) {
    return std::nullopt;
  }
  for (int it = 0; it < 40; ++it) {
    if (std::abs(s.dp) == 0.0) return std::nullopt;
    Complex step = s.p / s.dp;
    Complex z_next = z + step;
    if (std::abs(z_next - cand.z) > reach) return std::nullopt;
    if (std::abs(step) < 3e-4 / std::max(1.0, std::abs(z_next))) return z_next;
    z = z_next;
    hint = s.anchor;
    try {
      s = sol.eval(z, &hint);
    } catch (const LabError&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<PoleFit> fit_pole_at(const SolutionOracle& sol, Complex lam0,
                                   const OracleAnchor& anchor, int order) {
  double L = std::max(std::abs(lam0), 1.0);
  std::vector<State> samples;
  OracleAnchor hint = anchor;
  static const double rings[3] = {0.035, 0.10, 0.22};
  static const int counts[3] = {4, 6, 5};
  for (int ri = 0; ri < 3; ++ri) {
    for (int j = 0; j < counts[ri]; ++j) {
      double th = kTwoPi * (j + 0.37 * (ri + 1)) / counts[ri];
      Complex z = lam0 + std::polar(rings[ri] / L, th);
      try {
        OracleSample s = sol.eval(z, &hint);
        hint = s.anchor;
        samples.push_back(State{z, s.p, s.q});
      } catch (const LabError&) {
      }
    }
  }
  if (samples.size() < 8) return std::nullopt;
  FitOptions fopt;
  fopt.order = order;
  try {
    return fit_pole(samples, sol.params(), fopt);
  } catch (const LabError&) {
    return std::nullopt;
  }
}

double choose_stitch_angle(const SolutionOracle& sol, const Annulus& region) {
  double best_angle = 0.0, best_score = 1e300;
  for (int a = 0; a < 16; ++a) {
    double th = kTwoPi * (a + 0.31) / 16.0;
    double score = 0.0;
    bool ok = true;
    OracleAnchor hint{};
    const OracleAnchor* hp = nullptr;
    for (double f : {0.0, 0.5, 1.0}) {
      double r = region.r0 + f * (region.r1 - region.r0);
      Complex z = region.center + std::polar(r, th);
      try {
        OracleSample s = sol.eval(z, hp);
        hint = s.anchor;
        hp = &hint;
        score += (std::abs(s.p) + std::abs(s.q)) / (1.0 + std::abs(z));
      } catch (const LabError&) {
        ok = false;
        break;
      }
    }
    if (ok && score < best_score) {
      best_score = score;
      best_angle = th;
    }
  }
  if (best_score == 1e300)
    throw LabError(Err::NumericError, "scan: no usable stitch angle found");
  return best_angle;
}

}  // namespace

PoleDB scan(const OraclePtr& sol, const Annulus& region, const ScanOptions& opt) {
  if (region.r0 <= 0.0 || region.r1 <= region.r0)
    throw LabError(Err::ConfigError, "scan: bad annulus");
  if (std::abs(region.center) < 1e-12 && region.r0 < 1.0)
    throw LabError(Err::ConfigError, "scan: inner radius must be >= 1");

  std::vector<double> radii = scan_radii(region, opt.density);
  double theta_s = opt.stitch_angle < 1e8 ? opt.stitch_angle
                                          : choose_stitch_angle(*sol, region);

  // anchors along the stitch ray, one per circle
  std::vector<OracleAnchor> anchors(radii.size());
  {
    OracleAnchor hint{};
    const OracleAnchor* hp = nullptr;
    for (size_t k = 0; k < radii.size(); ++k) {
      bool done = false;
      for (double dth : {0.0, 0.05, -0.05, 0.11}) {
        Complex z = region.center + std::polar(radii[k], theta_s + dth);
        try {
          OracleSample s = sol->eval(z, hp);
          anchors[k] = s.anchor;
          hint = s.anchor;
          hp = &hint;
          done = true;
          break;
        } catch (const LabError&) {
        }
      }
      if (!done)
        throw LabError(Err::NumericError,
                       "scan: could not anchor circle " + std::to_string(k),
                       int(k));
    }
  }

  // per-circle work, parallelizable; results merged in circle order
  std::vector<std::vector<std::pair<PoleFit, double>>> found(radii.size());
  auto work_circle = [&](size_t k) {
    double r = radii[k];
    double scale = std::abs(region.center) + r;
    double dr = opt.density * kPi / (3.0 * std::max(scale, 1.0));

    std::vector<OracleSample> samples;
    SweepOptions sopt;
    sopt.tol = opt.tol;
    sopt.max_arc = 0.3 / std::max(scale, 1.0);
    Curve circle = Curve::arc(region.center, r, theta_s, theta_s + kTwoPi);
    sol->sweep_curves({circle}, sopt, [&](const OracleSample& s) {
      samples.push_back(s);
    }, &anchors[k]);

    // local maxima of the scaled magnitude above the bump threshold
    std::vector<Candidate> cands;
    auto mag = [&](const OracleSample& s) {
      return (std::abs(s.p) + std::abs(s.q)) / (1.0 + std::abs(s.z));
    };
    for (size_t i = 1; i + 1 < samples.size(); ++i) {
      double m = mag(samples[i]);
      if (m > opt.bump_factor && m >= mag(samples[i - 1]) &&
          m >= mag(samples[i + 1]))
        cands.push_back(Candidate{samples[i].z, samples[i].anchor});
    }

    for (const Candidate& c : cands) {
      auto lam = refine_pole(*sol, c, 4.0 * dr + 0.3);
      if (!lam) continue;
      double d = std::abs(*lam - region.center);
      if (d < region.r0 - 2.0 * dr || d > region.r1 + 2.0 * dr) continue;
      auto fit = fit_pole_at(*sol, *lam, c.anchor, opt.fit_order);
      if (!fit) continue;
      found[k].push_back({*fit, fit->rms});
    }
  };

  int jobs = std::max(1, opt.jobs);
  if (jobs == 1) {
    for (size_t k = 0; k < radii.size(); ++k) work_circle(k);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int j = 0; j < jobs; ++j)
      pool.emplace_back([&]() {
        for (size_t k = next.fetch_add(1); k < radii.size();
             k = next.fetch_add(1))
          work_circle(k);
      });
    for (auto& t : pool) t.join();
  }

  PoleDB db;
  db.region = region;
  db.density = opt.density;
  {
    std::hash<std::string> H;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016zx", H(sol->description()));
    db.solution_id = buf;
  }
  for (size_t k = 0; k < radii.size(); ++k)
    for (auto& [fit, rms] : found[k])
      if (region.contains(fit.record.lambda)) db.insert(fit.record, rms);
  return db;
}

// ---------------------------------------------------------------------------
// String tracking

std::vector<StringRecord> track_strings(PoleDB& db, const TrackOptions& opt) {
  auto& recs = db.records();
  const size_t n = recs.size();
  std::vector<int> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = int(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double da = std::abs(recs[size_t(a)].lambda), dbm = std::abs(recs[size_t(b)].lambda);
    if (da != dbm) return da < dbm;
    return std::arg(recs[size_t(a)].lambda) < std::arg(recs[size_t(b)].lambda);
  });

  std::vector<bool> assigned(n, false);
  std::vector<StringRecord> strings;

  auto find_next = [&](int cur, VarpiKind kind, int sign) -> int {
    Complex lam = recs[size_t(cur)].lambda;
    Complex varpi = kind == VarpiKind::real ? Complex(kVarpiReal, 0)
                                            : Complex(0, kVarpiImag);
    Complex pred = lam + double(sign) * varpi / lam;
    double win = opt.window / std::abs(lam);
    int best = -1;
    double best_d = win;
    for (size_t j = 0; j < n; ++j) {
      if (assigned[j] || int(j) == cur) continue;
      if (!(recs[j].residue == recs[size_t(cur)].residue)) continue;
      double d = std::abs(recs[j].lambda - pred);
      if (d < best_d) {
        best_d = d;
        best = int(j);
      }
    }
    return best;
  };

  for (int idx : order) {
    if (assigned[size_t(idx)]) continue;
    StringRecord s;
    s.residue = recs[size_t(idx)].residue;
    s.member_ids.push_back(idx);
    assigned[size_t(idx)] = true;

    bool kind_fixed = false;
    int cur = idx;
    while (true) {
      int next = -1;
      if (!kind_fixed) {
        for (VarpiKind kind : {VarpiKind::real, VarpiKind::imaginary}) {
          for (int sign : {+1, -1}) {
            next = find_next(cur, kind, sign);
            if (next >= 0) {
              s.varpi_kind = kind;
              s.sign = sign;
              kind_fixed = true;
              break;
            }
          }
          if (next >= 0) break;
        }
      } else {
        next = find_next(cur, s.varpi_kind, s.sign);
      }
      if (next < 0) break;
      s.member_ids.push_back(next);
      assigned[size_t(next)] = true;
      cur = next;
    }
    strings.push_back(std::move(s));
  }

  // merge fragments whose ends chain onto each other
  bool merged = true;
  while (merged) {
    merged = false;
    for (size_t a = 0; a < strings.size() && !merged; ++a) {
      for (size_t b = 0; b < strings.size() && !merged; ++b) {
        if (a == b) continue;
        StringRecord& A = strings[a];
        StringRecord& B = strings[b];
        if (!(A.residue == B.residue)) continue;
        Complex lamA = recs[size_t(A.member_ids.back())].lambda;
        Complex lamB = recs[size_t(B.member_ids.front())].lambda;
        if (std::abs(lamB) < std::abs(lamA)) continue;
        double win = opt.window / std::abs(lamA);
        bool match = false;
        if (A.member_ids.size() >= 2) {
          Complex varpi = A.varpi_kind == VarpiKind::real
                              ? Complex(kVarpiReal, 0)
                              : Complex(0, kVarpiImag);
          match = std::abs(lamB - (lamA + double(A.sign) * varpi / lamA)) < win;
        } else {
          // orphan: try all four continuations
          for (VarpiKind kind : {VarpiKind::real, VarpiKind::imaginary})
            for (int sign : {+1, -1}) {
              Complex varpi = kind == VarpiKind::real ? Complex(kVarpiReal, 0)
                                                      : Complex(0, kVarpiImag);
              if (std::abs(lamB - (lamA + double(sign) * varpi / lamA)) < win)
                match = true;
            }
        }
        if (match) {
          A.member_ids.insert(A.member_ids.end(), B.member_ids.begin(),
                              B.member_ids.end());
          if (A.member_ids.size() >= 2 && B.member_ids.size() >= 2 &&
              A.varpi_kind != B.varpi_kind)
            continue;  // incompatible kinds; should not happen
          if (A.member_ids.size() == B.member_ids.size()) {
          }
          if (B.member_ids.size() >= 2) {
            A.varpi_kind = B.varpi_kind;
            A.sign = B.sign;
          }
          strings.erase(strings.begin() + long(b));
          merged = true;
        }
      }
    }
  }

  // deterministic ids and direction estimates
  std::sort(strings.begin(), strings.end(),
            [&](const StringRecord& x, const StringRecord& y) {
              double dx = std::arg(recs[size_t(x.member_ids.back())].lambda);
              double dy = std::arg(recs[size_t(y.member_ids.back())].lambda);
              if (dx != dy) return dx < dy;
              return std::abs(recs[size_t(x.member_ids.front())].lambda) <
                     std::abs(recs[size_t(y.member_ids.front())].lambda);
            });
  for (size_t i = 0; i < strings.size(); ++i) {
    strings[i].id = int(i);
    strings[i].direction =
        std::arg(recs[size_t(strings[i].member_ids.back())].lambda);
    for (int m : strings[i].member_ids)
      recs[size_t(m)].string_id = int(i);
  }
  return strings;
}

// ---------------------------------------------------------------------------
// Census and deficiency

CensusReport census(PoleDB& db, const std::vector<double>& radii,
                    const CensusOptions& opt) {
  CensusReport rep;
  auto strings = track_strings(db, opt.track);
  const auto& recs = db.records();

  for (double r : radii) {
    CensusRow row;
    row.r = r;
    for (const auto& p : recs) {
      if (std::abs(p.lambda - db.region.center) > r) continue;
      ++row.n_total;
      switch (p.residue.k()) {
        case 0: ++row.n_1; break;
        case 1: ++row.n_w; break;
        default: ++row.n_wbar; break;
      }
    }
    rep.rows.push_back(row);
  }

  for (const auto& s : strings) {
    if (int(s.member_ids.size()) < opt.track.min_members) continue;
    double outer = std::abs(recs[size_t(s.member_ids.back())].lambda);
    if (outer < opt.track.outer_frac * db.region.r1) continue;
    switch (s.residue.k()) {
      case 0: ++rep.strings_1; break;
      case 1: ++rep.strings_w; break;
      default: ++rep.strings_wbar; break;
    }
  }

  try {
    rep.delta0 = deficiency(rep);
  } catch (const LabError& e) {
    if (e.kind() == Err::DivisionByZeroClass) {
      rep.delta0 = 1.0;
      rep.delta0_is_picard = true;
    }
  }

  double num = 0.0, den = 0.0;
  for (const auto& row : rep.rows) {
    num += row.n_total * row.r * row.r;
    den += row.r * row.r * row.r * row.r;
  }
  rep.quad_coeff = den > 0 ? num / den : 0.0;
  return rep;
}

double deficiency(const CensusReport& report) {
  int denom = report.strings_w + report.strings_wbar;
  if (denom == 0)
    throw LabError(Err::DivisionByZeroClass,
                   "deficiency: no strings outside the residue-1 class "
                   "(Picard case, delta = 1)");
  return 1.0 - 2.0 * double(report.strings_1) / double(denom);
}

// ---------------------------------------------------------------------------
// Signatures

MeasuredSignature signature_measure(const SolutionOracle& sol, double radius,
                                    const std::vector<StringRecord>* strings,
                                    const PoleDB* db) {
  if (radius < 10.0)
    throw LabError(Err::ConfigError, "signature_measure: radius must be >= 10");
  MeasuredSignature out;
  std::array<Complex, 4> v{};
  OracleAnchor hint{};
  const OracleAnchor* hp = nullptr;
  for (int nu = 1; nu <= 4; ++nu) {
    Complex z = std::polar(radius, (2 * nu - 1) * kPi / 4.0);
    OracleSample s = sol.eval(z, hp);
    hint = s.anchor;
    hp = &hint;
    v[size_t(nu - 1)] = s.p / z;
  }

  bool all_zero = true;
  for (auto& x : v) all_zero = all_zero && std::abs(x) < 0.1;
  if (all_zero) {
    out.zero_family = true;
    return out;
  }

  for (int i = 0; i < 4; ++i) {
    double margin = 0.0;
    out.sig.tau[size_t(i)] = ThirdRoot::nearest(-v[size_t(i)], &margin);
    out.margins[size_t(i)] = margin;
    if (margin > 0.3)
      throw LabError(Err::UnclassifiableSector,
                     "signature_measure: p/z is near no third root in "
                     "quadrant " + std::to_string(i + 1));
  }

  if (strings && db) {
    for (const auto& s : *strings) {
      if (s.member_ids.size() < 4) continue;
      double dir = s.direction;
      while (dir < 0) dir += kTwoPi;
      int nu = int(std::lround(dir / (kPi / 2))) % 4;
      if (std::abs(dir - nu * kPi / 2) > 0.25 &&
          std::abs(dir - kTwoPi - nu * kPi / 2) > 0.25)
        continue;  // not asymptotic to a ray; no table prediction
      Complex tau_ccw = out.sig.tau[size_t(nu % 4)].value();
      Complex tau_cw = out.sig.tau[size_t((nu + 3) % 4)].value();
      double sgn = (nu % 2 == 0) ? 1.0 : -1.0;
      Complex pred = Complex(0, 1) * sgn * (tau_cw - tau_ccw) / kSqrt3;
      double d = 0.0;
      ThirdRoot pr = ThirdRoot::nearest(pred, &d);
      if (d > 0.2 || !(pr == s.residue)) out.table_consistent = false;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Zero scan for B_omega

std::vector<Complex> zero_scan_for_B(const OraclePtr& sol, ThirdRoot omega,
                                     const Annulus& region,
                                     const ScanOptions& opt) {
  const Complex w = omega.value(), wb = omega.conj().value();
  // identically-zero precondition on probes
  {
    Rng rng(977);
    int tested = 0, vanish = 0;
    OracleAnchor hint{};
    const OracleAnchor* hp = nullptr;
    for (int i = 0; i < 64 && tested < 16; ++i) {
      Complex z = rng.annulus(std::max(1.0, region.r0), region.r1);
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
      if (std::abs(w * s.p + wb * s.q - z) < 1e-8 * (1.0 + std::abs(z))) ++vanish;
    }
    if (tested >= 8 && vanish == tested)
      throw LabError(Err::IdenticallySingular,
                     "zero_scan_for_B: combination vanishes identically");
  }

  std::vector<double> radii = scan_radii(region, opt.density);
  double theta_s = opt.stitch_angle < 1e8 ? opt.stitch_angle
                                          : choose_stitch_angle(*sol, region);
  std::vector<Complex> zeros;
  auto push_zero = [&](Complex z) {
    for (const Complex& u : zeros)
      if (std::abs(u - z) < 0.1 / std::max(std::abs(u), 1.0)) return;
    zeros.push_back(z);
  };

  OracleAnchor ray_hint{};
  const OracleAnchor* rhp = nullptr;
  for (double r : radii) {
    Complex za = region.center + std::polar(r, theta_s);
    OracleSample sa;
    try {
      sa = sol->eval(za, rhp);
    } catch (const LabError&) {
      continue;
    }
    ray_hint = sa.anchor;
    rhp = &ray_hint;

    std::vector<OracleSample> samples;
    SweepOptions sopt;
    sopt.tol = opt.tol;
    sopt.max_arc = 0.3 / std::max(std::abs(region.center) + r, 1.0);
    sol->sweep_curves({Curve::arc(region.center, r, theta_s, theta_s + kTwoPi)},
                      sopt, [&](const OracleSample& s) { samples.push_back(s); },
                      &ray_hint);

    auto fval = [&](const OracleSample& s) {
      return w * s.p + wb * s.q - s.z;
    };
    auto fmag = [&](const OracleSample& s) {
      return std::abs(fval(s)) / (1.0 + std::abs(s.z));
    };
    for (size_t i = 1; i + 1 < samples.size(); ++i) {
      double m = fmag(samples[i]);
      if (m > 0.75 || m > fmag(samples[i - 1]) || m > fmag(samples[i + 1]))
        continue;
      // Newton on the combination, exact derivative
      Complex z = samples[i].z;
      OracleAnchor hint = samples[i].anchor;
      OracleSample s = samples[i];
      bool ok = false;
      for (int it = 0; it < 30; ++it) {
        Complex f = fval(s);
        Complex df = w * s.dp + wb * s.dq - 1.0;
        if (std::abs(df) == 0.0) break;
        Complex step = -f / df;
        z += step;
        if (std::abs(z - samples[i].z) > 1.0) break;
        try {
          s = sol->eval(z, &hint);
        } catch (const LabError&) {
          break;
        }
        hint = s.anchor;
        if (std::abs(step) < 1e-11 * (1.0 + std::abs(z))) {
          ok = std::abs(fval(s)) < 1e-8 * (1.0 + std::abs(z));
          break;
        }
      }
      if (!ok) continue;
      if (!region.contains(z)) continue;
      // exclude zeros sitting on poles of p
      if (std::abs(s.p) + std::abs(s.q) > 50.0 * (1.0 + std::abs(z))) continue;
      push_zero(z);
    }
  }
  std::sort(zeros.begin(), zeros.end(), [](Complex a, Complex b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    return std::arg(a) < std::arg(b);
  });
  return zeros;
}

// ---------------------------------------------------------------------------
// Residue balance integral over a modified contour

Complex residue_sum(const PoleDB& db, double r) {
  Complex s{0, 0};
  for (const auto& rec : db.records())
    if (std::abs(rec.lambda) <= r) s += rec.residue.value();
  return s;
}

Complex residue_integral(const SolutionOracle& sol, const PoleDB& db, double r,
                         double delta, const Tolerances& tol) {
  struct Detour {
    double a = 0, b = 0;  // angular span on the main circle, lifted
    Complex lam;
    double rho = 0;
    bool outside = false;  // detour bulges away from the origin
  };
  std::vector<Detour> detours;
  for (const auto& rec : db.records()) {
    Complex lam = rec.lambda;
    double al = std::abs(lam);
    double rho = delta / al;
    double u = (r * r + al * al - rho * rho) / (2.0 * r * al);
    if (u <= -1.0 || u >= 1.0) continue;
    double hw = std::acos(u);
    double tc = std::arg(lam);
    detours.push_back(Detour{tc - hw, tc + hw, lam, rho, al <= r});
  }
  std::sort(detours.begin(), detours.end(),
            [](const Detour& x, const Detour& y) { return x.a < y.a; });

  // shrink overlapping neighbours (including the wrap-around pair)
  auto reshape = [&](Detour& d) {
    double al = std::abs(d.lam), tc = std::arg(d.lam);
    d.rho *= 0.7;
    double u = (r * r + al * al - d.rho * d.rho) / (2.0 * r * al);
    double hw = (u >= 1.0) ? 0.0 : std::acos(u);
    d.a = tc - hw;
    d.b = tc + hw;
  };
  if (detours.size() > 1) {
    for (int pass = 0; pass < 64; ++pass) {
      bool overlap = false;
      for (size_t i = 0; i < detours.size(); ++i) {
        Detour& x = detours[i];
        Detour& y = detours[(i + 1) % detours.size()];
        double ya = y.a + (i + 1 == detours.size() ? kTwoPi : 0.0);
        if (x.b > ya - 1e-9) {
          reshape(x);
          reshape(y);
          overlap = true;
        }
      }
      if (!overlap) break;
    }
  }

  // assemble: walk the lifted angle line over one full turn
  std::vector<Curve> pieces;
  double start = detours.empty() ? 0.0 : detours.back().b - kTwoPi;
  double cursor = start;
  for (size_t i = 0; i <= detours.size(); ++i) {
    double next_a = (i < detours.size()) ? detours[i].a : start + kTwoPi;
    if (next_a > cursor + 1e-12)
      pieces.push_back(Curve::arc(Complex(0, 0), r, cursor, next_a));
    if (i == detours.size()) break;
    const Detour& d = detours[i];
    Complex A = std::polar(r, d.a);
    Complex B = std::polar(r, d.b);
    double a1 = std::arg(A - d.lam), a2 = std::arg(B - d.lam);
    double dth = a2 - a1;
    while (dth <= -kPi) dth += kTwoPi;
    while (dth > kPi) dth -= kTwoPi;
    double alt = dth > 0 ? dth - kTwoPi : dth + kTwoPi;
    bool mid_out = std::abs(d.lam + std::polar(d.rho, a1 + 0.5 * dth)) > r;
    double use = (mid_out == d.outside) ? dth : alt;
    pieces.push_back(Curve::arc(d.lam, d.rho, a1, a1 + use));
    cursor = d.b;
  }

  // Hermite quadrature over dense sweeps, piece by piece
  Complex integral{0, 0};
  OracleAnchor hint{};
  const OracleAnchor* hp = nullptr;
  for (const Curve& c : pieces) {
    SweepOptions sopt;
    sopt.tol = tol;
    bool detour_piece = c.radius < 0.9 * r;
    sopt.max_arc = detour_piece ? 0.02 * c.radius : 0.01;
    OracleSample prev{};
    bool have_prev = false;
    sol.sweep_curves({c}, sopt, [&](const OracleSample& s) {
      if (have_prev) {
        Complex h = s.z - prev.z;
        integral += 0.5 * h * (prev.p + s.p) + h * h / 12.0 * (prev.dp - s.dp);
      }
      prev = s;
      have_prev = true;
      hint = s.anchor;
    }, hp);
    hp = &hint;
  }
  return integral / Complex(0, kTwoPi);
}

}  // namespace phlab
