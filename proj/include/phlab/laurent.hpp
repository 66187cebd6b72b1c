// Local Laurent models at simple poles of the system.
//
// At a pole lambda with Res p = rho (a third root of unity, Res q = -conj(rho))
// the series coefficients follow from matching powers in the differential
// system; everything is determined by (lambda, rho, h), where h is the free
// order-2 coefficient of the normalized series.
#pragma once

#include <vector>

#include "phlab/core.hpp"

namespace phlab {

enum class PoleSource { scanned, vaulted, constructed };

const char* pole_source_name(PoleSource s);
PoleSource pole_source_from_name(const std::string& n);

struct PoleRecord {
  Complex lambda{};
  ThirdRoot residue{};
  Complex h{};
  PoleSource source = PoleSource::scanned;
  std::optional<int> string_id;
};

// Laurent coefficients of p and q about record.lambda, orders -1..order.
// a[i], b[i] hold the coefficient of (z - lambda)^(i-1), i = 0..order+1.
class LaurentModel {
 public:
  LaurentModel() = default;
  LaurentModel(PoleRecord rec, Params prm, int order,
               std::vector<Complex> a, std::vector<Complex> b)
      : record_(rec), params_(prm), order_(order),
        a_(std::move(a)), b_(std::move(b)) {}

  const PoleRecord& record() const { return record_; }
  const Params& params() const { return params_; }
  int order() const { return order_; }

  Complex coeff_p(int k) const { return a_[size_t(k + 1)]; }  // k in [-1, order]
  Complex coeff_q(int k) const { return b_[size_t(k + 1)]; }

  Complex eval_p(Complex z) const;
  Complex eval_q(Complex z) const;
  // series derivatives d/dz
  Complex eval_dp(Complex z) const;
  Complex eval_dq(Complex z) const;

  // magnitude of the last retained term at distance r, used as a truncation
  // error proxy
  double tail_estimate(double r) const;

 private:
  PoleRecord record_{};
  Params params_{};
  int order_ = 0;
  std::vector<Complex> a_, b_;
};

// Expand the local solution through a pole at lambda with residue rho and
// free coefficient h, up to and including order N >= 2.
LaurentModel laurent_expand(const Params& prm, ThirdRoot residue,
                            Complex lambda, Complex h, int order);

// Laurent coefficients of H(z) along the local model, orders -1..order-2.
// out[i] is the coefficient of (z-lambda)^(i-1).
std::vector<Complex> hamiltonian_series(const LaurentModel& model);

struct FitOptions {
  int order = 10;               // model order used in the fit
  double residue_margin = 0.2;  // max distance to the nearest third root
  double min_lambda = 0.05;     // poles at the origin are not representable
  int max_gn_iter = 12;
};

struct PoleFit {
  PoleRecord record;
  LaurentModel model;
  double rms = 0.0;  // weighted residual of the final fit
};

// Fit (lambda, rho, h) from samples taken near a suspected pole. Throws
// NoPoleFound / AmbiguousResidue as described in the header comment of the
// implementation.
PoleFit fit_pole(const std::vector<State>& samples, const Params& prm,
                 const FitOptions& opt = {});

}  // namespace phlab
