// The two asymptotic series families at infinity and the rational-solution
// parameter tests.
#pragma once

#include <vector>

#include "phlab/core.hpp"

namespace phlab {

enum class AsyFamily { zero, third };

// zero family:  p ~ sum_{v=0..N} a_v z^(-2v-1), a_0 = -alpha,
//               H ~ sum_{v=0..N} H_v z^(-2v-1).
// third family: p ~ sum_{k=0..N+1} c_k z^(1-2k), c_0 = -tau,
//               H ~ sum_{k=0..N+2} H_k z^(3-2k), H_0 = 1/3.
// Both truncations end at the power z^(-2N-1); the first omitted term is
// O(z^(-2N-3)).
struct AsySeries {
  AsyFamily family = AsyFamily::zero;
  ThirdRoot tau;  // third family only
  Params params;
  int N = 1;
  std::vector<Complex> p_coeffs, q_coeffs, H_coeffs;
};

AsySeries series_zero(const Params& prm, int N);
AsySeries series_third(const Params& prm, ThirdRoot tau, int N);

struct SeriesEval {
  Complex p{}, q{}, H{};
  double err_proxy = 0.0;  // magnitude of the last included p/q term
};

SeriesEval eval_series(const AsySeries& s, Complex z);

struct RationalReport {
  enum class Kind { first_kind, second_kind, none };
  Kind kind = Kind::none;
  double degree = 0.0;             // -alpha beta for first-kind candidates
  double n1 = 0.0, nw = 0.0, nwb = 0.0;  // pole-count witnesses
};

// Tests the closure conditions for rational solutions (second kind in the
// tau = 1 normalization).
RationalReport rational_conditions(const Params& prm);

}  // namespace phlab
