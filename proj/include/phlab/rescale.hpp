// Re-scaling limits p_k(zeta) = p(kappa + zeta/kappa)/kappa, cluster-value
// estimation, and oracles for the autonomous limit system
// u' = -v^2 - u, v' = u^2 + v with first integral (u^3 + v^3)/3 + u v.
#pragma once

#include "phlab/laurent.hpp"
#include "phlab/oracle.hpp"

namespace phlab {

// (p_k, q_k) at zeta; pole encounters come back as infinite markers.
std::pair<Complex, Complex> rescale_eval(const SolutionOracle& sol,
                                         Complex kappa, Complex zeta);

// kappa^{-3} H(kappa), the off-pole cluster estimate
Complex cluster_estimate_at(const SolutionOracle& sol, Complex kappa);

// lambda^{-3} (2h + lambda^3/3), the pole-branch estimate
Complex cluster_estimate_pole(const PoleRecord& rec);

struct ClusterPoint {
  Complex kappa;
  Complex c;
  bool pole_branch = false;
};

std::vector<ClusterPoint> cluster_estimates(const SolutionOracle& sol,
                                            const std::vector<Complex>& kappas);
std::vector<ClusterPoint> cluster_estimates_poles(const std::vector<PoleRecord>& recs);

// Max residual of the limit system over rescaled samples on |zeta| <= radius
// (points inside pole discs skipped).
double rescale_residual(const SolutionOracle& sol, Complex kappa,
                        double zeta_radius, int grid_n = 9);

// ---------------------------------------------------------------------------
// The limit system

Complex limit_first_integral(Complex u, Complex v);

struct LimitSystemState {
  Complex t{}, u{}, v{};
  Complex c{};  // first integral at (u, v)
};

// Integrates along the straight segment t -> t_end; simple poles are crossed
// on the local series of the limit system. c is re-evaluated at the end.
LimitSystemState limit_integrate(const LimitSystemState& init, Complex t_end,
                                 const Tolerances& tol = {});

enum class LimitCase { reducible_branch, genus0 };

// Closed-form limit solutions: the reducible branch v = conj(rho) - rho u at
// c = 1/3, and the genus-zero solution at c = 0. Throws PoleOfClosedForm at
// the poles of the expressions.
std::pair<Complex, Complex> explicit_limit(LimitCase which, ThirdRoot rho,
                                           Complex t);

// Exact t-derivatives of the closed forms, for independent verification.
std::pair<Complex, Complex> explicit_limit_deriv(LimitCase which, ThirdRoot rho,
                                                 Complex t);

}  // namespace phlab
