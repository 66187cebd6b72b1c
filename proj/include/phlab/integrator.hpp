// Pole-aware analytic continuation: adaptive stepping until a pole is
// approached, local Laurent fit, then a vault across the pole disc on the
// local model.
#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "phlab/laurent.hpp"
#include "phlab/ode.hpp"

namespace phlab {

struct Tolerances {
  double rel = 1e-10;
  double abs = 1e-12;
  double pole_trigger = 1e3;        // blow-up threshold, scaled by (1+|z|)
  double vault_radius_factor = 0.25;  // vault disc radius = factor/|lambda|
};

struct PathSpec {
  enum class Kind { polyline, circle, ray };
  Kind kind = Kind::polyline;
  std::vector<Complex> vertices;               // polyline
  Complex center{};                            // circle
  double radius = 0.0, th0 = 0.0, th1 = 0.0;   // circle angles
  double angle = 0.0, r0 = 0.0, r1 = 0.0;      // ray

  static PathSpec line(Complex a, Complex b);
  static PathSpec polyline(std::vector<Complex> pts);
  static PathSpec circle(Complex center, double radius, double th0, double th1);
  static PathSpec ray(double angle, double r0, double r1);

  std::vector<Curve> curves() const;
  Complex start() const;
};

struct TrajStats {
  long accepted = 0;
  long rejected = 0;
  int vaults = 0;
};

struct Trajectory {
  std::vector<State> samples;
  std::vector<PoleRecord> poles;
  Tolerances tol;
  TrajStats stats;
};

// ---------------------------------------------------------------------------
// A meromorphic flow with the shared simple-pole structure. dim() is 1 for
// the scalar Riccati reduction, 2 for the full system.
class Flow {
 public:
  virtual ~Flow() = default;
  virtual int dim() const = 0;
  virtual const Params& params() const = 0;
  virtual void rhs(Complex z, const StateVec& y, StateVec& dy) const = 0;
  virtual void pq(Complex z, const StateVec& y, Complex& p, Complex& q) const = 0;
  virtual void from_model(const LaurentModel& m, Complex z, StateVec& y) const = 0;
};

class FullFlow : public Flow {
 public:
  explicit FullFlow(Params prm) : prm_(prm) {}
  int dim() const override { return 2; }
  const Params& params() const override { return prm_; }
  void rhs(Complex z, const StateVec& y, StateVec& dy) const override;
  void pq(Complex z, const StateVec& y, Complex& p, Complex& q) const override;
  void from_model(const LaurentModel& m, Complex z, StateVec& y) const override;

 private:
  Params prm_;
};

// First-kind reduction: q is eliminated through conj(rho) p + rho q - z = 0,
// leaving the scalar Riccati equation for p.
class RiccatiFlow : public Flow {
 public:
  RiccatiFlow(ThirdRoot rho, Complex alpha);
  int dim() const override { return 1; }
  const Params& params() const override { return prm_; }
  ThirdRoot rho() const { return rho_; }
  void rhs(Complex z, const StateVec& y, StateVec& dy) const override;
  void pq(Complex z, const StateVec& y, Complex& p, Complex& q) const override;
  void from_model(const LaurentModel& m, Complex z, StateVec& y) const override;

 private:
  Params prm_;
  ThirdRoot rho_;
};

// ---------------------------------------------------------------------------
// Tracing

struct TraceOptions {
  Tolerances tol;
  double max_arc_step = 1e30;
  int model_order = 12;
  double eps_min_factor = 1e-4;  // sample exclusion radius = factor/|lambda|
};

struct TraceSink {
  // every accepted or model-generated sample, ordered along the path
  std::function<void(const State&)> sample;
  std::function<void(const PoleRecord&, const LaurentModel&)> pole;
};

// Continue y along the curve, vaulting poles. Returns the final z.
Complex trace_curve(const Flow& flow, const Curve& curve, StateVec& y,
                    const TraceOptions& opt, const TraceSink& sink,
                    TrajStats* stats = nullptr);

// ---------------------------------------------------------------------------
// Public operations on the full system

Trajectory integrate(const State& init, const Params& prm, const PathSpec& path,
                     const Tolerances& tol = {});

State continue_to_point(const State& init, const Params& prm, Complex target,
                        const Tolerances& tol = {});

// Evaluate the local model of `record` at exit_z. Both entry.z and exit_z
// must lie within the vault disc around the pole.
State vault(const PoleRecord& record, int model_order, const State& entry,
            Complex exit_z, const Params& prm,
            double vault_radius_factor = 0.25);

// Integrate the system along the given curves while accumulating
// integral f dz for f = p q (Hamiltonian action) or f = p (residue count).
// The integrand is not integrable across poles, so the curves must stay
// clear of them.
enum class PathIntegrand { pq, p };

struct PathIntegral {
  State final_state;
  Complex value{};
};

PathIntegral integrate_along(const State& init, const Params& prm,
                             const std::vector<Curve>& curves,
                             PathIntegrand which, const Tolerances& tol = {});

}  // namespace phlab
