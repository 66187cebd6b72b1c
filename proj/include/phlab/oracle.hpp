// Solution oracles: objects that evaluate one fixed meromorphic solution
// (p, q) anywhere in the plane, and can sweep it continuously along a path.
// Backends: closed forms, full-system integration from a seed, the scalar
// Riccati reduction, and pointwise Backlund transforms of any of these.
#pragma once

#include <functional>
#include <memory>
#include <string>

#include "phlab/integrator.hpp"

namespace phlab {

// A point on the *base* solution underlying an oracle stack, reusable as the
// starting anchor for later evaluations. Opaque to callers.
struct OracleAnchor {
  Complex z{};
  Complex p{}, q{};
  const void* owner = nullptr;
};

struct OracleSample {
  Complex z{};
  Complex p{}, q{};
  Complex dp{}, dq{};  // complex derivatives of this oracle's (p, q)
  OracleAnchor anchor; // safe continuation point on the base solution
};

struct SweepOptions {
  Tolerances tol;
  double max_arc = 1e30;  // sampling resolution along the path
};

using SweepSink = std::function<void(const OracleSample&)>;

class SolutionOracle {
 public:
  virtual ~SolutionOracle() = default;
  virtual const Params& params() const = 0;
  virtual std::string description() const = 0;
  // Evaluate at z. `hint` may be an anchor from a previous sample of this
  // oracle (or any transform of it); evaluation then continues from there.
  virtual OracleSample eval(Complex z, const OracleAnchor* hint = nullptr) const = 0;
  // Continuous sweep along consecutive curves, emitting samples in order.
  virtual void sweep_curves(const std::vector<Curve>& curves,
                            const SweepOptions& opt, const SweepSink& sink,
                            const OracleAnchor* start_hint = nullptr) const = 0;
  void sweep(const PathSpec& path, const SweepOptions& opt,
             const SweepSink& sink) const {
    sweep_curves(path.curves(), opt, sink);
  }
};

using OraclePtr = std::shared_ptr<const SolutionOracle>;

// ---------------------------------------------------------------------------

// Closed-form solution; fn must return exact values of a true solution so
// that derivatives follow from the system itself.
class ClosedFormOracle : public SolutionOracle {
 public:
  using Fn = std::function<std::pair<Complex, Complex>(Complex)>;
  ClosedFormOracle(Params prm, Fn fn, std::string desc)
      : prm_(prm), fn_(std::move(fn)), desc_(std::move(desc)) {}
  const Params& params() const override { return prm_; }
  std::string description() const override { return desc_; }
  OracleSample eval(Complex z, const OracleAnchor* hint = nullptr) const override;
  void sweep_curves(const std::vector<Curve>& curves, const SweepOptions& opt,
                    const SweepSink& sink,
                    const OracleAnchor* start_hint = nullptr) const override;

 private:
  Params prm_;
  Fn fn_;
  std::string desc_;
};

// Solution defined by a meromorphic flow (full system or Riccati reduction)
// plus a seed state; evaluation is analytic continuation with pole vaulting.
class FlowOracle : public SolutionOracle {
 public:
  FlowOracle(std::shared_ptr<const Flow> flow, State seed, Tolerances tol,
             std::string desc);
  const Params& params() const override { return flow_->params(); }
  std::string description() const override { return desc_; }
  const State& seed() const { return seed_; }
  OracleSample eval(Complex z, const OracleAnchor* hint = nullptr) const override;
  void sweep_curves(const std::vector<Curve>& curves, const SweepOptions& opt,
                    const SweepSink& sink,
                    const OracleAnchor* start_hint = nullptr) const override;

 private:
  void load(const State& s, StateVec& y) const;
  OracleSample pack(Complex z, Complex p, Complex q,
                    const OracleAnchor& anchor) const;

  std::shared_ptr<const Flow> flow_;
  State seed_;
  Tolerances tol_;
  std::string desc_;
};

OraclePtr make_ode_oracle(const Params& prm, const State& seed,
                          const Tolerances& tol = {});

OraclePtr make_zero_oracle();
OraclePtr make_polynomial_oracle();  // p = q = -z at (alpha, beta) = (1, -1)

// Max scaled residual of the system equations over deterministic probe
// points avoiding pole discs. Validates that an oracle's values and
// derivatives belong to a solution for its parameters.
double probe_residual(const SolutionOracle& sol, int n_probes,
                      double r0 = 2.0, double r1 = 10.0,
                      std::uint64_t seed = 1234);

}  // namespace phlab
