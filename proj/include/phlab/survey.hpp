// Pole-field surveying: circle-sweep scans over annuli, string tracking,
// residue census, quadrant-signature measurement, and the deficiency value
// computed from string counts.
#pragma once

#include <vector>

#include "phlab/backlund.hpp"
#include "phlab/oracle.hpp"

namespace phlab {

struct Annulus {
  Complex center{0, 0};
  double r0 = 1.0;
  double r1 = 10.0;
  bool contains(Complex z) const {
    double d = std::abs(z - center);
    return d >= r0 && d <= r1;
  }
};

class PoleDB {
 public:
  Annulus region;
  std::string solution_id;
  double density = 0.0;

  const std::vector<PoleRecord>& records() const { return records_; }
  std::vector<PoleRecord>& records() { return records_; }
  size_t size() const { return records_.size(); }

  // Deduplicated insert: two records within 0.1/max(|lambda|,1) of each other
  // are the same pole; the one with the smaller fit residual wins.
  bool insert(const PoleRecord& rec, double rms);

 private:
  std::vector<PoleRecord> records_;
  std::vector<double> rms_;
};

enum class VarpiKind { imaginary, real };  // 2 pi i / 3 vs 2 pi / sqrt(3)

struct StringRecord {
  int id = -1;
  std::vector<int> member_ids;  // indices into PoleDB::records, |lambda| ascending
  VarpiKind varpi_kind = VarpiKind::real;
  int sign = +1;              // fitted sign in lambda' = lambda +/- varpi/lambda
  double direction = 0.0;     // limit ray angle estimate
  ThirdRoot residue;          // common residue class of the members
};

struct CensusRow {
  double r = 0.0;
  int n_total = 0, n_1 = 0, n_w = 0, n_wbar = 0;
};

struct CensusReport {
  std::vector<CensusRow> rows;
  int strings_1 = 0, strings_w = 0, strings_wbar = 0;
  std::optional<double> delta0;
  bool delta0_is_picard = false;
  double quad_coeff = 0.0;  // least-squares c in n(r) ~ c r^2
};

struct ScanOptions {
  double density = 0.6;      // circle spacing = density * pi / (3 r)
  Tolerances tol;
  double bump_factor = 1.30;  // candidate threshold on (|p|+|q|)/(1+|z|)
  int fit_order = 12;
  int jobs = 1;
  double stitch_angle = 1e9;  // 1e9 = choose automatically
};

// Sweep concentric circles over the region, refine every blow-up candidate
// into a PoleRecord, deduplicate. Deterministic for fixed options.
PoleDB scan(const OraclePtr& sol, const Annulus& region,
            const ScanOptions& opt = {});

struct TrackOptions {
  double window = 0.3;    // acceptance window, scaled by 1/|lambda|
  int min_members = 5;
  double outer_frac = 0.85;  // strings must reach this fraction of r1
};

// Greedy chaining by the string recursion; assigns string ids into db.
std::vector<StringRecord> track_strings(PoleDB& db, const TrackOptions& opt = {});

struct CensusOptions {
  TrackOptions track;
};

CensusReport census(PoleDB& db, const std::vector<double>& radii,
                    const CensusOptions& opt = {});

// delta(0, w) = 1 - 2 n1 / (nw + nwbar) from string counts. Throws
// DivisionByZeroClass when nw + nwbar = 0 (Picard case, delta = 1).
double deficiency(const CensusReport& report);

struct MeasuredSignature {
  bool zero_family = false;  // p/z -> 0 in all quadrants
  Signature sig;             // valid when !zero_family
  std::array<double, 4> margins{};
  bool table_consistent = true;  // adjacent-sector vs string-residue check
};

MeasuredSignature signature_measure(const SolutionOracle& sol, double radius,
                                    const std::vector<StringRecord>* strings = nullptr,
                                    const PoleDB* db = nullptr);

// Zeros of omega p + conj(omega) q - z over the region, excluding points
// where p itself has a pole. Precondition: the combination is not
// identically zero.
std::vector<Complex> zero_scan_for_B(const OraclePtr& sol, ThirdRoot omega,
                                     const Annulus& region,
                                     const ScanOptions& opt = {});

// (1/2 pi i) contour integral of p over the modified circle |z| = r, with
// detours of radius delta/|lambda| around recorded poles. Matches
// n1 + omega nw + conj(omega) nwbar over enclosed poles when the scan is
// complete.
Complex residue_integral(const SolutionOracle& sol, const PoleDB& db, double r,
                         double delta = 0.2, const Tolerances& tol = {});

// Residue sum predicted from the recorded poles with |lambda| <= r.
Complex residue_sum(const PoleDB& db, double r);

}  // namespace phlab
