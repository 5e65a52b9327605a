#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mct/current.hpp"
#include "mct/derivation.hpp"
#include "mct/fragment.hpp"
#include "mct/space.hpp"

namespace mct {

/// Alberti representation: fragment weights P (a probability) and
/// nonnegative edge measures nu, with sum_g P(g) nu_g pushing forward to the
/// decomposed measure (edge mass lands at the left endpoint).
struct AlbertiRep {
  SpacePtr space;
  std::vector<Fragment> fragments;
  std::vector<double> P;
  std::vector<FragmentMeasure> nu;
  std::string provenance;

  /// sum_g P(g) * (edge mass at left endpoints).
  Measure pushforward() const;
  double total_carrier_mass() const;
  bool empty() const { return fragments.empty(); }
};

/// Direction data: the derivative of f along fragments must lie in the cone.
struct DirectionSpec {
  std::vector<LipFn> f;
  ConeField cone;
};

/// Speed data: (g o gamma)' >= sigma(x) md (strict or non-strict).
struct SpeedSpec {
  LipFn g;
  std::vector<double> sigma;
  bool strict = false;
};

/// Certificate that no admissible family edge meets S with positive image
/// length, checked against every family fragment.
struct NullCertificate {
  std::vector<int> S;
  int family_size = 0;
  int violating_edges = 0;  // must be 0 for a valid certificate
  bool exhaustive_ok() const { return violating_edges == 0; }
};

struct RepValidation {
  double decomposition_defect = 0.0;
  double p_normalization_defect = 0.0;
  bool absolutely_continuous = true;
  bool ok(double tol) const {
    return decomposition_defect <= tol && p_normalization_defect <= 1e-12 &&
           absolutely_continuous;
  }
};

/// Checks the decomposition identity, absolute continuity and P
/// normalization against mu; report-valued.
RepValidation validate(const AlbertiRep& rep, const Measure& mu, double tol);

/// Edge weights zeroed where the left endpoint is outside U.
AlbertiRep restrict_rep(const AlbertiRep& rep, const std::vector<int>& U);

/// Combines reps over a disjoint partition; P weights rescaled by the mass
/// fractions mu(U_a)/mu(X), edge measures inversely, so restrictions
/// reproduce the pieces.
AlbertiRep glue(const std::vector<AlbertiRep>& reps,
                const std::vector<std::vector<int>>& partition);

struct FractionReport {
  double fraction = 1.0;  // P nu mass fraction of passing edges
  bool certificate = true;
  std::vector<std::pair<int, int>> failing;  // (fragment, edge)
};

FractionReport check_direction(const AlbertiRep& rep, const DirectionSpec& spec);
FractionReport check_speed(const AlbertiRep& rep, const SpeedSpec& spec);

/// Splits a fragment into the maximal runs whose edges pass the given specs.
std::vector<Fragment> split_by_spec(const Fragment& g, const MetricSpace& X,
                                    const DirectionSpec* dir,
                                    const SpeedSpec* speed);

struct RainwaterResult {
  std::vector<int> A;
  AlbertiRep rep;  // decomposes mu restricted to A
  std::vector<int> S;
  NullCertificate certificate;
};

/// Rainwater-style split of mu on B against an admissible fragment family:
/// edge weights >= 0 with pushforward = mu on the maximal coverable set A
/// (the per-point max-coverage LP decouples at the left endpoints); S = B \ A
/// carries the exhaustively checked null certificate. Optional priors shape
/// the distribution of mu(x) among the admissible edges at x.
RainwaterResult rainwater_split(
    const Measure& mu, const std::vector<int>& B,
    const std::vector<Fragment>& family, SpacePtr space,
    const std::vector<FragmentMeasure>* priors = nullptr);

struct ConeRefineResult {
  AlbertiRep rep;
  FractionReport direction;
  FractionReport speed;
  std::vector<double> speed_bound;  // sigma/( |D_w|loc + (1-sigma) ) per point
  std::vector<int> uncovered;
};

/// Alberti representation of mu restricted to V in the g-direction of
/// Cone(w, alpha) with <w,g>-speed >= sigma/(|D_w|_loc + (1-sigma)), built by
/// rainwater_split over the carrier of D_w = sum w_i D_i filtered to
/// cone-compliant edges. Precondition: D_i g_j = delta_ij on V.
ConeRefineResult cone_refine(const Measure& mu, const std::vector<int>& V,
                             const std::vector<Derivation>& Ds,
                             const std::vector<LipFn>& g,
                             const std::vector<double>& w, double alpha,
                             double sigma, const RunConfig& config);

struct ConeNullBound {
  double direct_value = 0.0;   // |T(chi_K, pi_1..pi_k)|
  double chain_bound = 0.0;    // delta ||T||_upper(K)
  double majorant_gap = 0.0;   // max over K of (majorant - pi_1)
  double coupling_slack = 0.0; // |T(chi_K, pi_1,..) - T(chi_K, g,..)|
  double achieved_bound = 0.0; // chain_bound + coupling_slack
  bool certified = false;
};

/// Lemma-4.2-style cone estimate: builds the max-of-d_{delta,alpha} majorant
/// over the net K, verifies the per-piece chain of inequalities (the
/// constant-drop and alternating cancellations are exact at finite scale) and
/// certifies |T(chi_K, pis)| <= delta ||T||(K) + net-resolution slack.
/// Precondition: K inside the null certificate's set.
ConeNullBound cone_null_estimate(const Current& T, const std::vector<int>& K,
                                 const std::vector<LipFn>& pis, double delta,
                                 double alpha, const NullCertificate& cert,
                                 const FnDict& dict, const RunConfig& config);

struct ConePiece {
  std::vector<int> V;
  std::vector<std::vector<double>> pi;  // witness k-tuple
  std::vector<AlbertiRep> axis_reps;    // one per coordinate direction
  std::vector<double> peel_ratio;       // ||T||(A_i) / ||T||(B) after step i
  AlbertiRep refined;                   // in the requested cone
  double direction_fraction = 0.0;
};

struct ConeDecomposition {
  std::vector<ConePiece> pieces;
  double coverage_defect = 0.0;  // uncovered mass fraction of ||T||
  std::vector<std::string> defects;
};

/// Thm-1.1 pipeline: efficient tuples from mass_estimate, per-direction
/// Rainwater peeling with the (eta - i delta) inequality checked against the
/// mass lower bounds, exhaustion until the uncovered ||T||-mass is below
/// tolerance, and refinement of each piece into the requested cone field.
ConeDecomposition current_to_alberti(const Current& T, double eta,
                                     double delta, const ConeField& cone,
                                     const FnDict& dict,
                                     const RunConfig& config);

/// The derivation induced by a representation: the carrier is the rep
/// itself; local norm <= C is certified. The overload with an explicit
/// measure checks the rep decomposes it and uses it as the reference.
Derivation derivation_of(const AlbertiRep& rep, double C);
Derivation derivation_of(const AlbertiRep& rep, double C, const Measure& mu);

/// Largest edge speed carrying positive mass (the rep's Lipschitz bound).
double rep_lipschitz_bound(const AlbertiRep& rep);

}  // namespace mct
