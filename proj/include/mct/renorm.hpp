#pragma once

#include <optional>
#include <vector>

#include "mct/derivation.hpp"
#include "mct/space.hpp"

namespace mct {

/// Generating set for the renorming: a dictionary whose first entry is the
/// constant 1, with an explicit truncation level M.
struct GeneratingSet {
  const FnDict* dict = nullptr;
  int M = 0;  // truncation level (entries 1..min(M, size) participate)

  int effective_M() const;
};

/// Psi_M(x,y) = ( sum_{n<=M} (psi_n(x)-psi_n(y))^2 / n^2 )^{1/2}; monotone in
/// M and bounded by (pi/sqrt 6) d.
std::vector<std::vector<double>> psi_pseudometric(const GeneratingSet& gen);

/// The renormed space d_eps = d + eps Psi_M with the sandwich
/// d <= d_eps <= (1 + eps pi/sqrt 6) d verified entrywise.
struct RenormedSpace {
  SpacePtr original;
  double eps = 0.0;
  int M = 0;
  std::vector<std::vector<double>> d_eps;
  bool sandwich_ok = true;
};

RenormedSpace renorm_distance(SpacePtr X, const GeneratingSet& gen, double eps);

/// Per-point vector (D psi_n / n)_{n<=M} and its l2 norm.
struct DPhi {
  std::vector<std::vector<double>> components;  // [n-1][point]
  std::vector<double> norm;                     // per point
};

DPhi dphi(const Derivation& D, const GeneratingSet& gen);

struct RenormedNormReport {
  std::vector<double> lp_value;       // LP local norm w.r.t. d_eps
  std::vector<double> formula_value;  // |D|_loc(d) + eps ||D Phi_M||
  double identity_gap = 0.0;          // max pointwise difference
  double truncation_slack = 0.0;      // eps (sum_{n>M} (2||D||/n)^2)^{1/2}
};

/// Local norm w.r.t. the renormed distance, compared against the
/// |D|_loc + eps ||D Phi|| identity with the documented truncation slack.
RenormedNormReport renormed_local_norm(const Derivation& D,
                                       const RenormedSpace& Xe,
                                       const GeneratingSet& gen);

struct ConvexityWitness {
  bool additive = false;  // additivity hypothesis held on U
  std::vector<int> V1, V2;
  std::vector<double> lambda1, lambda2;  // chi_{V1} D1 = lambda1 D2 etc.
  std::vector<int> violating;            // where additivity fails
  double probe_defect = 0.0;  // max |apply(chi_V D1 - lambda D2, psi_n)|
};

/// Strict-convexity witness extraction: checks the additivity hypothesis of
/// the renormed local norm pointwise on U (d-part and Phi-part must both be
/// additive); where it holds, strict convexity of l2 forces D1 Phi and
/// D2 Phi to be positively parallel and the ratio functions are returned
/// (ties on both sides vanishing go to V1 with lambda 0). The carrier
/// equality is probed on the generating set; a large defect signals that the
/// truncation M is too small.
ConvexityWitness strict_convexity_witness(const Derivation& D1,
                                          const Derivation& D2,
                                          const std::vector<int>& U,
                                          const RenormedSpace& Xe,
                                          const GeneratingSet& gen,
                                          double tol);

}  // namespace mct
