#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mct/alberti.hpp"
#include "mct/current.hpp"
#include "mct/derivation.hpp"

namespace mct {

/// Linear function of the embedding coordinates; extends canonically to
/// virtual points created by filling.
struct LinearFn {
  std::vector<double> coef;
  double offset = 0.0;
  double eval(const std::vector<double>& coord) const;
  LipFn on(SpacePtr space, std::string name = std::string()) const;
};

struct NormalFormResult {
  AlbertiRep rep;     // full-interval curves on [0,1], nu = h * (curve length)
  SpacePtr space;     // possibly extended by virtual fill points
  std::vector<std::vector<double>> h;  // per curve, per edge density
  double speed_bound = 0.0;            // delta / ||g||
  FractionReport direction;            // re-certified on filled edges
};

/// Thm-6.13-style normal form: every fragment is filled affinely (convex
/// coordinates), reparametrized to [0,1], and the measure is rewritten as a
/// density against the curve length measure; the pushforward on original
/// points is preserved exactly. Direction data must be linear so membership
/// survives the filling; a gap whose secant leaves the cone is an error.
NormalFormResult curves_normal_form(const AlbertiRep& rep,
                                    const std::vector<LinearFn>& f_dir,
                                    const Cone& cone,
                                    std::optional<LinearFn> g_speed,
                                    double delta, const RunConfig& config);

struct NormalApproxStep {
  Current N;             // the normal approximant N restricted by the fit
  double error = 0.0;    // exact mass of (T - N)
  double fit_l1 = 0.0;   // L1 residual of the density fit
  double glip_cap = 0.0; // Lipschitz cap of the dictionary level
  std::string provenance;
};

struct NormalApproxReport {
  std::vector<NormalApproxStep> steps;  // errors nonincreasing
  Current base;                         // unit-density curve current
  double final_error = 0.0;
};

/// Thm-1.3 pipeline for 1-currents: decompose into curves, take the
/// unit-density normal current N over the curve family, and approximate the
/// actual density by Lipschitz fits g_n of increasing resolution
/// (least-absolute-deviation over ramp dictionaries with growing Lipschitz
/// caps); emits N restricted by g_n with the exact mass error per step.
NormalApproxReport approximate_by_normal(const Current& T, int n_steps,
                                         const FnDict& dict,
                                         const RunConfig& config);

/// Derivation together with the witnessing normal current: D = lambda D_N
/// piecewise with lambda >= 0.
struct NormalDerivation {
  Derivation D;
  Current N;
  std::vector<double> lambda;
  double flow_residual = 0.0;
  double boundary_mass = 0.0;
};

/// Builds the witnessing normal current N = sum P [gamma] of a rep in curves
/// normal form and extracts the density lambda as the ratio of actions on
/// the dictionary (which must be constant across entries).
NormalDerivation normal_derivation_from_rep(const AlbertiRep& rep,
                                            const FnDict& dict,
                                            const RunConfig& config);

struct VectorFieldRepResult {
  AlbertiRep rep;      // of mu restricted off the vanishing set of DF
  bool certified = false;
  double fail_mass = 0.0;
  std::vector<std::pair<int, int>> witness_edges;  // (curve, edge) failures
  std::vector<std::vector<double>> witness_vectors;  // separating w_j per witness
  std::vector<int> vanishing;  // N_{DF}
};

/// Thm-5.14 analogue: decomposes the witnessing normal current into curves,
/// restricts them off N_{DF}, reparametrizes to 1-Lipschitz and tests the
/// positive-multiple condition (F o gamma)' = lambda DF per edge within the
/// angular tolerance. The failing edge mass must be below tolerance for a
/// certificate; otherwise the witnesses carry separating test vectors.
VectorFieldRepResult vectorfield_direction_rep(const NormalDerivation& ND,
                                               const std::vector<LipFn>& F,
                                               const RunConfig& config);

}  // namespace mct
