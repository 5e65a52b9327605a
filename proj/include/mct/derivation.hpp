#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "mct/fragment.hpp"
#include "mct/lipschitz_lp.hpp"
#include "mct/space.hpp"

namespace mct {

/// One weighted fragment of a derivation carrier: fragment weight P >= 0 and
/// signed edge densities nu.
struct CarrierPiece {
  Fragment fragment;
  double P = 1.0;
  FragmentMeasure nu;
};

/// Carrier-based derivation: f |-> Df with
///   Df(x) = (1/mu(x)) sum_pieces P sum_{edges e with left(e)=x}
///           nu(e) (f(right)-f(left)) / dt(e).
/// Applying to constants gives 0 exactly; the action is linear in f. Values
/// are immutable after construction and all operations are pure.
class Derivation {
 public:
  Derivation(SpacePtr space, Measure mu, std::vector<CarrierPiece> carrier);

  const SpacePtr& space() const { return space_; }
  const Measure& mu() const { return mu_; }
  const std::vector<CarrierPiece>& carrier() const { return carrier_; }

  /// Df per point.
  std::vector<double> apply(const std::vector<double>& f) const;
  std::vector<double> apply(const LipFn& f) const { return apply(f.values()); }

  /// Dense coefficient matrix K with Df(x) = sum_y K[x][y] f(y). Rows are
  /// balanced (each row sums to 0).
  std::vector<std::vector<double>> kernel() const;

  /// Applies the l^2-valued tuple: component i of the result at x is
  /// apply(fs[i])(x).
  std::vector<std::vector<double>> apply_tuple(
      const std::vector<const LipFn*>& fs) const;

 private:
  SpacePtr space_;
  Measure mu_;
  std::vector<CarrierPiece> carrier_;
};

/// Per-point local norm |D|_loc by linear programming: at each x the optimum
/// of max Df(x) over the 1-Lipschitz polytope of dist (optionally another
/// matrix, e.g. a renormed distance).
std::vector<double> local_norm(const Derivation& D);
std::vector<double> local_norm(const Derivation& D,
                               const std::vector<std::vector<double>>& dist);

/// Global norm: max over points of the local norm.
double global_norm(const Derivation& D);

/// Set where the local norm vanishes (relative tolerance against the global
/// norm).
std::vector<char> vanishing_set(const std::vector<double>& loc,
                                double rel_tol = 1e-12);

/// Carrier densities scaled by lambda at each edge's left endpoint;
/// apply(module_scale(lambda, D), f) = lambda * apply(D, f) exactly.
Derivation module_scale(const std::vector<double>& lambda, const Derivation& D);

/// Pointwise sum (same space and reference measure).
Derivation add(const Derivation& a, const Derivation& b);
Derivation scale(double c, const Derivation& D);

/// Normalization: densities scaled by 1/|D|_loc(x) where positive, zeroed on
/// the vanishing set; the result has local norm = indicator of the complement
/// of N_D.
Derivation normalize(const Derivation& D);

/// Point map between finite metric spaces.
struct PointMap {
  SpacePtr target;
  std::vector<int> image;  // target id per source point

  /// Smallest L with d_Y(F p, F q) <= L d_X(p, q).
  double lip(const MetricSpace& X) const;
};

/// Push-forward along F: carrier traces composed with F (degenerate edges
/// zeroed), weights preserved, reference measure F_# mu. If declared_lip is
/// given, violating pairs are reported as errors.
Derivation pushforward(const PointMap& F, const Derivation& D,
                       double declared_lip = -1.0);

/// Max defect of the defining pushforward identity over dictionary pairs
/// (f, g): integral of g (F_#D)f dF_#mu  vs  (g o F) D(f o F) dmu.
double pushforward_identity_defect(const PointMap& F, const Derivation& D,
                                   const Derivation& FD, const FnDict& Ydict);

/// Independence failure in the pseudodual sweep: after exhausting the
/// dictionary a positive-mass set admits no generator with normalized action
/// >= 1 - eps.
class DependentDerivations : public Error {
 public:
  DependentDerivations(std::vector<int> pts)
      : Error(ErrorKind::Precondition,
              "pseudodual_basis: dependent derivations on a positive-measure "
              "set"),
        points(std::move(pts)) {}
  std::vector<int> points;
};

/// One piece of a pseudodual decomposition: on V the final derivations
/// satisfy D_i g_j = delta_ij, built from the triangular intermediate sweep.
struct PseudodualPiece {
  std::vector<int> V;
  std::vector<Derivation> d_final;
  std::vector<Derivation> d_tilde;
  std::vector<LipFn> g;
  /// Triangular matrix entries (tilde_i g_j)(x) for x in V, row-major k x k,
  /// one matrix per point of V.
  std::vector<std::vector<double>> M;
  std::vector<double> det;  // per point of V
};

struct PseudodualResult {
  std::vector<PseudodualPiece> pieces;
  double eps = 0.5;
  /// The concrete instance of the paper-style constant: k! (1-eps)^{-k}.
  double norm_bound = 0.0;
};

/// Quantitative pseudodual construction: a partition {V_alpha}, per-piece
/// derivations with D_{alpha,i} g_{alpha,j} = delta_ij chi_V and norms at
/// most k! (1-eps)^{-k}, by the triangular Gram-Schmidt sweep with
/// normalization and half-sup greedy exhaustion (dictionary order breaks
/// ties). Throws DependentDerivations when a positive-mass set admits no
/// admissible generator.
PseudodualResult pseudodual_basis(const std::vector<Derivation>& Ds,
                                  const FnDict& dict, double eps);

/// Chain rule: sum_l dg/dy_l(psi(x)) * D psi_l(x) per point. The gradient is
/// a callable on R^k. Against apply(D, g o psi) the defect is bounded by
/// sup|Hess g| * lip(psi o gamma) * h_max.
std::vector<double> chain_rule(
    const Derivation& D,
    const std::function<std::vector<double>(const std::vector<double>&)>& grad,
    const std::vector<const LipFn*>& psis);

}  // namespace mct
