#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mct/config.hpp"
#include "mct/exterior.hpp"
#include "mct/fragment.hpp"
#include "mct/space.hpp"

namespace mct {

/// One summand of a fragment-sum 1-current: a fragment with signed edge
/// densities.
struct FragmentSummand {
  Fragment fragment;
  FragmentMeasure nu;  // signed; default construction uses edge lengths
};

FragmentMeasure default_edge_measure(const Fragment& g);

/// k-dimensional metric functional in one of the concrete forms the paper
/// uses: fragment sums (k=1), precurrents (coefficient table over a
/// derivation basis), exact signed point measures (k=0), and boundary /
/// restriction wrappers of those. Evaluation is multilinear in all arguments
/// and alternating in the pi-arguments.
class Current {
 public:
  struct FragmentSumForm {
    std::vector<FragmentSummand> pieces;
  };
  struct PrecurrentForm {
    KVector xi;
    Measure mu;
  };
  struct PointMassForm {
    std::vector<double> w;  // signed weight per point
  };
  struct BoundaryForm {
    std::shared_ptr<const Current> parent;
  };
  struct RestrictionForm {
    std::shared_ptr<const Current> parent;
    std::vector<double> psi;
    std::vector<std::vector<double>> fixed_pis;
  };
  struct ZeroForm {};

  static Current zero(SpacePtr space, int k);
  static Current fragment_sum(SpacePtr space,
                              std::vector<FragmentSummand> pieces);
  static Current from_kvector(KVector xi, Measure mu);
  static Current point_mass(SpacePtr space, std::vector<double> w);

  int k() const { return k_; }
  const SpacePtr& space() const { return space_; }

  bool is_fragment_sum() const;
  bool is_precurrent() const;
  bool is_zero() const;
  const FragmentSumForm& fragment_form() const;
  const PrecurrentForm& precurrent_form() const;
  const PointMassForm& point_mass_form() const;

  /// T(f, pi_1..pi_k); pis.size() must equal k. Any real-valued function on
  /// the finite space is admissible in the pi slots.
  double evaluate(const std::vector<double>& f,
                  const std::vector<std::vector<double>>& pis) const;
  double evaluate(const LipFn& f, const std::vector<const LipFn*>& pis) const;

  /// All carrier edges (left, right ids) reachable through the form; used by
  /// the locality harness and the neighborhood-closure tests.
  std::vector<std::pair<int, int>> carrier_edges() const;

  /// Per-point coefficient vector of pi |-> T(chi_x, pi) for 1-dimensional
  /// functionals (exact; evaluation is linear in pi).
  std::vector<double> kernel_row(int x) const;

  using Payload = std::variant<ZeroForm, FragmentSumForm, PrecurrentForm,
                               PointMassForm, BoundaryForm, RestrictionForm>;
  const Payload& payload() const { return payload_; }

  Current() = default;  // zero functional over no space; assign before use
  Current(SpacePtr space, int k, Payload payload);

 private:
  SpacePtr space_;
  int k_ = 0;
  Payload payload_;
};

/// [gamma] with measure nu (default: edge lengths), acting by left-endpoint
/// sampling: [gamma](f dpi) = sum_e f(gamma(t_i)) (pi-pullback on e) nu(e).
Current curve_current(SpacePtr space, const Fragment& gamma,
                      std::optional<FragmentMeasure> nu = std::nullopt);

/// dT(f, ...) = T(1, f, ...). For fragment sums the result is the exact
/// signed endpoint measure; k = 0 functionals have boundary 0 by convention.
Current boundary(const Current& T);

/// T restricted by (psi, pi_1..pi_l): the (k-l)-functional
/// (f, ...) -> T(f psi, pi_1..pi_l, ...).
Current restrict(const Current& T, const std::vector<double>& psi,
                 const std::vector<std::vector<double>>& fixed_pis);

/// Lemma-3.1-style mass certificate: disjoint witness pieces (B_i, pi^i)
/// with |T(chi_Bi, pi^i)| >= eta * lower(B_i), a certified per-point lower
/// measure, and a per-point upper measure (pushforward bound for fragment
/// sums, k! |xi|_loc mu for precurrents, exact LP mass for 0/1-dimensional
/// functionals).
struct MassWitness {
  std::vector<int> B;
  std::vector<std::vector<double>> pis;
  double value = 0.0;
};

struct MassEstimate {
  Measure lower;
  Measure upper;
  std::vector<MassWitness> witnesses;
  bool upper_certified = true;
  double uncovered_upper_mass = 0.0;
  double lower_total() const { return lower.total(); }
  double upper_total() const { return upper.total(); }
};

MassEstimate mass_estimate(const Current& T, double eta, const FnDict& dict,
                           const RunConfig& config);

/// Exact per-point mass of a 0- or 1-dimensional functional (point weights,
/// respectively per-point Kantorovich LP over the 1-Lipschitz polytope).
Measure exact_low_dim_mass(const Current& T);

/// The derivation D_T of a fragment-sum 1-current together with its mass
/// measure: T(f,pi) = sum f D_T pi d||T|| and |D_T|_loc = 1 on supp||T||.
/// mu_ref only fixes the ambient measure class (supp||T|| must lie in its
/// support).
std::pair<Derivation, Measure> der_of_current(const Current& T,
                                              const Measure& mu_ref);
/// Same, with the mass itself as the reference measure.
std::pair<Derivation, Measure> der_of_current(const Current& T);

/// The 1-current T_D(f,pi) = integral of f Dpi dmu, in fragment-sum form.
Current curr_of_derivation(const Derivation& D, const Measure& mu);

/// ||T||(X) + ||dT||(X); exact total variation for k = 1 boundaries.
double normal_norm(const Current& T, const FnDict& dict,
                   const RunConfig& config);

struct NormalityReport {
  bool normal = false;
  bool boundary_mass_certified = true;
  double boundary_mass = 0.0;
  double threshold = 0.0;
  double axiom_violation = 0.0;
};

/// Thm-5.6-style check for precurrents: the boundary's mass bound is finite
/// (computed exactly at finite scale for k = 2) and compared against the
/// configured threshold. Axiom defects are reported before normality.
NormalityReport is_normal(const Current& T, double threshold,
                          const FnDict& dict, const RunConfig& config);

/// Weighted simple paths and cycles reconstructing an edge flow.
struct FlowDecomposition {
  std::vector<std::pair<Fragment, double>> paths;  // includes cycles
  std::vector<char> is_cycle;
  double residual = 0.0;
  /// sum_i w_i mass[gamma_i] (pushforward bound, exact for simple paths).
  double mass_sum = 0.0;
};

/// Greedy path/cycle decomposition of the edge flow induced by a fragment-sum
/// 1-current (opposite flows on an edge cancel first). Reconstruction
/// N = sum w_i [gamma_i] is exact; errors if the residual exceeds tol.
FlowDecomposition flow_decompose(const Current& N, double tol);

struct AxiomReport {
  double multilinearity = 0.0;
  double antisymmetry = 0.0;
  double locality = 0.0;          // pi constant on the carrier closure of {f!=0}
  double locality_strict = 0.0;   // pi constant only on {f != 0}; reported
  std::string note;               // continuity axiom is not represented
  double max_violation() const;
};

/// Randomized multilinearity / antisymmetry / locality harness on dictionary
/// tuples. The locality test holds pi constant on the one-step carrier
/// closure of {f != 0}; the defect of the strict reading (constant only on
/// {f != 0}, an O(h) boundary effect of the discretization) is reported
/// separately.
AxiomReport check_axioms(const Current& T, int trials, const FnDict& dict,
                         const RunConfig& config);

}  // namespace mct
