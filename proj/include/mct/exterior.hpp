#pragma once

#include <memory>
#include <vector>

#include "mct/derivation.hpp"
#include "mct/space.hpp"

namespace mct {

class Current;
struct RunConfig;

using DerivationPtr = std::shared_ptr<const Derivation>;

/// Element of the k-th exterior power of the derivation module over a basis
/// D_1..D_N: per-point coefficients over increasing k-tuples (antisymmetry is
/// implicit in storing increasing tuples only).
struct KVector {
  std::vector<DerivationPtr> basis;
  int k = 0;
  std::vector<std::vector<int>> tuples;     // increasing tuples into basis
  std::vector<std::vector<double>> coeffs;  // one per-point table per tuple

  int N() const { return static_cast<int>(basis.size()); }
  SpacePtr space() const { return basis.front()->space(); }
  int points() const { return space()->size(); }

  /// All increasing k-tuples of {0..N-1} in lexicographic order.
  static std::vector<std::vector<int>> increasing_tuples(int N, int k);

  /// Simple vector D_{i_1} ^ ... ^ D_{i_k} with coefficient 1.
  static KVector simple(std::vector<DerivationPtr> basis,
                        const std::vector<int>& tuple);

  /// Zero vector of the given degree over the basis.
  static KVector zero(std::vector<DerivationPtr> basis, int k);

  int tuple_index(const std::vector<int>& a) const;
  KVector scaled(double c) const;
};

/// Formal k-form d pi_1 ^ ... ^ d pi_k.
struct KForm {
  std::vector<LipFn> pis;
  int k() const { return static_cast<int>(pis.size()); }
  double glip_product() const;
  /// Lipschitz constant of the tuple as a map into (R^k, l2); used for the
  /// Hadamard-style probe norm bound.
  double glip_l2(const MetricSpace& X) const;
};

/// Certified interval for a norm value.
struct NormInterval {
  double lower = 0.0;
  double upper = 0.0;
};

/// <xi, omega>(x) = sum_a lambda_a(x) det( D_{a_i} pi_j (x) ).
std::vector<double> pairing(const KVector& xi, const KForm& omega);
std::vector<double> pairing_values(const KVector& xi,
                                   const std::vector<std::vector<double>>& pis);

/// Upper bound for the projective Banach norm from a decomposition into
/// simple wedges: sum_i prod_j ||D_{i_j}||. Cancelling tuple pairs (equal up
/// to permutation with opposite sign) are removed first; the decomposition is
/// checked against `target` by pairing probes built from the dictionary.
double banach_norm_upper(
    const std::vector<std::vector<DerivationPtr>>& decomposition,
    const KVector& target, const FnDict& probe_dict, double probe_tol = 1e-9);

struct LocalNormBounds {
  std::vector<double> lower;  // per point
  std::vector<double> upper;  // per point
};

/// Per-point certified interval for |xi|_loc. Upper: the subadditive bound
/// sum_a |lambda_a| prod |D_{a_i}|_loc over the stored decomposition. Lower:
/// duality against probe forms; each probe contributes
/// |<xi, omega>| / min(k! prod glip, glip_l2(omega)^k) by the permutation-sum
/// and Hadamard bounds. Pseudodual probes make the lower bound sharp on
/// simple vectors; no general tightness is claimed.
LocalNormBounds local_norm_bounds(const KVector& xi,
                                  const std::vector<KForm>& probes);

/// Shuffle-sign convolution of coefficient tables. Degrees k + l > N yield
/// the zero vector.
KVector wedge(const KVector& a, const KVector& b);

/// Result of representing a k-current over a pseudodual basis.
struct CurrentRepresentation {
  KVector omega;
  Measure reference;  // the mass measure used for the Riesz step
  double lambda_sup = 0.0;
  double reconstruction_defect = 0.0;  // max over dictionary tuples
  double norm_bound = 0.0;             // (C(N))^k binom(N,k) style bound
};

/// Extracts the coefficient table lambda_a of T against a free basis with
/// pseudoduals g (lambda_a(x) = T(chi_x, g_{a_1},..,g_{a_k}) / ||T||(x)); the
/// reference measure is the witness-certified mass lower bound computed with
/// the pseudodual tuples among the candidates, which makes |lambda_a| <= 1.
/// Reconstruction is verified on all dictionary k-tuples.
CurrentRepresentation represent_current(const Current& T,
                                        const std::vector<DerivationPtr>& basis,
                                        const std::vector<LipFn>& pseudoduals,
                                        const FnDict& dict,
                                        const RunConfig& config);

}  // namespace mct
