#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mct/config.hpp"

namespace mct {

/// Report produced by the metric validators. `ok` is false iff some axiom
/// fails; `violation` names the first failed axiom and the witnessing tuple.
struct ValidationReport {
  bool ok = true;
  std::string violation;   // "symmetry" | "diagonal" | "positivity" | "triangle"
  int i = -1, j = -1, k = -1;
  double defect = 0.0;

  explicit operator bool() const { return ok; }
};

/// Finite metric measure space: point ids, a dense symmetric distance matrix
/// and optionally an embedding used for convex filling. Immutable after
/// construction; all operations on it are pure.
class MetricSpace {
 public:
  MetricSpace(std::vector<std::string> point_names,
              std::vector<std::vector<double>> dist,
              std::optional<std::vector<std::vector<double>>> coords =
                  std::nullopt);

  /// Builds the distance matrix from a Euclidean embedding.
  static MetricSpace from_coords(std::vector<std::string> point_names,
                                 std::vector<std::vector<double>> coords);

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int i) const { return names_[i]; }
  const std::vector<std::string>& names() const { return names_; }
  double dist(int i, int j) const { return dist_[i][j]; }
  const std::vector<std::vector<double>>& dist_matrix() const { return dist_; }
  bool has_coords() const { return coords_.has_value(); }
  const std::vector<std::vector<double>>& coords() const { return *coords_; }
  int coord_dim() const { return coords_ ? (int)(*coords_)[0].size() : 0; }

  int nearest_point(const std::vector<double>& coord) const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> dist_;
  std::optional<std::vector<std::vector<double>>> coords_;
};

using SpacePtr = std::shared_ptr<const MetricSpace>;

/// Nonnegative weights per point.
class Measure {
 public:
  Measure() = default;
  explicit Measure(std::vector<double> weights);

  int size() const { return static_cast<int>(w_.size()); }
  double operator()(int i) const { return w_[i]; }
  const std::vector<double>& weights() const { return w_; }
  double total() const;
  std::vector<int> support(double tol = 0.0) const;

  /// Weights zeroed off U.
  Measure restrict_to(const std::vector<int>& U) const;

 private:
  std::vector<double> w_;
};

/// Checks the metric axioms of a square matrix. Report-valued: returns the
/// first violated axiom or OK. With `allow_zero_offdiag` it checks the
/// pseudometric axioms instead (used by dst_delta_alpha outputs).
ValidationReport validate_metric(const std::vector<std::vector<double>>& dist,
                                 bool allow_zero_offdiag = false,
                                 double tol = 1e-9);

/// Lipschitz function on a finite space, with cached Lipschitz constant and
/// sup norm.
class LipFn {
 public:
  LipFn() = default;
  LipFn(SpacePtr space, std::vector<double> values,
        std::string name = std::string());

  double operator()(int i) const { return v_[i]; }
  const std::vector<double>& values() const { return v_; }
  double glip() const { return glip_; }
  double sup() const { return sup_; }
  const std::string& fn_name() const { return name_; }
  const SpacePtr& space() const { return space_; }
  int size() const { return static_cast<int>(v_.size()); }

 private:
  SpacePtr space_;
  std::vector<double> v_;
  double glip_ = 0.0;
  double sup_ = 0.0;
  std::string name_;
};

/// max over pairs i != j of |f(i)-f(j)| / d(i,j); 0 on single-point spaces.
double lip_constant(const std::vector<double>& values, const MetricSpace& X);

/// MacShane extension of f given on the subset S: the inf-convolution
/// min_{s in S} f(s) + L d(.,s) with L = glip(f|S), truncated to
/// [-sup|f|, sup|f|] so both the Lipschitz constant and the sup norm of the
/// restriction are preserved.
LipFn macshane_extend(const std::vector<int>& S,
                      const std::vector<double>& values_on_S, SpacePtr X,
                      std::string name = std::string());

/// Open Euclidean cone with unit axis w and opening angle alpha in (0, pi/2):
/// { u : tan(alpha) <w,u> > |u - <w,u> w|_2 }.
struct Cone {
  std::vector<double> axis;  // unit vector
  double alpha = 0.0;

  Cone() = default;
  Cone(std::vector<double> w, double a);
  int dim() const { return static_cast<int>(axis.size()); }
};

/// Per-point cone assignment.
struct ConeField {
  std::vector<Cone> cones;  // one per point
  int dim() const { return cones.empty() ? 0 : cones.front().dim(); }
  const Cone& at(int x) const { return cones[x]; }

  static ConeField constant(int n_points, Cone c);
};

/// Strict membership test of Definition-style open cones.
bool cone_contains(const Cone& cone, const std::vector<double>& u);

/// Named dictionary of Lipschitz functions used as the generating set of the
/// algebra; the first entry is the constant function 1, later entries are
/// 1-Lipschitz and vanish at the basepoint.
class FnDict {
 public:
  FnDict(SpacePtr space, int basepoint);

  /// Normalizes (shift to vanish at the basepoint, rescale to glip <= 1) and
  /// appends. Constant inputs are rejected.
  void add(const std::string& name, std::vector<double> values);
  void add_raw(LipFn f);  // appended as-is (must already satisfy invariants)

  int size() const { return static_cast<int>(fns_.size()); }
  const LipFn& operator[](int i) const { return fns_[i]; }
  const LipFn& by_name(const std::string& n) const;
  int basepoint() const { return basepoint_; }
  const SpacePtr& space() const { return space_; }

  /// Entries after the constant (the 1-Lipschitz generators).
  std::vector<const LipFn*> generators() const;

 private:
  SpacePtr space_;
  int basepoint_;
  std::vector<LipFn> fns_;
};

/// Deterministic orthonormal basis of the orthogonal complement of w:
/// Gram-Schmidt over the standard basis with the largest-|w_j| coordinate
/// dropped (first such index on ties).
std::vector<std::vector<double>> orthonormal_complement(
    const std::vector<double>& w);

/// The auxiliary distance d_{delta,alpha}(x,y) =
///   delta d(x,y) + cot(alpha) sum_i |<u_i, F(x)-F(y)>|
/// with {u_i} the deterministic orthonormal complement basis of w. The l^1
/// combination makes the output a pseudometric.
std::vector<std::vector<double>> dst_delta_alpha(
    const std::vector<LipFn>& F, const std::vector<double>& w, double delta,
    double alpha, const MetricSpace& X);

}  // namespace mct
