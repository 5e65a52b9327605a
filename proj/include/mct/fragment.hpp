#pragma once

#include <utility>
#include <vector>

#include "mct/space.hpp"

namespace mct {

/// Discrete fragment: a partially-defined Lipschitz path given by a strictly
/// increasing list of times and a point id per time. An "edge" is a pair of
/// consecutive domain times.
struct Fragment {
  std::vector<double> domain;  // strictly increasing, nonempty
  std::vector<int> trace;      // point id per domain time

  Fragment() = default;
  Fragment(std::vector<double> dom, std::vector<int> tr);

  int points() const { return static_cast<int>(domain.size()); }
  int edges() const { return points() - 1; }
  double edge_dt(int e) const { return domain[e + 1] - domain[e]; }
  int left(int e) const { return trace[e]; }
  int right(int e) const { return trace[e + 1]; }

  /// Lipschitz constant of the map (max over all domain pairs).
  double lip(const MetricSpace& X) const;
  /// d(left, right) / dt of an edge.
  double edge_md(int e, const MetricSpace& X) const;
};

/// Signed weight per fragment edge. Derivation carriers use signed densities;
/// Alberti representations use nonnegative ones. Absolute continuity w.r.t.
/// image length means zero weight on degenerate edges.
using FragmentMeasure = std::vector<double>;

/// Total edge length of the fragment image, weighted by |nu|.
double fragment_measure_total(const FragmentMeasure& nu);

/// Checks the absolute-continuity invariant: nu vanishes on edges whose
/// endpoints coincide in X.
bool measure_absolutely_continuous(const Fragment& g, const FragmentMeasure& nu,
                                   const MetricSpace& X, double tol = 0.0);

/// Pointwise speed md(t): max of adjacent difference quotients, 0 at isolated
/// points (neighbors farther than h_max do not count).
double metric_differential(const Fragment& g, int t_index, const MetricSpace& X,
                           double h_max);

/// Discrete derivative of f along the edge e of g.
double pullback_derivative(const Fragment& g, const std::vector<double>& f,
                           int e);

/// Vector of discrete derivatives of several functions along edge e.
std::vector<double> pullback_derivative_vec(const Fragment& g,
                                            const std::vector<const LipFn*>& fs,
                                            int e);

/// Hausdorff distance between the graphs of two fragments, computed by the
/// bipartite max-min with the max(time, space) box gauge.
double fragment_distance(const Fragment& a, const Fragment& b,
                         const MetricSpace& X);

/// Fragment with domain { t : g(t) in S }; errors if the intersection is
/// empty. Edge measures do not survive restriction; callers re-derive them.
Fragment restrict_to_set(const Fragment& g, const std::vector<char>& in_S);

/// Splits the domain at gaps larger than h_max; returns the maximal runs as
/// index ranges [first, last] into g.domain.
std::vector<std::pair<int, int>> maximal_runs(const Fragment& g, double h_max);

/// Same trace, domain scaled by lip(g) so the result is 1-Lipschitz.
Fragment reparametrize_unit(const Fragment& g, const MetricSpace& X);

/// Result of convex filling: a curve on a uniform grid plus the space it
/// lives on (the original one, possibly extended by virtual points for gap
/// samples that snap to no cloud point).
struct FilledCurve {
  Fragment curve;      // full uniform grid of step h
  SpacePtr space;      // original space or an extension of it
  double step = 0.0;
  std::vector<int> virtual_points;  // ids added to the space, if any
};

/// Fills domain gaps affinely in coordinates, sampling on a uniform grid of
/// step h over the hull interval. Grid samples inside gaps snap to the
/// nearest cloud point when within snap_tol, otherwise become virtual points.
/// Requires coords on X; the filled curve agrees with g on dom g.
FilledCurve fill_fragment(const Fragment& g, SpacePtr X, double h,
                          double snap_tol = 1e-9);

}  // namespace mct
