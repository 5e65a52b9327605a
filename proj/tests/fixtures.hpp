#pragma once

// Shared fixtures: the 3-point segment SEG, uniform grids, and the standard
// carriers built on them.

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "mct/alberti.hpp"
#include "mct/current.hpp"
#include "mct/derivation.hpp"
#include "mct/fragment.hpp"
#include "mct/space.hpp"

namespace fixtures {

using namespace mct;

// Three collinear points 0, 0.5, 1.
inline SpacePtr seg() {
  return std::make_shared<MetricSpace>(MetricSpace::from_coords(
      {"a", "b", "c"}, {{0.0}, {0.5}, {1.0}}));
}

inline Measure uniform(const SpacePtr& X, double w = 1.0) {
  return Measure(std::vector<double>(X->size(), w));
}

// Uniform segment with n points on [0, 1].
inline SpacePtr segment_n(int n) {
  std::vector<std::string> names;
  std::vector<std::vector<double>> coords;
  for (int i = 0; i < n; ++i) {
    names.push_back("p" + std::to_string(i));
    coords.push_back({double(i) / (n - 1)});
  }
  return std::make_shared<MetricSpace>(
      MetricSpace::from_coords(std::move(names), std::move(coords)));
}

// m x m planar grid with unit spacing; id = row * m + col.
inline SpacePtr grid(int m) {
  std::vector<std::string> names;
  std::vector<std::vector<double>> coords;
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) {
      names.push_back(std::to_string(r) + "_" + std::to_string(c));
      coords.push_back({double(c), double(r)});
    }
  return std::make_shared<MetricSpace>(
      MetricSpace::from_coords(std::move(names), std::move(coords)));
}

inline int gid(int m, int r, int c) { return r * m + c; }

inline LipFn coord_fn(const SpacePtr& X, int c, const std::string& name) {
  std::vector<double> v(X->size());
  for (int x = 0; x < X->size(); ++x) v[x] = X->coords()[x][c];
  return LipFn(X, std::move(v), name);
}

// The unit-speed fragment running through the whole segment/grid row.
inline Fragment seg_fragment() { return Fragment({0.0, 0.5, 1.0}, {0, 1, 2}); }

// x-direction fragments (one per row) on the m x m grid, unit speed.
inline std::vector<Fragment> grid_x_fragments(int m) {
  std::vector<Fragment> out;
  for (int r = 0; r < m; ++r) {
    std::vector<double> dom;
    std::vector<int> tr;
    for (int c = 0; c < m; ++c) {
      dom.push_back(double(c));
      tr.push_back(gid(m, r, c));
    }
    out.emplace_back(std::move(dom), std::move(tr));
  }
  return out;
}

inline std::vector<Fragment> grid_y_fragments(int m) {
  std::vector<Fragment> out;
  for (int c = 0; c < m; ++c) {
    std::vector<double> dom;
    std::vector<int> tr;
    for (int r = 0; r < m; ++r) {
      dom.push_back(double(r));
      tr.push_back(gid(m, r, c));
    }
    out.emplace_back(std::move(dom), std::move(tr));
  }
  return out;
}

// Carrier derivation along the given fragments with unit densities, against
// the uniform measure (d/dx or d/dy on grids).
inline Derivation axis_derivation(const SpacePtr& X,
                                  const std::vector<Fragment>& frags,
                                  const Measure& mu) {
  std::vector<CarrierPiece> carrier;
  for (const auto& g : frags) {
    CarrierPiece p;
    p.fragment = g;
    p.P = 1.0;
    p.nu.assign(g.edges(), 0.0);
    for (int e = 0; e < g.edges(); ++e) p.nu[e] = g.edge_dt(e) * mu(g.left(e));
    carrier.push_back(std::move(p));
  }
  return Derivation(X, mu, std::move(carrier));
}

// Dictionary with the coordinates (and products for richer tests).
inline FnDict coord_dict(const SpacePtr& X) {
  FnDict dict(X, 0);
  for (int c = 0; c < X->coord_dim(); ++c) {
    std::vector<double> v(X->size());
    for (int x = 0; x < X->size(); ++x) v[x] = X->coords()[x][c];
    dict.add(c == 0 ? "x" : (c == 1 ? "y" : "z" + std::to_string(c)),
             std::move(v));
  }
  return dict;
}

// Random small metric space: points in the unit square, n <= 12.
inline SpacePtr random_space(std::mt19937_64& rng, int n, int dim = 2) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::string> names;
  std::vector<std::vector<double>> coords;
  for (int i = 0; i < n; ++i) {
    names.push_back("r" + std::to_string(i));
    std::vector<double> c(dim);
    for (double& v : c) v = u(rng);
    coords.push_back(std::move(c));
  }
  return std::make_shared<MetricSpace>(
      MetricSpace::from_coords(std::move(names), std::move(coords)));
}

// Random fragment visiting distinct points of X.
inline Fragment random_fragment(std::mt19937_64& rng, const SpacePtr& X,
                                int max_len = 6) {
  int n = X->size();
  int len = 2 + static_cast<int>(rng() % std::max(1, max_len - 1));
  len = std::min(len, n);
  std::vector<int> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = i;
  std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<int> tr(ids.begin(), ids.begin() + len);
  std::vector<double> dom;
  double t = 0.0;
  std::uniform_real_distribution<double> gap(0.2, 1.0);
  for (int i = 0; i < len; ++i) {
    dom.push_back(t);
    t += gap(rng);
  }
  return Fragment(std::move(dom), std::move(tr));
}

}  // namespace fixtures
