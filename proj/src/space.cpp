#include "mct/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mct {

namespace {

double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

MetricSpace::MetricSpace(std::vector<std::string> point_names,
                         std::vector<std::vector<double>> dist,
                         std::optional<std::vector<std::vector<double>>> coords)
    : names_(std::move(point_names)),
      dist_(std::move(dist)),
      coords_(std::move(coords)) {
  const std::size_t n = names_.size();
  if (dist_.size() != n) fail_input("MetricSpace: dist is not n x n");
  for (const auto& row : dist_)
    if (row.size() != n) fail_input("MetricSpace: dist is not square");
  auto report = validate_metric(dist_);
  if (!report)
    fail_input("MetricSpace: " + report.violation + " violation at (" +
               std::to_string(report.i) + "," + std::to_string(report.j) +
               "," + std::to_string(report.k) + ")");
  if (coords_) {
    if (coords_->size() != n) fail_input("MetricSpace: coords size mismatch");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (std::abs(euclid((*coords_)[i], (*coords_)[j]) - dist_[i][j]) >
            1e-12 * std::max(1.0, dist_[i][j]))
          fail_input("MetricSpace: dist disagrees with coords at (" +
                     std::to_string(i) + "," + std::to_string(j) + ")");
  }
}

MetricSpace MetricSpace::from_coords(std::vector<std::string> point_names,
                                     std::vector<std::vector<double>> coords) {
  const std::size_t n = coords.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      d[i][j] = d[j][i] = euclid(coords[i], coords[j]);
  return MetricSpace(std::move(point_names), std::move(d), std::move(coords));
}

int MetricSpace::nearest_point(const std::vector<double>& coord) const {
  if (!coords_) fail_precondition("nearest_point: space has no coords");
  int best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i) {
    double d = euclid((*coords_)[i], coord);
    if (d < bd) bd = d, best = i;
  }
  return best;
}

Measure::Measure(std::vector<double> weights) : w_(std::move(weights)) {
  for (double x : w_)
    if (!(x >= 0.0)) fail_input("Measure: negative or NaN weight");
}

double Measure::total() const {
  double s = 0.0;
  for (double x : w_) s += x;
  return s;
}

std::vector<int> Measure::support(double tol) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (w_[i] > tol) out.push_back(i);
  return out;
}

Measure Measure::restrict_to(const std::vector<int>& U) const {
  std::vector<char> in(w_.size(), 0);
  for (int i : U) in[i] = 1;
  std::vector<double> w(w_.size(), 0.0);
  for (std::size_t i = 0; i < w_.size(); ++i)
    if (in[i]) w[i] = w_[i];
  return Measure(std::move(w));
}

ValidationReport validate_metric(const std::vector<std::vector<double>>& dist,
                                 bool allow_zero_offdiag, double tol) {
  ValidationReport r;
  const int n = static_cast<int>(dist.size());
  for (int i = 0; i < n; ++i) {
    if (std::abs(dist[i][i]) > tol) {
      r.ok = false, r.violation = "diagonal", r.i = i, r.j = i;
      r.defect = std::abs(dist[i][i]);
      return r;
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(dist[i][j] - dist[j][i]) > tol) {
        r.ok = false, r.violation = "symmetry", r.i = i, r.j = j;
        r.defect = std::abs(dist[i][j] - dist[j][i]);
        return r;
      }
      if (dist[i][j] < 0.0 || (!allow_zero_offdiag && dist[i][j] <= 0.0)) {
        r.ok = false, r.violation = "positivity", r.i = i, r.j = j;
        r.defect = dist[i][j];
        return r;
      }
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (dist[i][j] > dist[i][k] + dist[k][j] + tol) {
          r.ok = false, r.violation = "triangle", r.i = i, r.j = j, r.k = k;
          r.defect = dist[i][j] - dist[i][k] - dist[k][j];
          return r;
        }
  return r;
}

LipFn::LipFn(SpacePtr space, std::vector<double> values, std::string name)
    : space_(std::move(space)), v_(std::move(values)), name_(std::move(name)) {
  if ((int)v_.size() != space_->size())
    fail_input("LipFn: one value per point required");
  glip_ = lip_constant(v_, *space_);
  for (double x : v_) sup_ = std::max(sup_, std::abs(x));
}

double lip_constant(const std::vector<double>& values, const MetricSpace& X) {
  if ((int)values.size() != X.size())
    fail_input("lip_constant: length mismatch");
  double L = 0.0;
  for (int i = 0; i < X.size(); ++i)
    for (int j = i + 1; j < X.size(); ++j)
      L = std::max(L, std::abs(values[i] - values[j]) / X.dist(i, j));
  return L;
}

LipFn macshane_extend(const std::vector<int>& S,
                      const std::vector<double>& values_on_S, SpacePtr X,
                      std::string name) {
  if (S.empty()) fail_precondition("macshane_extend: empty subset");
  if (S.size() != values_on_S.size())
    fail_input("macshane_extend: values/subset size mismatch");
  double L = 0.0, M = 0.0;
  for (std::size_t a = 0; a < S.size(); ++a) {
    M = std::max(M, std::abs(values_on_S[a]));
    for (std::size_t b = a + 1; b < S.size(); ++b)
      L = std::max(L, std::abs(values_on_S[a] - values_on_S[b]) /
                          X->dist(S[a], S[b]));
  }
  std::vector<double> g(X->size());
  for (int y = 0; y < X->size(); ++y) {
    double v = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < S.size(); ++a)
      v = std::min(v, values_on_S[a] + L * X->dist(y, S[a]));
    g[y] = std::clamp(v, -M, M);
  }
  return LipFn(std::move(X), std::move(g), std::move(name));
}

Cone::Cone(std::vector<double> w, double a) : axis(std::move(w)), alpha(a) {
  if (!(alpha > 0.0 && alpha < M_PI / 2))
    fail_input("Cone: opening angle must lie in (0, pi/2)");
  double n2 = 0.0;
  for (double x : axis) n2 += x * x;
  if (std::abs(std::sqrt(n2) - 1.0) > 1e-12)
    fail_input("Cone: axis must be a unit vector");
}

ConeField ConeField::constant(int n_points, Cone c) {
  ConeField f;
  f.cones.assign(n_points, std::move(c));
  return f;
}

bool cone_contains(const Cone& cone, const std::vector<double>& u) {
  if (u.empty()) fail_precondition("cone_contains: zero-dimensional input");
  if (u.size() != cone.axis.size())
    fail_input("cone_contains: dimension mismatch");
  double dot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += cone.axis[i] * u[i];
  double perp2 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double p = u[i] - dot * cone.axis[i];
    perp2 += p * p;
  }
  return std::tan(cone.alpha) * dot > std::sqrt(perp2);
}

FnDict::FnDict(SpacePtr space, int basepoint)
    : space_(std::move(space)), basepoint_(basepoint) {
  std::vector<double> one(space_->size(), 1.0);
  fns_.emplace_back(space_, std::move(one), "1");
}

void FnDict::add(const std::string& name, std::vector<double> values) {
  double base = values[basepoint_];
  for (double& v : values) v -= base;
  double L = lip_constant(values, *space_);
  if (L == 0.0) fail_input("FnDict::add: constant generator '" + name + "'");
  if (L > 1.0)
    for (double& v : values) v /= L;
  fns_.emplace_back(space_, std::move(values), name);
}

void FnDict::add_raw(LipFn f) {
  if (f.glip() > 1.0 + 1e-12)
    fail_input("FnDict::add_raw: generator is not 1-Lipschitz");
  if (std::abs(f(basepoint_)) > 1e-12)
    fail_input("FnDict::add_raw: generator does not vanish at the basepoint");
  fns_.push_back(std::move(f));
}

const LipFn& FnDict::by_name(const std::string& n) const {
  for (const auto& f : fns_)
    if (f.fn_name() == n) return f;
  fail_input("FnDict: no function named '" + n + "'");
}

std::vector<const LipFn*> FnDict::generators() const {
  std::vector<const LipFn*> out;
  for (std::size_t i = 1; i < fns_.size(); ++i) out.push_back(&fns_[i]);
  return out;
}

std::vector<std::vector<double>> orthonormal_complement(
    const std::vector<double>& w) {
  const int k = static_cast<int>(w.size());
  int drop = 0;
  for (int i = 1; i < k; ++i)
    if (std::abs(w[i]) > std::abs(w[drop])) drop = i;
  std::vector<std::vector<double>> basis;
  basis.push_back(w);  // seed; removed at the end
  for (int i = 0; i < k; ++i) {
    if (i == drop) continue;
    std::vector<double> e(k, 0.0);
    e[i] = 1.0;
    for (const auto& b : basis) {
      double dot = 0.0;
      for (int j = 0; j < k; ++j) dot += e[j] * b[j];
      for (int j = 0; j < k; ++j) e[j] -= dot * b[j];
    }
    double n2 = 0.0;
    for (double x : e) n2 += x * x;
    if (n2 > 1e-24) {
      double n = std::sqrt(n2);
      for (double& x : e) x /= n;
      basis.push_back(std::move(e));
    }
  }
  basis.erase(basis.begin());
  return basis;
}

std::vector<std::vector<double>> dst_delta_alpha(
    const std::vector<LipFn>& F, const std::vector<double>& w, double delta,
    double alpha, const MetricSpace& X) {
  if (delta <= 0.0) fail_precondition("dst_delta_alpha: delta must be > 0");
  if (!(alpha > 0.0 && alpha < M_PI / 2))
    fail_precondition("dst_delta_alpha: alpha must lie in (0, pi/2)");
  if (F.size() != w.size()) fail_input("dst_delta_alpha: k mismatch");
  auto us = orthonormal_complement(w);
  const int n = X.size();
  const double cot = 1.0 / std::tan(alpha);
  std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      double v = delta * X.dist(x, y);
      for (const auto& u : us) {
        double dot = 0.0;
        for (std::size_t i = 0; i < F.size(); ++i)
          dot += u[i] * (F[i](x) - F[i](y));
        v += cot * std::abs(dot);
      }
      out[x][y] = out[y][x] = v;
    }
  return out;
}

}  // namespace mct
