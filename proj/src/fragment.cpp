#include "mct/fragment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mct {

Fragment::Fragment(std::vector<double> dom, std::vector<int> tr)
    : domain(std::move(dom)), trace(std::move(tr)) {
  if (domain.empty()) fail_input("Fragment: empty domain");
  if (domain.size() != trace.size())
    fail_input("Fragment: domain/trace size mismatch");
  for (std::size_t i = 1; i < domain.size(); ++i)
    if (!(domain[i] > domain[i - 1]))
      fail_input("Fragment: domain must be strictly increasing");
}

double Fragment::lip(const MetricSpace& X) const {
  double L = 0.0;
  for (int i = 0; i < points(); ++i)
    for (int j = i + 1; j < points(); ++j)
      L = std::max(L, X.dist(trace[i], trace[j]) / (domain[j] - domain[i]));
  return L;
}

double Fragment::edge_md(int e, const MetricSpace& X) const {
  return X.dist(left(e), right(e)) / edge_dt(e);
}

double fragment_measure_total(const FragmentMeasure& nu) {
  double s = 0.0;
  for (double w : nu) s += std::abs(w);
  return s;
}

bool measure_absolutely_continuous(const Fragment& g, const FragmentMeasure& nu,
                                   const MetricSpace& X, double tol) {
  for (int e = 0; e < g.edges(); ++e)
    if (X.dist(g.left(e), g.right(e)) == 0.0 && std::abs(nu[e]) > tol)
      return false;
  return true;
}

double metric_differential(const Fragment& g, int t_index, const MetricSpace& X,
                           double h_max) {
  if (t_index < 0 || t_index >= g.points())
    fail_input("metric_differential: time index out of domain");
  double md = 0.0;
  if (t_index > 0) {
    double dt = g.domain[t_index] - g.domain[t_index - 1];
    if (dt <= h_max)
      md = std::max(md, X.dist(g.trace[t_index], g.trace[t_index - 1]) / dt);
  }
  if (t_index + 1 < g.points()) {
    double dt = g.domain[t_index + 1] - g.domain[t_index];
    if (dt <= h_max)
      md = std::max(md, X.dist(g.trace[t_index], g.trace[t_index + 1]) / dt);
  }
  return md;
}

double pullback_derivative(const Fragment& g, const std::vector<double>& f,
                           int e) {
  if (e < 0 || e >= g.edges())
    fail_input("pullback_derivative: edge index out of range");
  return (f[g.right(e)] - f[g.left(e)]) / g.edge_dt(e);
}

std::vector<double> pullback_derivative_vec(const Fragment& g,
                                            const std::vector<const LipFn*>& fs,
                                            int e) {
  std::vector<double> out(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i)
    out[i] = pullback_derivative(g, fs[i]->values(), e);
  return out;
}

double fragment_distance(const Fragment& a, const Fragment& b,
                         const MetricSpace& X) {
  auto directed = [&X](const Fragment& p, const Fragment& q) {
    double worst = 0.0;
    for (int i = 0; i < p.points(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < q.points(); ++j)
        best = std::min(best,
                        std::max(std::abs(p.domain[i] - q.domain[j]),
                                 X.dist(p.trace[i], q.trace[j])));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

Fragment restrict_to_set(const Fragment& g, const std::vector<char>& in_S) {
  std::vector<double> dom;
  std::vector<int> tr;
  for (int i = 0; i < g.points(); ++i)
    if (in_S[g.trace[i]]) {
      dom.push_back(g.domain[i]);
      tr.push_back(g.trace[i]);
    }
  if (dom.empty())
    fail_precondition("restrict_to_set: trace does not meet the set");
  return Fragment(std::move(dom), std::move(tr));
}

std::vector<std::pair<int, int>> maximal_runs(const Fragment& g, double h_max) {
  std::vector<std::pair<int, int>> runs;
  int start = 0;
  for (int i = 1; i < g.points(); ++i)
    if (g.domain[i] - g.domain[i - 1] > h_max) {
      runs.emplace_back(start, i - 1);
      start = i;
    }
  runs.emplace_back(start, g.points() - 1);
  return runs;
}

Fragment reparametrize_unit(const Fragment& g, const MetricSpace& X) {
  double L = g.lip(X);
  if (L <= 0.0)
    fail_precondition("reparametrize_unit: constant fragment has lip 0");
  if (L <= 1.0) return g;
  std::vector<double> dom(g.domain);
  for (double& t : dom) t *= L;
  return Fragment(std::move(dom), g.trace);
}

FilledCurve fill_fragment(const Fragment& g, SpacePtr X, double h,
                          double snap_tol) {
  if (!X->has_coords()) fail_precondition("fill_fragment: space lacks coords");
  if (h <= 0.0) fail_input("fill_fragment: step must be positive");
  FilledCurve out;
  out.step = h;
  const double t0 = g.domain.front(), t1 = g.domain.back();
  int L = (t1 > t0) ? (int)std::llround((t1 - t0) / h) : 0;
  if (std::abs(t0 + L * h - t1) > 1e-9 * std::max(1.0, std::abs(t1)))
    fail_input("fill_fragment: step does not divide the hull interval");

  const int dim = X->coord_dim();
  std::vector<std::string> names = X->names();
  std::vector<std::vector<double>> coords = X->coords();
  std::vector<double> dom;
  std::vector<int> tr;
  int next_dom = 0;
  for (int j = 0; j <= L; ++j) {
    double t = t0 + j * h;
    while (next_dom + 1 < g.points() && g.domain[next_dom + 1] <= t + 1e-12)
      ++next_dom;
    dom.push_back(t);
    if (std::abs(g.domain[next_dom] - t) <= 1e-9) {
      tr.push_back(g.trace[next_dom]);
      continue;
    }
    // t lies in the gap (domain[next_dom], domain[next_dom+1])
    double u = g.domain[next_dom], v = g.domain[next_dom + 1];
    const auto& cu = X->coords()[g.trace[next_dom]];
    const auto& cv = X->coords()[g.trace[next_dom + 1]];
    std::vector<double> p(dim);
    for (int c = 0; c < dim; ++c)
      p[c] = (t - u) / (v - u) * cv[c] + (v - t) / (v - u) * cu[c];
    int nearest = X->nearest_point(p);
    double dn = 0.0;
    for (int c = 0; c < dim; ++c)
      dn += (p[c] - X->coords()[nearest][c]) * (p[c] - X->coords()[nearest][c]);
    if (std::sqrt(dn) <= snap_tol) {
      tr.push_back(nearest);
    } else {
      int id = static_cast<int>(coords.size());
      coords.push_back(p);
      names.push_back("~v" + std::to_string(id));
      tr.push_back(id);
      out.virtual_points.push_back(id);
    }
  }
  if (out.virtual_points.empty() && (int)names.size() == X->size()) {
    out.space = X;
  } else {
    out.space = std::make_shared<MetricSpace>(
        MetricSpace::from_coords(std::move(names), std::move(coords)));
  }
  out.curve = Fragment(std::move(dom), std::move(tr));

  double lip_in = g.lip(*X);
  double lip_out = out.curve.lip(*out.space);
  if (lip_out > lip_in + 1e-9 + 2.0 * snap_tol / h)
    fail_tolerance("fill_fragment: filled curve exceeds the input Lipschitz "
                   "constant");
  return out;
}

}  // namespace mct
