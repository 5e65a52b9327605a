#include "mct/lipschitz_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mct {

LipschitzLpResult maximize_over_lipschitz(
    const std::vector<double>& c,
    const std::vector<std::vector<double>>& dist) {
  const int n = static_cast<int>(c.size());
  LipschitzLpResult res;
  res.optimizer.assign(n, 0.0);
  if (n == 0) return res;

  // Project away the constant direction; c is balanced up to roundoff.
  std::vector<double> b(c);
  double mean = 0.0, scale = 0.0;
  for (double x : b) mean += x, scale += std::abs(x);
  mean /= n;
  for (double& x : b) x -= mean;
  if (scale == 0.0) return res;
  const double eps = 1e-13 * scale;

  // Successive shortest paths on the complete bipartite-able graph:
  // supplies at {b > 0}, demands at {b < 0}, arc cost dist(u,v).
  std::vector<std::vector<double>> flow(n, std::vector<double>(n, 0.0));
  std::vector<double> pot(n, 0.0);
  std::vector<double> d(n);
  std::vector<int> parent(n);
  std::vector<char> done(n);

  auto remaining_source = [&]() {
    int best = -1;
    for (int i = 0; i < n; ++i)
      if (b[i] > eps && (best < 0 || b[i] > b[best])) best = i;
    return best;
  };

  const long max_rounds = 4L * n * n + 16;
  for (long round = 0; round < max_rounds; ++round) {
    int s = remaining_source();
    if (s < 0) break;

    // Dense Dijkstra with reduced costs.
    std::fill(d.begin(), d.end(), std::numeric_limits<double>::infinity());
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    d[s] = 0.0;
    for (int it = 0; it < n; ++it) {
      int u = -1;
      for (int i = 0; i < n; ++i)
        if (!done[i] && (u < 0 || d[i] < d[u])) u = i;
      if (u < 0 || !std::isfinite(d[u])) break;
      done[u] = 1;
      for (int v = 0; v < n; ++v) {
        if (v == u || done[v]) continue;
        // forward arc u->v
        double rc = dist[u][v] + pot[u] - pot[v];
        if (rc < 0.0) rc = 0.0;
        if (d[u] + rc < d[v]) {
          d[v] = d[u] + rc;
          parent[v] = u;
        }
        // backward arc u->v exists iff flow(v,u) > 0, cost -dist(v,u)
        if (flow[v][u] > 0.0) {
          double rb = -dist[v][u] + pot[u] - pot[v];
          if (rb < 0.0) rb = 0.0;
          if (d[u] + rb < d[v]) {
            d[v] = d[u] + rb;
            parent[v] = u;
          }
        }
      }
    }

    int t = -1;
    for (int i = 0; i < n; ++i)
      if (b[i] < -eps && std::isfinite(d[i]) && (t < 0 || d[i] < d[t])) t = i;
    if (t < 0) break;

    for (int i = 0; i < n; ++i)
      if (std::isfinite(d[i])) pot[i] += d[i];

    double push = std::min(b[s], -b[t]);
    for (int v = t; v != s; v = parent[v]) {
      int u = parent[v];
      if (flow[v][u] > 0.0) push = std::min(push, flow[v][u]);
    }
    for (int v = t; v != s; v = parent[v]) {
      int u = parent[v];
      if (flow[v][u] > 0.0)
        flow[v][u] -= push;
      else
        flow[u][v] += push;
    }
    b[s] -= push;
    b[t] += push;
  }

  // Optimal potentials give the maximizing 1-Lipschitz function.
  std::vector<double> f(n);
  for (int i = 0; i < n; ++i) f[i] = -pot[i] + pot[0];
  double value = 0.0;
  for (int i = 0; i < n; ++i) value += c[i] * f[i];
  // A degenerate all-zero dual can only underreport; keep it feasible.
  res.value = value;
  res.optimizer = std::move(f);
  return res;
}

}  // namespace mct
