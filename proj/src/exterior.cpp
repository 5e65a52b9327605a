#include "mct/exterior.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mct/current.hpp"
#include "mct/lipschitz_lp.hpp"

namespace mct {

namespace {

// Determinant by permutation expansion; sign-exact under column swaps and
// plenty fast for k <= 4.
double det_small(const std::vector<double>& m, int k) {
  if (k == 1) return m[0];
  if (k == 2) return m[0] * m[3] - m[1] * m[2];
  std::vector<int> perm(k);
  for (int i = 0; i < k; ++i) perm[i] = i;
  double det = 0.0;
  do {
    int inversions = 0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        if (perm[i] > perm[j]) ++inversions;
    double term = (inversions % 2 == 0) ? 1.0 : -1.0;
    for (int i = 0; i < k; ++i) term *= m[i * k + perm[i]];
    det += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

}  // namespace

std::vector<std::vector<int>> KVector::increasing_tuples(int N, int k) {
  std::vector<std::vector<int>> out;
  if (k > N || k <= 0) return out;
  std::vector<int> t(k);
  for (int i = 0; i < k; ++i) t[i] = i;
  while (true) {
    out.push_back(t);
    int i = k - 1;
    while (i >= 0 && t[i] == N - k + i) --i;
    if (i < 0) break;
    ++t[i];
    for (int j = i + 1; j < k; ++j) t[j] = t[j - 1] + 1;
  }
  return out;
}

KVector KVector::simple(std::vector<DerivationPtr> basis,
                        const std::vector<int>& tuple) {
  KVector v;
  v.basis = std::move(basis);
  v.k = static_cast<int>(tuple.size());
  v.tuples.push_back(tuple);
  v.coeffs.emplace_back(v.points(), 1.0);
  return v;
}

KVector KVector::zero(std::vector<DerivationPtr> basis, int k) {
  KVector v;
  v.basis = std::move(basis);
  v.k = k;
  return v;
}

int KVector::tuple_index(const std::vector<int>& a) const {
  for (std::size_t i = 0; i < tuples.size(); ++i)
    if (tuples[i] == a) return static_cast<int>(i);
  return -1;
}

KVector KVector::scaled(double c) const {
  KVector v = *this;
  for (auto& table : v.coeffs)
    for (double& x : table) x *= c;
  return v;
}

double KForm::glip_product() const {
  double p = 1.0;
  for (const auto& f : pis) p *= f.glip();
  return p;
}

double KForm::glip_l2(const MetricSpace& X) const {
  double L = 0.0;
  for (int p = 0; p < X.size(); ++p)
    for (int q = p + 1; q < X.size(); ++q) {
      double s = 0.0;
      for (const auto& f : pis) s += (f(p) - f(q)) * (f(p) - f(q));
      L = std::max(L, std::sqrt(s) / X.dist(p, q));
    }
  return L;
}

std::vector<double> pairing_values(
    const KVector& xi, const std::vector<std::vector<double>>& pis) {
  const int k = xi.k;
  if ((int)pis.size() != k) fail_input("pairing: arity mismatch");
  const int n = xi.points();
  // Precompute D_b pi_j for every basis derivation used by some tuple.
  std::vector<char> used(xi.N(), 0);
  for (const auto& t : xi.tuples)
    for (int b : t) used[b] = 1;
  std::vector<std::vector<std::vector<double>>> act(xi.N());
  for (int b = 0; b < xi.N(); ++b) {
    if (!used[b]) continue;
    act[b].reserve(k);
    for (int j = 0; j < k; ++j) act[b].push_back(xi.basis[b]->apply(pis[j]));
  }
  std::vector<double> out(n, 0.0);
  std::vector<double> m(k * k);
  for (std::size_t a = 0; a < xi.tuples.size(); ++a) {
    const auto& tup = xi.tuples[a];
    const auto& lam = xi.coeffs[a];
    for (int x = 0; x < n; ++x) {
      if (lam[x] == 0.0) continue;
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) m[i * k + j] = act[tup[i]][j][x];
      out[x] += lam[x] * det_small(m, k);
    }
  }
  return out;
}

std::vector<double> pairing(const KVector& xi, const KForm& omega) {
  std::vector<std::vector<double>> pis;
  pis.reserve(omega.pis.size());
  for (const auto& f : omega.pis) pis.push_back(f.values());
  return pairing_values(xi, pis);
}

double banach_norm_upper(
    const std::vector<std::vector<DerivationPtr>>& decomposition,
    const KVector& target, const FnDict& probe_dict, double probe_tol) {
  // Canonicalize tuples (sort by derivation identity, track permutation
  // sign) and cancel matching pairs.
  struct Group {
    std::vector<DerivationPtr> ds;
    double net = 0.0;
  };
  std::vector<Group> groups;
  for (const auto& tup : decomposition) {
    std::vector<DerivationPtr> sorted = tup;
    double sign = 1.0;
    for (std::size_t i = 0; i < sorted.size(); ++i)
      for (std::size_t j = i + 1; j < sorted.size(); ++j)
        if (sorted[j].get() < sorted[i].get()) {
          std::swap(sorted[i], sorted[j]);
          sign = -sign;
        }
    bool merged = false;
    for (auto& g : groups)
      if (g.ds == sorted) {
        g.net += sign;
        merged = true;
        break;
      }
    if (!merged) groups.push_back({std::move(sorted), sign});
  }

  double bound = 0.0;
  for (const auto& g : groups) {
    if (g.net == 0.0) continue;
    double prod = std::abs(g.net);
    for (const auto& d : g.ds) prod *= global_norm(*d);
    bound += prod;
  }

  // Probe check: the decomposition must represent the target.
  const int k = target.k;
  auto gens = probe_dict.generators();
  auto probe_tuples =
      KVector::increasing_tuples(static_cast<int>(gens.size()), k);
  const int n = target.points();
  std::vector<double> m(k * k);
  for (const auto& pt : probe_tuples) {
    std::vector<std::vector<double>> pis;
    for (int j : pt) pis.push_back(gens[j]->values());
    auto target_vals = pairing_values(target, pis);
    std::vector<double> dec_vals(n, 0.0);
    for (const auto& tup : decomposition) {
      std::vector<std::vector<std::vector<double>>> act;
      for (const auto& d : tup) {
        std::vector<std::vector<double>> rows;
        for (const auto& pi : pis) rows.push_back(d->apply(pi));
        act.push_back(std::move(rows));
      }
      for (int x = 0; x < n; ++x) {
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j) m[i * k + j] = act[i][j][x];
        dec_vals[x] += det_small(m, k);
      }
    }
    for (int x = 0; x < n; ++x)
      if (std::abs(target_vals[x] - dec_vals[x]) > probe_tol)
        fail_precondition(
            "banach_norm_upper: decomposition disagrees with the target on a "
            "probe form");
  }
  return bound;
}

LocalNormBounds local_norm_bounds(const KVector& xi,
                                  const std::vector<KForm>& probes) {
  const int n = xi.points();
  const int k = xi.k;
  LocalNormBounds out;
  out.lower.assign(n, 0.0);
  out.upper.assign(n, 0.0);

  std::vector<std::vector<double>> loc(xi.N());
  std::vector<char> used(xi.N(), 0);
  for (const auto& t : xi.tuples)
    for (int b : t) used[b] = 1;
  for (int b = 0; b < xi.N(); ++b)
    if (used[b]) loc[b] = local_norm(*xi.basis[b]);

  for (std::size_t a = 0; a < xi.tuples.size(); ++a)
    for (int x = 0; x < n; ++x) {
      double prod = std::abs(xi.coeffs[a][x]);
      for (int b : xi.tuples[a]) prod *= loc[b][x];
      out.upper[x] += prod;
    }

  const double kfact = std::tgamma(k + 1.0);
  for (const auto& omega : probes) {
    if (omega.k() != k) fail_input("local_norm_bounds: probe arity mismatch");
    double denom = std::min(kfact * omega.glip_product(),
                            std::pow(omega.glip_l2(*xi.space()), k));
    if (denom <= 0.0) continue;
    auto vals = pairing(xi, omega);
    for (int x = 0; x < n; ++x)
      out.lower[x] = std::max(out.lower[x], std::abs(vals[x]) / denom);
  }
  for (int x = 0; x < n; ++x)
    out.lower[x] = std::min(out.lower[x], out.upper[x]);
  return out;
}

KVector wedge(const KVector& a, const KVector& b) {
  if (a.space() != b.space()) fail_input("wedge: different spaces");
  if (a.basis.size() != b.basis.size())
    fail_input("wedge: different bases");
  for (std::size_t i = 0; i < a.basis.size(); ++i)
    if (a.basis[i] != b.basis[i]) fail_input("wedge: different bases");
  KVector out = KVector::zero(a.basis, a.k + b.k);
  if (a.k + b.k > a.N()) return out;  // zero vector by degree
  const int n = a.points();
  std::map<std::vector<int>, std::vector<double>> acc;
  for (std::size_t ia = 0; ia < a.tuples.size(); ++ia)
    for (std::size_t ib = 0; ib < b.tuples.size(); ++ib) {
      const auto& ta = a.tuples[ia];
      const auto& tb = b.tuples[ib];
      bool clash = false;
      for (int u : ta)
        for (int v : tb)
          if (u == v) clash = true;
      if (clash) continue;
      std::vector<int> merged = ta;
      merged.insert(merged.end(), tb.begin(), tb.end());
      int inversions = 0;
      for (std::size_t i = 0; i < merged.size(); ++i)
        for (std::size_t j = i + 1; j < merged.size(); ++j)
          if (merged[i] > merged[j]) ++inversions;
      double sign = (inversions % 2 == 0) ? 1.0 : -1.0;
      std::sort(merged.begin(), merged.end());
      auto& table = acc[merged];
      if (table.empty()) table.assign(n, 0.0);
      for (int x = 0; x < n; ++x)
        table[x] += sign * a.coeffs[ia][x] * b.coeffs[ib][x];
    }
  for (auto& [tup, table] : acc) {
    bool nonzero = false;
    for (double v : table)
      if (v != 0.0) nonzero = true;
    if (!nonzero) continue;
    out.tuples.push_back(tup);
    out.coeffs.push_back(std::move(table));
  }
  return out;
}

CurrentRepresentation represent_current(const Current& T,
                                        const std::vector<DerivationPtr>& basis,
                                        const std::vector<LipFn>& pseudoduals,
                                        const FnDict& dict,
                                        const RunConfig& config) {
  const int k = T.k();
  const int N = static_cast<int>(basis.size());
  if ((int)pseudoduals.size() != N)
    fail_input("represent_current: one pseudodual per basis derivation");
  const int n = T.space()->size();

  auto tuples = KVector::increasing_tuples(N, k);
  auto gens = dict.generators();
  auto dict_tuples =
      KVector::increasing_tuples(static_cast<int>(gens.size()), k);

  // Candidate tuples for the reference mass: pseudodual tuples first (they
  // force |lambda| <= 1), then dictionary tuples, then per-point LP optima
  // for 1-currents.
  std::vector<std::vector<std::vector<double>>> candidates;
  for (const auto& t : tuples) {
    std::vector<std::vector<double>> pis;
    for (int i : t) pis.push_back(pseudoduals[i].values());
    candidates.push_back(std::move(pis));
  }
  for (const auto& t : dict_tuples) {
    std::vector<std::vector<double>> pis;
    for (int i : t) pis.push_back(gens[i]->values());
    candidates.push_back(std::move(pis));
  }

  std::vector<double> ref(n, 0.0);
  std::vector<double> chi(n, 0.0);
  for (const auto& pis : candidates)
    for (int x = 0; x < n; ++x) {
      chi[x] = 1.0;
      double v = std::abs(T.evaluate(chi, pis));
      chi[x] = 0.0;
      ref[x] = std::max(ref[x], v);
    }
  if (k == 1) {
    for (int x = 0; x < n; ++x) {
      auto row = T.kernel_row(x);
      bool zero = true;
      for (double v : row)
        if (v != 0.0) zero = false;
      if (!zero)
        ref[x] = std::max(
            ref[x],
            maximize_over_lipschitz(row, T.space()->dist_matrix()).value);
    }
  }

  double ref_max = 0.0;
  for (double v : ref) ref_max = std::max(ref_max, v);

  CurrentRepresentation out;
  out.omega = KVector::zero(basis, k);
  for (const auto& t : tuples) {
    std::vector<std::vector<double>> pis;
    for (int i : t) pis.push_back(pseudoduals[i].values());
    std::vector<double> lam(n, 0.0);
    for (int x = 0; x < n; ++x) {
      if (ref[x] <= 1e-15 * ref_max) continue;  // ||T||-null point, excluded
      chi[x] = 1.0;
      lam[x] = T.evaluate(chi, pis) / ref[x];
      chi[x] = 0.0;
      out.lambda_sup = std::max(out.lambda_sup, std::abs(lam[x]));
    }
    out.omega.tuples.push_back(t);
    out.omega.coeffs.push_back(std::move(lam));
  }
  out.reference = Measure(ref);

  // Reconstruction check over all dictionary (f, pi-tuple) pairs.
  for (int fi = 0; fi < dict.size(); ++fi) {
    const auto& f = dict[fi].values();
    for (const auto& t : dict_tuples) {
      std::vector<std::vector<double>> pis;
      for (int i : t) pis.push_back(gens[i]->values());
      double direct = T.evaluate(f, pis);
      auto vals = pairing_values(out.omega, pis);
      double rec = 0.0;
      for (int x = 0; x < n; ++x) rec += f[x] * vals[x] * ref[x];
      out.reconstruction_defect =
          std::max(out.reconstruction_defect, std::abs(direct - rec));
    }
  }

  double cN = 0.0;
  for (const auto& d : basis) cN = std::max(cN, global_norm(*d));
  double binom = 1.0;
  for (int i = 0; i < k; ++i) binom = binom * (N - i) / (i + 1);
  out.norm_bound = std::pow(std::max(cN, 1.0), k) * binom;
  return out;
}

}  // namespace mct
