#include "mct/current.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "mct/lipschitz_lp.hpp"

namespace mct {

FragmentMeasure default_edge_measure(const Fragment& g) {
  FragmentMeasure nu(g.edges());
  for (int e = 0; e < g.edges(); ++e) nu[e] = g.edge_dt(e);
  return nu;
}

Current::Current(SpacePtr space, int k, Payload payload)
    : space_(std::move(space)), k_(k), payload_(std::move(payload)) {}

Current Current::zero(SpacePtr space, int k) {
  return Current(std::move(space), k, ZeroForm{});
}

Current Current::fragment_sum(SpacePtr space,
                              std::vector<FragmentSummand> pieces) {
  for (const auto& p : pieces)
    if ((int)p.nu.size() != p.fragment.edges())
      fail_input("fragment_sum: nu size mismatch");
  return Current(std::move(space), 1, FragmentSumForm{std::move(pieces)});
}

Current Current::from_kvector(KVector xi, Measure mu) {
  SpacePtr space = xi.space();
  int k = xi.k;
  return Current(std::move(space), k,
                 PrecurrentForm{std::move(xi), std::move(mu)});
}

Current Current::point_mass(SpacePtr space, std::vector<double> w) {
  return Current(std::move(space), 0, PointMassForm{std::move(w)});
}

bool Current::is_fragment_sum() const {
  return std::holds_alternative<FragmentSumForm>(payload_);
}
bool Current::is_precurrent() const {
  return std::holds_alternative<PrecurrentForm>(payload_);
}
bool Current::is_zero() const {
  return std::holds_alternative<ZeroForm>(payload_);
}
const Current::FragmentSumForm& Current::fragment_form() const {
  return std::get<FragmentSumForm>(payload_);
}
const Current::PrecurrentForm& Current::precurrent_form() const {
  return std::get<PrecurrentForm>(payload_);
}
const Current::PointMassForm& Current::point_mass_form() const {
  return std::get<PointMassForm>(payload_);
}

double Current::evaluate(const std::vector<double>& f,
                         const std::vector<std::vector<double>>& pis) const {
  if ((int)pis.size() != k_) fail_input("Current::evaluate: arity mismatch");
  if (const auto* z = std::get_if<ZeroForm>(&payload_)) {
    (void)z;
    return 0.0;
  }
  if (const auto* pm = std::get_if<PointMassForm>(&payload_)) {
    double s = 0.0;
    for (std::size_t x = 0; x < pm->w.size(); ++x) s += f[x] * pm->w[x];
    return s;
  }
  if (const auto* fs = std::get_if<FragmentSumForm>(&payload_)) {
    const auto& pi = pis[0];
    double s = 0.0;
    for (const auto& p : fs->pieces)
      for (int e = 0; e < p.fragment.edges(); ++e) {
        if (p.nu[e] == 0.0) continue;
        int l = p.fragment.left(e), r = p.fragment.right(e);
        s += f[l] * (pi[r] - pi[l]) / p.fragment.edge_dt(e) * p.nu[e];
      }
    return s;
  }
  if (const auto* pc = std::get_if<PrecurrentForm>(&payload_)) {
    auto vals = pairing_values(pc->xi, pis);
    double s = 0.0;
    for (int x = 0; x < space_->size(); ++x)
      s += f[x] * vals[x] * pc->mu(x);
    return s;
  }
  if (const auto* b = std::get_if<BoundaryForm>(&payload_)) {
    std::vector<double> ones(space_->size(), 1.0);
    std::vector<std::vector<double>> args;
    args.reserve(pis.size() + 1);
    args.push_back(f);
    for (const auto& p : pis) args.push_back(p);
    return b->parent->evaluate(ones, args);
  }
  const auto& r = std::get<RestrictionForm>(payload_);
  std::vector<double> fpsi(f);
  for (std::size_t x = 0; x < fpsi.size(); ++x) fpsi[x] *= r.psi[x];
  std::vector<std::vector<double>> args = r.fixed_pis;
  for (const auto& p : pis) args.push_back(p);
  return r.parent->evaluate(fpsi, args);
}

double Current::evaluate(const LipFn& f,
                         const std::vector<const LipFn*>& pis) const {
  std::vector<std::vector<double>> raw;
  raw.reserve(pis.size());
  for (const auto* p : pis) raw.push_back(p->values());
  return evaluate(f.values(), raw);
}

std::vector<std::pair<int, int>> Current::carrier_edges() const {
  std::vector<std::pair<int, int>> out;
  if (const auto* fs = std::get_if<FragmentSumForm>(&payload_)) {
    for (const auto& p : fs->pieces)
      for (int e = 0; e < p.fragment.edges(); ++e)
        if (p.nu[e] != 0.0)
          out.emplace_back(p.fragment.left(e), p.fragment.right(e));
  } else if (const auto* pc = std::get_if<PrecurrentForm>(&payload_)) {
    for (const auto& d : pc->xi.basis)
      for (const auto& p : d->carrier())
        for (int e = 0; e < p.fragment.edges(); ++e)
          if (p.P * p.nu[e] != 0.0)
            out.emplace_back(p.fragment.left(e), p.fragment.right(e));
  } else if (const auto* b = std::get_if<BoundaryForm>(&payload_)) {
    out = b->parent->carrier_edges();
  } else if (const auto* r = std::get_if<RestrictionForm>(&payload_)) {
    out = r->parent->carrier_edges();
  }
  return out;
}

std::vector<double> Current::kernel_row(int x) const {
  if (k_ != 1) fail_precondition("kernel_row: needs a 1-dimensional functional");
  const int n = space_->size();
  if (const auto* fs = std::get_if<FragmentSumForm>(&payload_)) {
    std::vector<double> row(n, 0.0);
    for (const auto& p : fs->pieces)
      for (int e = 0; e < p.fragment.edges(); ++e) {
        if (p.nu[e] == 0.0 || p.fragment.left(e) != x) continue;
        double w = p.nu[e] / p.fragment.edge_dt(e);
        row[p.fragment.right(e)] += w;
        row[x] -= w;
      }
    return row;
  }
  std::vector<double> row(n, 0.0);
  std::vector<double> chi(n, 0.0), e(n, 0.0);
  chi[x] = 1.0;
  for (int z = 0; z < n; ++z) {
    e[z] = 1.0;
    row[z] = evaluate(chi, {e});
    e[z] = 0.0;
  }
  return row;
}

Current curve_current(SpacePtr space, const Fragment& gamma,
                      std::optional<FragmentMeasure> nu) {
  FragmentMeasure m = nu ? std::move(*nu) : default_edge_measure(gamma);
  if ((int)m.size() != gamma.edges())
    fail_input("curve_current: nu on wrong edge set");
  std::vector<FragmentSummand> pieces;
  pieces.push_back({gamma, std::move(m)});
  return Current::fragment_sum(std::move(space), std::move(pieces));
}

Current boundary(const Current& T) {
  if (T.k() == 0) return Current::zero(T.space(), 0);
  if (T.is_zero()) return Current::zero(T.space(), T.k() - 1);
  if (T.is_fragment_sum()) {
    std::vector<double> w(T.space()->size(), 0.0);
    for (const auto& p : T.fragment_form().pieces)
      for (int e = 0; e < p.fragment.edges(); ++e) {
        if (p.nu[e] == 0.0) continue;
        double c = p.nu[e] / p.fragment.edge_dt(e);
        w[p.fragment.right(e)] += c;
        w[p.fragment.left(e)] -= c;
      }
    return Current::point_mass(T.space(), std::move(w));
  }
  return Current(T.space(), T.k() - 1,
                 Current::BoundaryForm{std::make_shared<Current>(T)});
}

Current restrict(const Current& T, const std::vector<double>& psi,
                 const std::vector<std::vector<double>>& fixed_pis) {
  const int l = static_cast<int>(fixed_pis.size());
  if (l > T.k()) fail_precondition("restrict: more pi's than the dimension");
  if ((int)psi.size() != T.space()->size())
    fail_input("restrict: psi must be defined on all points");
  return Current(T.space(), T.k() - l,
                 Current::RestrictionForm{std::make_shared<Current>(T), psi,
                                          fixed_pis});
}

Measure exact_low_dim_mass(const Current& T) {
  const int n = T.space()->size();
  std::vector<double> m(n, 0.0);
  if (T.k() == 0) {
    std::vector<double> chi(n, 0.0);
    for (int x = 0; x < n; ++x) {
      chi[x] = 1.0;
      m[x] = std::abs(T.evaluate(chi, {}));
      chi[x] = 0.0;
    }
    return Measure(std::move(m));
  }
  if (T.k() != 1)
    fail_precondition("exact_low_dim_mass: dimension must be 0 or 1");
  for (int x = 0; x < n; ++x) {
    auto row = T.kernel_row(x);
    bool zero = true;
    for (double v : row)
      if (v != 0.0) zero = false;
    if (!zero)
      m[x] = maximize_over_lipschitz(row, T.space()->dist_matrix()).value;
  }
  return Measure(std::move(m));
}

namespace {

// Per-point upper mass measure with a certification flag.
std::pair<Measure, bool> upper_mass_measure(const Current& T) {
  const int n = T.space()->size();
  std::vector<double> u(n, 0.0);
  if (T.is_zero()) return {Measure(std::move(u)), true};
  if (T.k() <= 1) return {exact_low_dim_mass(T), true};
  if (const auto* pc = std::get_if<Current::PrecurrentForm>(&T.payload())) {
    std::vector<std::vector<double>> loc(pc->xi.N());
    std::vector<char> used(pc->xi.N(), 0);
    for (const auto& t : pc->xi.tuples)
      for (int b : t) used[b] = 1;
    for (int b = 0; b < pc->xi.N(); ++b)
      if (used[b]) loc[b] = local_norm(*pc->xi.basis[b]);
    double kf = std::tgamma(T.k() + 1.0);
    for (std::size_t a = 0; a < pc->xi.tuples.size(); ++a)
      for (int x = 0; x < n; ++x) {
        double p = std::abs(pc->xi.coeffs[a][x]);
        for (int b : pc->xi.tuples[a]) p *= loc[b][x];
        u[x] += kf * p * pc->mu(x);
      }
    return {Measure(std::move(u)), true};
  }
  if (const auto* r = std::get_if<Current::RestrictionForm>(&T.payload())) {
    auto [pu, cert] = upper_mass_measure(*r->parent);
    double gl = 1.0;
    for (const auto& pi : r->fixed_pis)
      gl *= lip_constant(pi, *T.space());
    for (int x = 0; x < n; ++x) u[x] = std::abs(r->psi[x]) * gl * pu(x);
    return {Measure(std::move(u)), cert};
  }
  // Boundary of dimension >= 2: no certified finite bound; the candidate
  // search below supplies a generator-relative value.
  return {Measure(std::move(u)), false};
}

double tuple_eval_at(const Current& T, int x,
                     const std::vector<std::vector<double>>& pis,
                     std::vector<double>& chi) {
  chi[x] = 1.0;
  double v = T.evaluate(chi, pis);
  chi[x] = 0.0;
  return v;
}

}  // namespace

MassEstimate mass_estimate(const Current& T, double eta, const FnDict& dict,
                           const RunConfig& config) {
  if (!(eta > 0.0 && eta < 1.0))
    fail_input("mass_estimate: eta must lie in (0,1)");
  const int n = T.space()->size();
  MassEstimate out;
  auto [upper, certified] = upper_mass_measure(T);
  out.upper_certified = certified;

  const int k = T.k();
  std::vector<double> lower(n, 0.0);

  if (T.is_zero() || k == 0) {
    if (k == 0 && !T.is_zero()) {
      lower = exact_low_dim_mass(T).weights();
      std::vector<int> Bp, Bm;
      std::vector<double> chi(n, 0.0);
      for (int x = 0; x < n; ++x) {
        chi[x] = 1.0;
        double v = T.evaluate(chi, {});
        chi[x] = 0.0;
        if (v > 0.0) Bp.push_back(x);
        if (v < 0.0) Bm.push_back(x);
      }
      for (auto* B : {&Bp, &Bm})
        if (!B->empty()) {
          MassWitness w;
          w.B = *B;
          std::vector<double> chiB(n, 0.0);
          for (int x : *B) chiB[x] = 1.0;
          w.value = T.evaluate(chiB, {});
          out.witnesses.push_back(std::move(w));
        }
    }
    out.lower = Measure(std::move(lower));
    out.upper = upper;
    return out;
  }

  // Candidate 1-Lipschitz k-tuples: dictionary tuples, LP coordinate ascent,
  // and (k = 1) per-point LP optima.
  auto gens = dict.generators();
  std::vector<std::vector<std::vector<double>>> candidates;
  for (const auto& t :
       KVector::increasing_tuples(static_cast<int>(gens.size()), k)) {
    std::vector<std::vector<double>> pis;
    for (int i : t) pis.push_back(gens[i]->values());
    candidates.push_back(std::move(pis));
  }

  std::vector<double> chi(n, 0.0);

  // Coordinate ascent from the best dictionary tuple.
  if (!candidates.empty()) {
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      double tot = 0.0;
      for (int x = 0; x < n; ++x)
        tot += std::abs(tuple_eval_at(T, x, candidates[c], chi));
      if (tot > best_val) best_val = tot, best = c;
    }
    auto tuple = candidates[best];
    for (int sweep = 0; sweep < 3; ++sweep) {
      std::vector<double> sgn(n, 0.0);
      for (int x = 0; x < n; ++x) {
        double v = tuple_eval_at(T, x, tuple, chi);
        sgn[x] = (v > 0.0) ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
      }
      for (int j = 0; j < k; ++j) {
        // Coefficients of pi_j |-> sum_x sgn(x) T(chi_x, tuple) via kernel
        // extraction on the restriction fixing the other slots.
        std::vector<double> c(n, 0.0), e(n, 0.0);
        for (int z = 0; z < n; ++z) {
          e[z] = 1.0;
          auto probe = tuple;
          probe[j] = e;
          for (int x = 0; x < n; ++x)
            if (sgn[x] != 0.0)
              c[z] += sgn[x] * tuple_eval_at(T, x, probe, chi);
          e[z] = 0.0;
        }
        auto lp = maximize_over_lipschitz(c, T.space()->dist_matrix());
        tuple[j] = lp.optimizer;
      }
    }
    candidates.push_back(std::move(tuple));
  }

  std::vector<std::vector<double>> point_opt(n);
  if (k == 1) {
    for (int x = 0; x < n; ++x) {
      auto row = T.kernel_row(x);
      bool zero = true;
      for (double v : row)
        if (v != 0.0) zero = false;
      if (zero) continue;
      auto lp = maximize_over_lipschitz(row, T.space()->dist_matrix());
      point_opt[x] = lp.optimizer;
      lower[x] = std::max(lower[x], lp.value);
    }
  }

  // Per-point values of each candidate; running lower bound.
  std::vector<std::vector<double>> vals(candidates.size(),
                                        std::vector<double>(n, 0.0));
  for (std::size_t c = 0; c < candidates.size(); ++c)
    for (int x = 0; x < n; ++x) {
      vals[c][x] = tuple_eval_at(T, x, candidates[c], chi);
      lower[x] = std::max(lower[x], std::abs(vals[c][x]));
    }

  std::vector<char> covered(n, 0);
  for (int x = 0; x < n; ++x)
    if (upper(x) <= 0.0 && lower[x] <= 0.0) covered[x] = 1;

  for (int round = 0; round < config.max_exhaustion_rounds; ++round) {
    double best_mass = 0.0;
    int best_c = -1;
    double best_sign = 1.0;
    for (std::size_t c = 0; c < candidates.size(); ++c)
      for (double sign : {1.0, -1.0}) {
        double m = 0.0;
        for (int x = 0; x < n; ++x)
          if (!covered[x] && lower[x] > 0.0 &&
              sign * vals[c][x] >= eta * lower[x])
            m += lower[x];
        if (m > best_mass + 1e-15) {
          best_mass = m;
          best_c = static_cast<int>(c);
          best_sign = sign;
        }
      }
    if (best_c < 0) break;
    MassWitness w;
    w.pis = candidates[best_c];
    for (int x = 0; x < n; ++x)
      if (!covered[x] && lower[x] > 0.0 &&
          best_sign * vals[best_c][x] >= eta * lower[x]) {
        w.B.push_back(x);
        covered[x] = 1;
        lower[x] = std::abs(vals[best_c][x]);
      }
    std::vector<double> chiB(n, 0.0);
    for (int x : w.B) chiB[x] = 1.0;
    w.value = T.evaluate(chiB, w.pis);
    out.witnesses.push_back(std::move(w));
    double rem = 0.0;
    for (int x = 0; x < n; ++x)
      if (!covered[x]) rem += upper(x);
    if (rem < config.mass_tol * std::max(1.0, upper.total())) break;
  }

  // k = 1: per-point LP witnesses close the remaining gap exactly.
  if (k == 1)
    for (int x = 0; x < n; ++x)
      if (!covered[x] && !point_opt[x].empty() && lower[x] > 0.0) {
        MassWitness w;
        w.B = {x};
        w.pis = {point_opt[x]};
        w.value = tuple_eval_at(T, x, w.pis, chi);
        covered[x] = 1;
        out.witnesses.push_back(std::move(w));
      }

  for (int x = 0; x < n; ++x)
    if (!covered[x]) out.uncovered_upper_mass += upper(x);

  // A certified upper bound can only be tightened by the witnesses, never
  // crossed; keep the interval consistent at float precision.
  std::vector<double> up = upper.weights();
  for (int x = 0; x < n; ++x) {
    if (!out.upper_certified) up[x] = std::max(up[x], lower[x]);
    lower[x] = std::min(lower[x], up[x]);
  }
  out.lower = Measure(std::move(lower));
  out.upper = Measure(std::move(up));
  return out;
}

std::pair<Derivation, Measure> der_of_current(const Current& T,
                                              const Measure& mu_ref) {
  if (T.k() != 1) fail_precondition("der_of_current: needs a 1-current");
  if (!T.is_fragment_sum() && !T.is_zero())
    fail_precondition(
        "der_of_current: needs fragment-sum form (convert via "
        "flow_decompose first)");
  const int n = T.space()->size();
  Measure mass = exact_low_dim_mass(T);
  for (int x = 0; x < n; ++x)
    if (mass(x) > 0.0 && mu_ref(x) <= 0.0)
      fail_precondition(
          "der_of_current: mass is not absolutely continuous w.r.t. the "
          "reference measure");
  std::vector<CarrierPiece> carrier;
  if (T.is_fragment_sum())
    for (const auto& p : T.fragment_form().pieces) {
      CarrierPiece cp;
      cp.fragment = p.fragment;
      cp.P = 1.0;
      cp.nu = p.nu;
      for (int e = 0; e < cp.fragment.edges(); ++e)
        if (mass(cp.fragment.left(e)) <= 0.0) cp.nu[e] = 0.0;
      carrier.push_back(std::move(cp));
    }
  return {Derivation(T.space(), mass, std::move(carrier)), mass};
}

std::pair<Derivation, Measure> der_of_current(const Current& T) {
  return der_of_current(T, exact_low_dim_mass(T));
}

Current curr_of_derivation(const Derivation& D, const Measure& mu) {
  std::vector<FragmentSummand> pieces;
  for (const auto& p : D.carrier()) {
    FragmentSummand s;
    s.fragment = p.fragment;
    s.nu = p.nu;
    for (int e = 0; e < s.fragment.edges(); ++e) {
      int x = s.fragment.left(e);
      double scale = D.mu()(x) > 0.0 ? mu(x) / D.mu()(x) : 0.0;
      s.nu[e] *= p.P * scale;
    }
    pieces.push_back(std::move(s));
  }
  return Current::fragment_sum(D.space(), std::move(pieces));
}

double normal_norm(const Current& T, const FnDict& dict,
                   const RunConfig& config) {
  if (T.k() < 1) fail_precondition("normal_norm: needs k >= 1");
  double m = mass_estimate(T, config.eta, dict, config).upper_total();
  Current bd = boundary(T);
  double bm = bd.k() <= 1 ? exact_low_dim_mass(bd).total()
                          : mass_estimate(bd, config.eta, dict, config)
                                .upper_total();
  return m + bm;
}

NormalityReport is_normal(const Current& T, double threshold,
                          const FnDict& dict, const RunConfig& config) {
  if (!T.is_precurrent() && !T.is_zero())
    fail_precondition("is_normal: needs precurrent form");
  NormalityReport rep;
  rep.threshold = threshold;
  rep.axiom_violation = check_axioms(T, 32, dict, config).max_violation();
  if (rep.axiom_violation > 1e-9) {
    rep.normal = false;
    return rep;
  }
  if (T.is_zero() || T.k() == 0) {
    rep.normal = true;
    return rep;
  }
  Current bd = boundary(T);
  if (bd.k() <= 1) {
    rep.boundary_mass = exact_low_dim_mass(bd).total();
    rep.boundary_mass_certified = true;
  } else {
    auto me = mass_estimate(bd, config.eta, dict, config);
    rep.boundary_mass = me.upper_total();
    rep.boundary_mass_certified = me.upper_certified;
  }
  rep.normal = rep.boundary_mass <= threshold;
  return rep;
}

FlowDecomposition flow_decompose(const Current& N, double tol) {
  if (N.k() != 1) fail_precondition("flow_decompose: needs a 1-current");
  if (!N.is_fragment_sum() && !N.is_zero())
    fail_precondition("flow_decompose: needs fragment-sum or edge-flow form");
  FlowDecomposition out;
  if (N.is_zero()) return out;
  const MetricSpace& X = *N.space();

  // Net edge flow: opposite directions cancel.
  std::map<std::pair<int, int>, double> flow;
  for (const auto& p : N.fragment_form().pieces)
    for (int e = 0; e < p.fragment.edges(); ++e) {
      if (p.nu[e] == 0.0) continue;
      int a = p.fragment.left(e), b = p.fragment.right(e);
      if (a == b) continue;
      double w = p.nu[e] / p.fragment.edge_dt(e);
      auto key = std::minmax(a, b);
      flow[{key.first, key.second}] += (a < b) ? w : -w;
    }
  std::map<int, std::map<int, double>> adj;  // a -> (b -> w), w > 0
  double scale = 0.0;
  for (auto& [key, w] : flow) {
    scale = std::max(scale, std::abs(w));
    if (w > 0.0)
      adj[key.first][key.second] = w;
    else if (w < 0.0)
      adj[key.second][key.first] = -w;
  }
  const double eps = std::max(tol * 1e-3, 1e-15 * std::max(scale, 1.0));

  auto divergence = [&](int v) {
    double d = 0.0;
    if (adj.count(v))
      for (auto& [to, w] : adj[v]) d += w;
    for (auto& [from, m] : adj) {
      auto it = m.find(v);
      if (it != m.end()) d -= it->second;
    }
    return d;
  };

  while (true) {
    // Drop exhausted edges.
    for (auto it = adj.begin(); it != adj.end();) {
      auto& m = it->second;
      for (auto jt = m.begin(); jt != m.end();)
        jt = (jt->second <= eps) ? m.erase(jt) : std::next(jt);
      it = m.empty() ? adj.erase(it) : std::next(it);
    }
    if (adj.empty()) break;
    // Prefer a source node (positive divergence), else any start (cycle).
    int start = -1;
    for (auto& [v, m] : adj)
      if (divergence(v) > eps) {
        start = v;
        break;
      }
    if (start < 0) start = adj.begin()->first;

    std::vector<int> walk{start};
    std::map<int, int> seen{{start, 0}};
    int cycle_from = -1;
    while (true) {
      int v = walk.back();
      auto it = adj.find(v);
      if (it == adj.end() || it->second.empty()) break;  // sink reached
      // Deterministic: heaviest outgoing edge, lowest id on ties.
      int next = -1;
      double best = -1.0;
      for (auto& [to, w] : it->second)
        if (w > best + 1e-15) best = w, next = to;
      walk.push_back(next);
      if (seen.count(next)) {
        cycle_from = seen[next];
        break;
      }
      seen[next] = static_cast<int>(walk.size()) - 1;
    }
    int first = (cycle_from >= 0) ? cycle_from : 0;
    std::vector<int> path(walk.begin() + first, walk.end());
    if (path.size() < 2) break;
    double w = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      w = std::min(w, adj[path[i]][path[i + 1]]);
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      adj[path[i]][path[i + 1]] -= w;
    std::vector<double> dom(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) dom[i] = double(i);
    Fragment g(std::move(dom), path);
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      out.mass_sum += w * X.dist(path[i], path[i + 1]);
    out.paths.emplace_back(std::move(g), w);
    out.is_cycle.push_back(cycle_from >= 0 ? 1 : 0);
  }

  for (auto& [v, m] : adj)
    for (auto& [to, w] : m) out.residual += std::abs(w);
  if (out.residual > tol)
    fail_tolerance("flow_decompose: residual " + std::to_string(out.residual) +
                   " exceeds tolerance");
  return out;
}

double AxiomReport::max_violation() const {
  return std::max({multilinearity, antisymmetry, locality});
}

AxiomReport check_axioms(const Current& T, int trials, const FnDict& dict,
                         const RunConfig& config) {
  AxiomReport rep;
  rep.note =
      "continuity axiom not represented: pointwise-bounded convergence is "
      "eventually constant on a finite space";
  const int n = T.space()->size();
  const int k = T.k();
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);
  auto gens = dict.generators();
  if (gens.empty() && k > 0) fail_input("check_axioms: empty dictionary");

  // Carrier closure of a set: predecessors first (boundary wrappers read f
  // through a derivative slot), then one-step successors.
  auto edges = T.carrier_edges();
  auto closure = [&](const std::vector<char>& S) {
    std::vector<char> C = S;
    for (auto& [a, b] : edges)
      if (S[b]) C[a] = 1;
    std::vector<char> C2 = C;
    for (auto& [a, b] : edges)
      if (C[a]) C2[b] = 1;
    return C2;
  };

  auto random_pi = [&]() {
    std::vector<double> pi = gens[rng() % gens.size()]->values();
    for (double& v : pi) v += 0.1 * unif(rng);
    return pi;
  };

  for (int t = 0; t < trials; ++t) {
    std::vector<double> f(n), f2(n);
    for (int x = 0; x < n; ++x) f[x] = unif(rng), f2[x] = unif(rng);
    std::vector<std::vector<double>> pis, pis2;
    for (int j = 0; j < k; ++j) pis.push_back(random_pi());
    pis2 = pis;

    double scale = 1.0;
    double a = unif(rng), b = unif(rng);

    // multilinearity in f
    {
      std::vector<double> fab(n);
      for (int x = 0; x < n; ++x) fab[x] = a * f[x] + b * f2[x];
      double v = T.evaluate(fab, pis) - a * T.evaluate(f, pis) -
                 b * T.evaluate(f2, pis);
      rep.multilinearity = std::max(rep.multilinearity, std::abs(v) / scale);
    }
    // multilinearity in a pi slot
    if (k > 0) {
      int j = static_cast<int>(rng() % k);
      auto q = random_pi();
      std::vector<double> mix(n);
      for (int x = 0; x < n; ++x) mix[x] = a * pis[j][x] + b * q[x];
      auto with = [&](const std::vector<double>& slot) {
        auto p = pis;
        p[j] = slot;
        return T.evaluate(f, p);
      };
      double v = with(mix) - a * with(pis[j]) - b * with(q);
      rep.multilinearity = std::max(rep.multilinearity, std::abs(v) / scale);
    }
    // antisymmetry under adjacent swaps
    if (k >= 2) {
      int j = static_cast<int>(rng() % (k - 1));
      auto swapped = pis;
      std::swap(swapped[j], swapped[j + 1]);
      double v = T.evaluate(f, pis) + T.evaluate(f, swapped);
      rep.antisymmetry = std::max(rep.antisymmetry, std::abs(v) / scale);
    }
    // locality: pi_i constant on the carrier closure of {f != 0}
    if (k > 0) {
      std::vector<char> S(n, 0);
      int cnt = 0;
      for (int x = 0; x < n; ++x)
        if (coin(rng) && coin(rng)) S[x] = 1, ++cnt;
      if (cnt == 0) S[rng() % n] = 1;
      std::vector<double> floc(n, 0.0);
      for (int x = 0; x < n; ++x)
        if (S[x]) floc[x] = unif(rng);
      int j = static_cast<int>(rng() % k);
      double cval = unif(rng);
      auto C = closure(S);
      auto pi_closed = random_pi();
      auto pi_strict = pi_closed;
      for (int x = 0; x < n; ++x) {
        if (C[x]) pi_closed[x] = cval;
        if (S[x]) pi_strict[x] = cval;
      }
      auto p = pis;
      p[j] = pi_closed;
      rep.locality =
          std::max(rep.locality, std::abs(T.evaluate(floc, p)) / scale);
      p[j] = pi_strict;
      rep.locality_strict =
          std::max(rep.locality_strict, std::abs(T.evaluate(floc, p)) / scale);
    }
  }
  return rep;
}

}  // namespace mct
