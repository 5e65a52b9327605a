#include "mct/alberti.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "mct/lipschitz_lp.hpp"

namespace mct {

Measure AlbertiRep::pushforward() const {
  std::vector<double> w(space->size(), 0.0);
  for (std::size_t g = 0; g < fragments.size(); ++g)
    for (int e = 0; e < fragments[g].edges(); ++e)
      w[fragments[g].left(e)] += P[g] * nu[g][e];
  return Measure(std::move(w));
}

double AlbertiRep::total_carrier_mass() const {
  double s = 0.0;
  for (std::size_t g = 0; g < fragments.size(); ++g)
    for (double v : nu[g]) s += P[g] * v;
  return s;
}

RepValidation validate(const AlbertiRep& rep, const Measure& mu, double tol) {
  RepValidation out;
  auto push = rep.pushforward();
  for (int x = 0; x < mu.size(); ++x)
    out.decomposition_defect =
        std::max(out.decomposition_defect, std::abs(push(x) - mu(x)));
  double psum = 0.0;
  for (double p : rep.P) psum += p;
  out.p_normalization_defect = rep.fragments.empty() && mu.total() == 0.0
                                   ? 0.0
                                   : std::abs(psum - 1.0);
  for (std::size_t g = 0; g < rep.fragments.size(); ++g)
    if (!measure_absolutely_continuous(rep.fragments[g], rep.nu[g],
                                       *rep.space, tol))
      out.absolutely_continuous = false;
  (void)tol;
  return out;
}

AlbertiRep restrict_rep(const AlbertiRep& rep, const std::vector<int>& U) {
  std::vector<char> in(rep.space->size(), 0);
  for (int x : U) in[x] = 1;
  AlbertiRep out = rep;
  out.provenance = rep.provenance + "|restricted";
  for (std::size_t g = 0; g < out.fragments.size(); ++g)
    for (int e = 0; e < out.fragments[g].edges(); ++e)
      if (!in[out.fragments[g].left(e)]) out.nu[g][e] = 0.0;
  return out;
}

AlbertiRep glue(const std::vector<AlbertiRep>& reps,
                const std::vector<std::vector<int>>& partition) {
  if (reps.size() != partition.size())
    fail_input("glue: one rep per partition piece");
  if (reps.empty()) fail_input("glue: empty input");
  const SpacePtr space = reps.front().space;
  std::vector<char> seen(space->size(), 0);
  for (const auto& U : partition)
    for (int x : U) {
      if (seen[x]) fail_precondition("glue: overlapping partition pieces");
      seen[x] = 1;
    }

  std::vector<AlbertiRep> restricted;
  std::vector<double> masses;
  double total = 0.0;
  for (std::size_t a = 0; a < reps.size(); ++a) {
    AlbertiRep r = restrict_rep(reps[a], partition[a]);
    double m = r.pushforward().total();
    restricted.push_back(std::move(r));
    masses.push_back(m);
    total += m;
  }
  AlbertiRep out;
  out.space = space;
  out.provenance = "glued";
  if (total <= 0.0) return out;
  for (std::size_t a = 0; a < restricted.size(); ++a) {
    double s = masses[a] / total;
    if (s <= 0.0) continue;  // empty piece skipped
    for (std::size_t g = 0; g < restricted[a].fragments.size(); ++g) {
      out.fragments.push_back(restricted[a].fragments[g]);
      out.P.push_back(s * restricted[a].P[g]);
      FragmentMeasure nu = restricted[a].nu[g];
      for (double& v : nu) v /= s;
      out.nu.push_back(std::move(nu));
    }
  }
  return out;
}

namespace {

bool edge_passes_direction(const Fragment& g, int e, const DirectionSpec& spec) {
  std::vector<const LipFn*> fs;
  for (const auto& f : spec.f) fs.push_back(&f);
  auto u = pullback_derivative_vec(g, fs, e);
  return cone_contains(spec.cone.at(g.left(e)), u);
}

bool edge_passes_speed(const Fragment& g, int e, const SpeedSpec& spec,
                       const MetricSpace& X) {
  double v = pullback_derivative(g, spec.g.values(), e);
  double bound = spec.sigma[g.left(e)] * g.edge_md(e, X);
  return spec.strict ? v > bound : v >= bound - 1e-12;
}

}  // namespace

FractionReport check_direction(const AlbertiRep& rep,
                               const DirectionSpec& spec) {
  FractionReport out;
  double pass = 0.0, total = 0.0;
  for (std::size_t g = 0; g < rep.fragments.size(); ++g)
    for (int e = 0; e < rep.fragments[g].edges(); ++e) {
      double m = rep.P[g] * rep.nu[g][e];
      if (m == 0.0) continue;
      total += m;
      if (edge_passes_direction(rep.fragments[g], e, spec))
        pass += m;
      else
        out.failing.emplace_back(static_cast<int>(g), e);
    }
  out.fraction = total > 0.0 ? pass / total : 1.0;
  out.certificate = out.failing.empty();
  return out;
}

FractionReport check_speed(const AlbertiRep& rep, const SpeedSpec& spec) {
  FractionReport out;
  double pass = 0.0, total = 0.0;
  for (std::size_t g = 0; g < rep.fragments.size(); ++g)
    for (int e = 0; e < rep.fragments[g].edges(); ++e) {
      double m = rep.P[g] * rep.nu[g][e];
      if (m == 0.0) continue;
      total += m;
      if (edge_passes_speed(rep.fragments[g], e, spec, *rep.space))
        pass += m;
      else
        out.failing.emplace_back(static_cast<int>(g), e);
    }
  out.fraction = total > 0.0 ? pass / total : 1.0;
  out.certificate = out.failing.empty();
  return out;
}

std::vector<Fragment> split_by_spec(const Fragment& g, const MetricSpace& X,
                                    const DirectionSpec* dir,
                                    const SpeedSpec* speed) {
  std::vector<Fragment> out;
  int run_start = -1;
  auto flush = [&](int run_end) {
    if (run_start >= 0 && run_end > run_start) {
      std::vector<double> dom(g.domain.begin() + run_start,
                              g.domain.begin() + run_end + 1);
      std::vector<int> tr(g.trace.begin() + run_start,
                          g.trace.begin() + run_end + 1);
      out.emplace_back(std::move(dom), std::move(tr));
    }
    run_start = -1;
  };
  for (int e = 0; e < g.edges(); ++e) {
    bool ok = true;
    if (dir && !edge_passes_direction(g, e, *dir)) ok = false;
    if (ok && speed && !edge_passes_speed(g, e, *speed, X)) ok = false;
    if (ok) {
      if (run_start < 0) run_start = e;
    } else {
      flush(e);
    }
  }
  flush(g.edges());
  return out;
}

RainwaterResult rainwater_split(const Measure& mu, const std::vector<int>& B,
                                const std::vector<Fragment>& family,
                                SpacePtr space,
                                const std::vector<FragmentMeasure>* priors) {
  RainwaterResult out;
  std::vector<char> inB(space->size(), 0);
  for (int x : B) inB[x] = 1;

  // Admissible edges at each point: left endpoint there, positive image
  // length. The max-coverage LP decouples per point since each edge feeds
  // exactly one left endpoint.
  std::map<int, std::vector<std::pair<int, int>>> pool;
  for (std::size_t g = 0; g < family.size(); ++g)
    for (int e = 0; e < family[g].edges(); ++e) {
      int x = family[g].left(e);
      if (!inB[x]) continue;
      if (space->dist(family[g].left(e), family[g].right(e)) <= 0.0) continue;
      pool[x].emplace_back(static_cast<int>(g), e);
    }

  std::vector<FragmentMeasure> weights(family.size());
  for (std::size_t g = 0; g < family.size(); ++g)
    weights[g].assign(family[g].edges(), 0.0);

  for (int x : B) {
    if (mu(x) <= 0.0) {
      out.A.push_back(x);
      continue;
    }
    auto it = pool.find(x);
    if (it == pool.end() || it->second.empty()) {
      out.S.push_back(x);
      continue;
    }
    out.A.push_back(x);
    double prior_total = 0.0;
    if (priors)
      for (auto& [g, e] : it->second) prior_total += std::abs((*priors)[g][e]);
    for (auto& [g, e] : it->second) {
      double share =
          (priors && prior_total > 0.0)
              ? std::abs((*priors)[g][e]) / prior_total
              : 1.0 / static_cast<double>(it->second.size());
      weights[g][e] += mu(x) * share;
    }
  }

  // Normalize into a probability over fragments.
  AlbertiRep rep;
  rep.space = space;
  rep.provenance = "rainwater";
  double M = 0.0;
  std::vector<double> m(family.size(), 0.0);
  for (std::size_t g = 0; g < family.size(); ++g) {
    for (double v : weights[g]) m[g] += v;
    M += m[g];
  }
  if (M > 0.0)
    for (std::size_t g = 0; g < family.size(); ++g) {
      if (m[g] <= 0.0) continue;
      rep.fragments.push_back(family[g]);
      rep.P.push_back(m[g] / M);
      FragmentMeasure nu = weights[g];
      for (double& v : nu) v *= M / m[g];
      rep.nu.push_back(std::move(nu));
    }

  out.certificate.S = out.S;
  out.certificate.family_size = static_cast<int>(family.size());
  std::vector<char> inS(space->size(), 0);
  for (int x : out.S) inS[x] = 1;
  for (const auto& g : family)
    for (int e = 0; e < g.edges(); ++e)
      if (inS[g.left(e)] && space->dist(g.left(e), g.right(e)) > 0.0)
        ++out.certificate.violating_edges;
  out.rep = std::move(rep);
  return out;
}

ConeRefineResult cone_refine(const Measure& mu, const std::vector<int>& V,
                             const std::vector<Derivation>& Ds,
                             const std::vector<LipFn>& g,
                             const std::vector<double>& w, double alpha,
                             double sigma, const RunConfig& config) {
  const int k = static_cast<int>(Ds.size());
  if ((int)g.size() != k || (int)w.size() != k)
    fail_input("cone_refine: k mismatch");
  if (!(sigma > 0.0 && sigma < 1.0))
    fail_input("cone_refine: sigma must lie in (0,1)");
  const SpacePtr space = Ds.front().space();

  // Pseudodual precondition: D_i g_j = delta_ij on V.
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      auto a = Ds[i].apply(g[j]);
      for (int x : V)
        if (std::abs(a[x] - (i == j ? 1.0 : 0.0)) > 1e-6)
          fail_precondition(
              "cone_refine: pseudodual precondition D_i g_j = delta_ij fails "
              "on V");
    }
  }

  Derivation Dw = scale(w[0], Ds[0]);
  for (int i = 1; i < k; ++i) Dw = add(Dw, scale(w[i], Ds[i]));
  auto loc = local_norm(Dw);

  ConeRefineResult out;
  out.speed_bound.assign(space->size(), 0.0);
  for (int x : V)
    out.speed_bound[x] = sigma / (loc[x] + (1.0 - sigma));

  std::vector<double> wg(space->size(), 0.0);
  for (int x = 0; x < space->size(); ++x)
    for (int i = 0; i < k; ++i) wg[x] += w[i] * g[i](x);
  LipFn wg_fn(space, wg, "<w,g>");

  DirectionSpec dir{g, ConeField::constant(space->size(), Cone(w, alpha))};
  SpeedSpec speed{wg_fn, out.speed_bound, false};

  std::vector<Fragment> family;
  std::vector<FragmentMeasure> priors;
  for (const auto& piece : Dw.carrier()) {
    for (const auto& sub : split_by_spec(piece.fragment, *space, &dir, &speed)) {
      // carry the |nu| prior of the matching edges
      FragmentMeasure prior(sub.edges(), 0.0);
      for (int e = 0; e < sub.edges(); ++e) {
        for (int e0 = 0; e0 < piece.fragment.edges(); ++e0)
          if (piece.fragment.domain[e0] == sub.domain[e])
            prior[e] = std::abs(piece.P * piece.nu[e0]);
      }
      family.push_back(sub);
      priors.push_back(std::move(prior));
    }
  }

  Measure muV = mu.restrict_to(V);
  auto rw = rainwater_split(muV, V, family, space, &priors);
  out.rep = rw.rep;
  out.rep.provenance = "cone_refine";
  out.uncovered = rw.S;
  double missed = 0.0;
  for (int x : rw.S) missed += muV(x);
  if (missed > config.mass_tol * std::max(1.0, muV.total()))
    fail_tolerance("cone_refine: coverage gap " + std::to_string(missed) +
                   " above tolerance");
  out.direction = check_direction(out.rep, dir);
  out.speed = check_speed(out.rep, speed);
  return out;
}

ConeNullBound cone_null_estimate(const Current& T, const std::vector<int>& K,
                                 const std::vector<LipFn>& pis, double delta,
                                 double alpha, const NullCertificate& cert,
                                 const FnDict& dict, const RunConfig& config) {
  const int k = T.k();
  if ((int)pis.size() != k) fail_input("cone_null_estimate: arity mismatch");
  ConeNullBound out;
  if (K.empty()) {
    out.certified = true;
    return out;
  }
  if (!cert.exhaustive_ok())
    fail_precondition("cone_null_estimate: null certificate is not exhaustive");
  std::vector<char> inCert(T.space()->size(), 0);
  for (int x : cert.S) inCert[x] = 1;
  for (int x : K)
    if (!inCert[x])
      fail_precondition(
          "cone_null_estimate: K is not covered by the null certificate");

  const int n = T.space()->size();
  std::vector<double> e1(k, 0.0);
  e1[0] = 1.0;
  auto dmat = dst_delta_alpha(pis, e1, delta, alpha, *T.space());

  // Majorant over the net (the whole of K) and its argmax pieces.
  const auto& pi1 = pis[0].values();
  std::vector<double> majorant(n, 0.0);
  std::vector<int> piece_of(n, -1);
  for (int y = 0; y < n; ++y) {
    double best = -std::numeric_limits<double>::infinity();
    int arg = -1;
    for (int a : K) {
      double v = pi1[a] + dmat[y][a];
      if (v > best + 1e-15) {
        best = v;
        arg = a;
      }
    }
    majorant[y] = best;
    piece_of[y] = arg;
  }

  auto upper = mass_estimate(T, config.eta, dict, config).upper;

  // Per-piece chain: on S_a the majorant equals
  // pi_1(x_a) + delta d(.,x_a) + cot(alpha) sum_{b>=2} |pi_b - pi_b(x_a)|;
  // the constant drops and the |pi_b - c| terms cancel by the alternating
  // property, leaving the delta d(.,x_a) term bounded by delta ||T||(S_a).
  std::vector<std::vector<double>> tail;
  for (int j = 1; j < k; ++j) tail.push_back(pis[j].values());
  std::vector<double> chiS(n, 0.0);
  double chain_total = 0.0, slack_pieces = 0.0;
  bool pieces_ok = true;
  for (int a : K) {
    std::fill(chiS.begin(), chiS.end(), 0.0);
    double piece_upper = 0.0;
    bool any = false;
    for (int y : K)
      if (piece_of[y] == a) {
        chiS[y] = 1.0;
        piece_upper += upper(y);
        any = true;
      }
    if (!any) continue;
    std::vector<double> dcenter(n);
    for (int y = 0; y < n; ++y) dcenter[y] = dmat[y][a];
    std::vector<std::vector<double>> args{dcenter};
    for (auto& t : tail) args.push_back(t);
    double v_exact = T.evaluate(chiS, args);
    if (std::abs(v_exact) > delta * piece_upper + 1e-9) pieces_ok = false;
    chain_total += delta * piece_upper;
    std::vector<std::vector<double>> gargs{majorant};
    for (auto& t : tail) gargs.push_back(t);
    double v_majorant = T.evaluate(chiS, gargs);
    slack_pieces += std::abs(v_majorant - v_exact);
  }

  std::vector<double> chiK(n, 0.0);
  for (int x : K) chiK[x] = 1.0;
  std::vector<std::vector<double>> direct_args;
  for (const auto& p : pis) direct_args.push_back(p.values());
  out.direct_value = std::abs(T.evaluate(chiK, direct_args));
  std::vector<std::vector<double>> gargs{majorant};
  for (auto& t : tail) gargs.push_back(t);
  double majorant_value = T.evaluate(chiK, gargs);
  out.coupling_slack = std::abs(out.direct_value - std::abs(majorant_value)) +
                       slack_pieces;
  double upperK = 0.0;
  for (int x : K) upperK += upper(x);
  out.chain_bound = delta * upperK;
  for (int x : K)
    out.majorant_gap = std::max(out.majorant_gap, majorant[x] - pi1[x]);
  out.achieved_bound = out.chain_bound + out.coupling_slack;
  out.certified = pieces_ok && out.direct_value <= out.achieved_bound + 1e-9;
  return out;
}

ConeDecomposition current_to_alberti(const Current& T, double eta,
                                     double delta, const ConeField& cone,
                                     const FnDict& dict,
                                     const RunConfig& config) {
  const int k = T.k();
  if (!(delta > 0.0 && delta < eta / k))
    fail_precondition("current_to_alberti: delta must lie in (0, eta/k)");
  const SpacePtr space = T.space();
  const int n = space->size();

  // Candidate fragment family: the carrier of T.
  std::vector<Fragment> family;
  if (T.is_fragment_sum()) {
    for (const auto& p : T.fragment_form().pieces) family.push_back(p.fragment);
  } else if (T.is_precurrent()) {
    for (const auto& d : T.precurrent_form().xi.basis)
      for (const auto& p : d->carrier()) family.push_back(p.fragment);
  } else {
    fail_precondition("current_to_alberti: carrier-based current required");
  }

  ConeDecomposition out;
  auto me = mass_estimate(T, eta, dict, config);
  double total_mass = me.lower_total();
  if (total_mass <= 0.0)
    fail_precondition(
        "current_to_alberti: current evaluates to zero on all candidates");

  std::vector<char> covered(n, 0);
  const double alpha = config.cone_alpha;

  for (int round = 0; round < config.max_exhaustion_rounds; ++round) {
    // Pieces from this round's witnesses, restricted to uncovered points.
    bool progress = false;
    for (const auto& wit : me.witnesses) {
      std::vector<int> B;
      for (int x : wit.B)
        if (!covered[x]) B.push_back(x);
      if (B.empty()) continue;
      double massB = 0.0;
      for (int x : B) massB += me.lower(x);
      if (massB <= 0.0) continue;

      ConePiece piece;
      piece.pi = wit.pis;
      std::vector<int> W = B;
      bool dropped = false;
      std::vector<LipFn> piL;
      for (const auto& p : wit.pis) piL.emplace_back(space, p);
      for (int i = 0; i < k && !dropped; ++i) {
        std::vector<double> ei(k, 0.0);
        ei[i] = 1.0;
        DirectionSpec dir{piL,
                          ConeField::constant(n, Cone(ei, alpha))};
        std::vector<double> sig(n, delta);
        SpeedSpec sp{piL[i], sig, false};
        std::vector<Fragment> fam;
        for (const auto& g : family)
          for (auto& sub : split_by_spec(g, *space, &dir, &sp))
            fam.push_back(std::move(sub));
        auto rw = rainwater_split(me.lower, W, fam, space, nullptr);
        double massA = 0.0;
        for (int x : rw.A) massA += me.lower(x);
        double needed = 1.0;
        for (int l = 1; l <= i + 1; ++l) needed *= (eta - l * delta);
        piece.peel_ratio.push_back(massB > 0.0 ? massA / massB : 0.0);
        if (massA < needed * massB - 1e-12)
          out.defects.push_back(
              "peeling short of the (eta - i delta) bound on a piece");
        if (rw.A.empty() || massA <= 0.0) {
          dropped = true;
          break;
        }
        piece.axis_reps.push_back(rw.rep);
        W = rw.A;
      }
      if (dropped || W.empty()) continue;
      piece.V = W;

      // All directions coexist on V; restrict the axis reps there so they
      // decompose one common measure.
      Measure muV = me.lower.restrict_to(W);
      for (auto& r : piece.axis_reps) r = restrict_rep(r, W);
      std::vector<Derivation> axis_ds;
      for (int i = 0; i < k; ++i)
        axis_ds.push_back(derivation_of(piece.axis_reps[i],
                                        rep_lipschitz_bound(piece.axis_reps[i]),
                                        muV));
      auto pd = pseudodual_basis(axis_ds, dict, config.eps_pseudodual);

      // Refine into the requested cone: group V by constant cone value.
      std::map<std::pair<std::vector<double>, double>, std::vector<int>> groups;
      for (int x : W)
        groups[{cone.at(x).axis, cone.at(x).alpha}].push_back(x);
      std::vector<AlbertiRep> refined_parts;
      std::vector<std::vector<int>> part_sets;
      for (auto& [key, pts] : groups) {
        for (const auto& sub : pd.pieces) {
          std::vector<int> overlap;
          std::vector<char> inp(n, 0);
          for (int x : pts) inp[x] = 1;
          for (int x : sub.V)
            if (inp[x]) overlap.push_back(x);
          if (overlap.empty()) continue;
          auto cr = cone_refine(me.lower, overlap, sub.d_final, sub.g,
                                key.first, key.second, config.sigma, config);
          refined_parts.push_back(cr.rep);
          part_sets.push_back(overlap);
        }
      }
      if (!refined_parts.empty())
        piece.refined = glue(refined_parts, part_sets);
      DirectionSpec want{piL, cone};
      piece.direction_fraction = check_direction(piece.refined, want).fraction;

      for (int x : piece.V) covered[x] = 1;
      out.pieces.push_back(std::move(piece));
      progress = true;
    }
    double uncovered = 0.0;
    for (int x = 0; x < n; ++x)
      if (!covered[x]) uncovered += me.lower(x);
    if (uncovered <= config.mass_tol * total_mass) break;
    if (!progress) {
      out.defects.push_back("exhaustion stalled with uncovered mass");
      break;
    }
  }

  double uncovered = 0.0;
  for (int x = 0; x < n; ++x)
    if (!covered[x]) uncovered += me.lower(x);
  out.coverage_defect = uncovered / total_mass;
  return out;
}

double rep_lipschitz_bound(const AlbertiRep& rep) {
  double L = 0.0;
  for (std::size_t g = 0; g < rep.fragments.size(); ++g)
    for (int e = 0; e < rep.fragments[g].edges(); ++e)
      if (rep.P[g] * rep.nu[g][e] > 0.0)
        L = std::max(L, rep.fragments[g].edge_md(e, *rep.space));
  return L;
}

Derivation derivation_of(const AlbertiRep& rep, double C) {
  return derivation_of(rep, C, rep.pushforward());
}

Derivation derivation_of(const AlbertiRep& rep, double C, const Measure& mu) {
  auto push = rep.pushforward();
  for (int x = 0; x < mu.size(); ++x)
    if (std::abs(push(x) - mu(x)) > 1e-9 * std::max(1.0, mu.total()))
      fail_precondition(
          "derivation_of: representation does not decompose the measure");
  std::vector<CarrierPiece> carrier;
  for (std::size_t g = 0; g < rep.fragments.size(); ++g) {
    CarrierPiece p;
    p.fragment = rep.fragments[g];
    p.P = rep.P[g];
    p.nu = rep.nu[g];
    carrier.push_back(std::move(p));
  }
  Derivation D(rep.space, mu, std::move(carrier));
  auto loc = local_norm(D);
  for (double v : loc)
    if (v > C + 1e-9)
      fail_tolerance("derivation_of: local norm exceeds the biLipschitz "
                     "bound " + std::to_string(C));
  return D;
}

}  // namespace mct
