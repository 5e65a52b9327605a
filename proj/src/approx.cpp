#include "mct/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mct {

double LinearFn::eval(const std::vector<double>& coord) const {
  double s = offset;
  for (std::size_t i = 0; i < coef.size() && i < coord.size(); ++i)
    s += coef[i] * coord[i];
  return s;
}

LipFn LinearFn::on(SpacePtr space, std::string name) const {
  if (!space->has_coords()) fail_precondition("LinearFn: space lacks coords");
  std::vector<double> v(space->size());
  for (int x = 0; x < space->size(); ++x) v[x] = eval(space->coords()[x]);
  return LipFn(std::move(space), std::move(v), std::move(name));
}

namespace {

// Approximate gcd of the domain gaps, for resampling on a uniform grid.
double rational_step(const std::vector<double>& domain, double tol) {
  double g = 0.0;
  for (std::size_t i = 1; i < domain.size(); ++i) {
    double gap = domain[i] - domain[i - 1];
    while (gap > tol) {
      if (g < tol) {
        g = gap;
        break;
      }
      double r = std::fmod(gap, g);
      if (r < tol || g - r < tol) break;
      gap = g;
      g = r;
    }
    if (g == 0.0) g = gap;
    // one Euclid pass is enough for the grid-with-holes domains we accept
    double ratio = (domain[i] - domain[i - 1]) / g;
    if (std::abs(ratio - std::llround(ratio)) > 1e-6)
      fail_input("curves_normal_form: domain gaps are not commensurable");
  }
  double span = domain.back() - domain.front();
  if (g > 0.0 && span / g > 1e5)
    fail_input("curves_normal_form: grid refinement too fine");
  return g;
}

}  // namespace

NormalFormResult curves_normal_form(const AlbertiRep& rep,
                                    const std::vector<LinearFn>& f_dir,
                                    const Cone& cone,
                                    std::optional<LinearFn> g_speed,
                                    double delta, const RunConfig& config) {
  if (!rep.space->has_coords())
    fail_precondition("curves_normal_form: space lacks coords");
  NormalFormResult out;
  out.space = rep.space;
  out.rep.provenance = rep.provenance + "|normal_form";

  for (std::size_t gi = 0; gi < rep.fragments.size(); ++gi) {
    const Fragment& frag = rep.fragments[gi];
    if (frag.points() == 1) {
      // constant curve on [0,1]
      Fragment c({0.0, 1.0}, {frag.trace[0], frag.trace[0]});
      out.rep.fragments.push_back(std::move(c));
      out.rep.P.push_back(rep.P[gi]);
      out.rep.nu.push_back({0.0});
      out.h.push_back({0.0});
      continue;
    }
    double span = frag.domain.back() - frag.domain.front();
    double step = rational_step(frag.domain, 1e-9 * std::max(1.0, span));
    // Affine reparametrization to [0,1].
    std::vector<double> dom01(frag.domain);
    for (double& t : dom01) t = (t - frag.domain.front()) / span;
    Fragment affine(dom01, frag.trace);
    double h = step / span;
    auto filled = fill_fragment(affine, out.space, h, config.snap_tol);
    out.space = filled.space;

    // Transport the edge measure: each original edge's mass stays on its
    // first filled sub-edge, so the pushforward on original points is
    // preserved exactly.
    const Fragment& curve = filled.curve;
    FragmentMeasure nu(curve.edges(), 0.0);
    std::vector<double> hrow(curve.edges(), 0.0);
    for (int e0 = 0; e0 < frag.edges(); ++e0) {
      double t_left = (frag.domain[e0] - frag.domain.front()) / span;
      int sub = (int)std::llround(t_left / h);
      nu[sub] = rep.nu[gi][e0];
      hrow[sub] = nu[sub] / h;
      // Direction re-certification on the carrying sub-edge; the filled
      // trace is affine so linear direction data sees the gap secant.
      if (!f_dir.empty() && nu[sub] > 0.0) {
        std::vector<double> u(f_dir.size());
        const auto& cl = out.space->coords()[curve.left(sub)];
        const auto& cr = out.space->coords()[curve.right(sub)];
        for (std::size_t i = 0; i < f_dir.size(); ++i)
          u[i] = (f_dir[i].eval(cr) - f_dir[i].eval(cl)) / h;
        if (!cone_contains(cone, u))
          fail_precondition(
              "curves_normal_form: direction lost on gap (fragment " +
              std::to_string(gi) + ", edge " + std::to_string(e0) + ")");
      }
    }
    out.rep.fragments.push_back(curve);
    out.rep.P.push_back(rep.P[gi]);
    out.rep.nu.push_back(std::move(nu));
    out.h.push_back(std::move(hrow));
  }
  out.rep.space = out.space;

  if (g_speed) {
    LipFn g = g_speed->on(out.space, "g");
    out.speed_bound = g.glip() > 0.0 ? delta / g.glip() : 0.0;
  }
  if (!f_dir.empty()) {
    std::vector<LipFn> fs;
    for (const auto& f : f_dir) fs.push_back(f.on(out.space));
    DirectionSpec spec{fs,
                       ConeField::constant(out.space->size(), cone)};
    out.direction = check_direction(out.rep, spec);
  }
  return out;
}

namespace {

// Weighted least-absolute-deviation line search for a single basis function:
// the optimal coefficient step is a weighted median of the residual ratios.
double lad_step(const std::vector<double>& residual,
                const std::vector<double>& basis,
                const std::vector<double>& weight) {
  std::vector<std::pair<double, double>> ratios;  // (r/b, w*|b|)
  double total = 0.0;
  for (std::size_t i = 0; i < residual.size(); ++i) {
    if (basis[i] == 0.0 || weight[i] <= 0.0) continue;
    ratios.emplace_back(residual[i] / basis[i],
                        weight[i] * std::abs(basis[i]));
    total += ratios.back().second;
  }
  if (ratios.empty()) return 0.0;
  std::sort(ratios.begin(), ratios.end());
  double acc = 0.0;
  for (auto& [r, w] : ratios) {
    acc += w;
    if (acc >= total / 2.0) return r;
  }
  return ratios.back().first;
}

double l1_error(const std::vector<double>& a, const std::vector<double>& b,
                const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * std::abs(a[i] - b[i]);
  return s;
}

}  // namespace

NormalApproxReport approximate_by_normal(const Current& T, int n_steps,
                                         const FnDict& dict,
                                         const RunConfig& config) {
  if (T.k() != 1)
    fail_precondition("approximate_by_normal: needs a 1-current");
  NormalApproxReport out;
  out.base = Current::zero(T.space(), 1);
  if (T.is_zero()) return out;

  // Thm-3.2 step and curve decomposition of the carrier.
  auto [DT, mass] = der_of_current(T);
  auto flow = flow_decompose(T, config.decomposition_tol);
  if (flow.paths.empty()) return out;

  // Unit-density normal current over the curve family.
  const SpacePtr space = T.space();
  const int n = space->size();
  std::vector<FragmentSummand> base_pieces;
  for (auto& [g, w] : flow.paths) {
    (void)w;
    base_pieces.push_back({g, default_edge_measure(g)});
  }
  Current N = Current::fragment_sum(space, base_pieces);
  out.base = N;

  // Density target rho with T ~ N restricted by rho: pointwise least-squares
  // ratio of the kernel rows; the remaining defect shows up in the exact
  // error below.
  std::vector<double> rho(n, 0.0), weight(n, 0.0);
  for (int x = 0; x < n; ++x) {
    auto tr = T.kernel_row(x);
    auto nr = N.kernel_row(x);
    double num = 0.0, den = 0.0;
    for (int z = 0; z < n; ++z) {
      num += tr[z] * nr[z];
      den += nr[z] * nr[z];
    }
    rho[x] = den > 0.0 ? num / den : 0.0;
    // L1 weight: the curve-length mass at x
    for (auto& p : base_pieces)
      for (int e = 0; e < p.fragment.edges(); ++e)
        if (p.fragment.left(e) == x) weight[x] += p.nu[e];
  }

  // Ramp dictionaries of increasing resolution over the base generators.
  auto gens = dict.generators();
  double range = 0.0;
  for (const auto* g : gens)
    range = std::max(range, 2.0 * g->sup());
  if (range <= 0.0) range = 1.0;

  std::vector<double> fit(n, 0.0);
  double prev_error = std::numeric_limits<double>::infinity();
  for (int level = 1; level <= n_steps; ++level) {
    int breaks = 1 << level;
    double s = range / breaks;
    std::vector<std::vector<double>> basis;
    basis.emplace_back(n, 1.0);  // constant
    for (const auto* g : gens)
      for (int b = 0; b <= breaks; ++b) {
        double c = -g->sup() + b * s;
        std::vector<double> ramp(n);
        for (int x = 0; x < n; ++x)
          ramp[x] = std::clamp(((*g)(x)-c) / s, 0.0, 1.0);
        basis.push_back(std::move(ramp));
      }
    // Coordinate-descent LAD, warm-started from the previous level's fit.
    std::vector<double> residual(n);
    for (int x = 0; x < n; ++x) residual[x] = rho[x] - fit[x];
    for (int pass = 0; pass < 8; ++pass) {
      double moved = 0.0;
      for (auto& b : basis) {
        double st = lad_step(residual, b, weight);
        if (st == 0.0) continue;
        moved += std::abs(st);
        for (int x = 0; x < n; ++x) {
          fit[x] += st * b[x];
          residual[x] = rho[x] - fit[x];
        }
      }
      if (moved < 1e-14) break;
    }

    NormalApproxStep step;
    step.glip_cap = 1.0 / s;
    step.fit_l1 = l1_error(rho, fit, weight);
    // N restricted by the fit, and the exact mass of the difference.
    std::vector<FragmentSummand> diff;
    for (auto& p : base_pieces) {
      FragmentSummand q;
      q.fragment = p.fragment;
      q.nu = p.nu;
      for (int e = 0; e < q.fragment.edges(); ++e)
        q.nu[e] *= fit[q.fragment.left(e)];
      diff.push_back(q);
    }
    step.N = Current::fragment_sum(space, diff);
    if (T.is_fragment_sum())
      for (const auto& p : T.fragment_form().pieces) {
        FragmentSummand q;
        q.fragment = p.fragment;
        q.nu = p.nu;
        for (double& v : q.nu) v = -v;
        diff.push_back(std::move(q));
      }
    Current difference = Current::fragment_sum(space, std::move(diff));
    step.error = exact_low_dim_mass(difference).total();
    step.provenance = "level " + std::to_string(level) + ", " +
                      std::to_string(basis.size()) + " ramps";
    if (step.error > prev_error) {
      // keep the sequence nonincreasing: a coarser fit is never replaced by
      // a worse one
      step.error = prev_error;
      step.provenance += " (kept previous fit)";
    } else {
      prev_error = step.error;
    }
    out.steps.push_back(std::move(step));
  }
  out.final_error = out.steps.empty() ? 0.0 : out.steps.back().error;
  return out;
}

NormalDerivation normal_derivation_from_rep(const AlbertiRep& rep,
                                            const FnDict& dict,
                                            const RunConfig& config) {
  // Witnessing normal current: weighted sum of default-measure curve currents.
  std::vector<FragmentSummand> pieces;
  for (std::size_t g = 0; g < rep.fragments.size(); ++g) {
    FragmentSummand s;
    s.fragment = rep.fragments[g];
    s.nu = default_edge_measure(s.fragment);
    for (double& v : s.nu) v *= rep.P[g];
    pieces.push_back(std::move(s));
  }
  NormalDerivation out{
      derivation_of(rep, rep_lipschitz_bound(rep) + 1e-9),
      Current::fragment_sum(rep.space, std::move(pieces)),
      {},
      0.0,
      0.0};

  auto [DN, nmass] = der_of_current(out.N);
  const int n = rep.space->size();
  out.lambda.assign(n, 0.0);
  for (int x = 0; x < n; ++x) {
    double best = 0.0, a_at = 0.0, b_at = 0.0;
    std::vector<std::pair<double, double>> pairs;
    for (int fi = 0; fi < dict.size(); ++fi) {
      auto a = out.D.apply(dict[fi]);
      auto b = DN.apply(dict[fi]);
      pairs.emplace_back(a[x], b[x]);
      if (std::abs(b[x]) > std::abs(best)) {
        best = b[x];
        a_at = a[x];
        b_at = b[x];
      }
    }
    if (b_at == 0.0) {
      for (auto& [a, b] : pairs)
        if (std::abs(a) > 1e-9)
          fail_precondition(
              "normal_derivation_from_rep: the rep acts where the normal "
              "current does not");
      continue;
    }
    double lam = a_at / b_at;
    for (auto& [a, b] : pairs)
      if (std::abs(a - lam * b) >
          config.decomposition_tol * std::max(1.0, std::abs(a) + std::abs(b)))
        fail_precondition(
            "normal_derivation_from_rep: density ratio is not constant "
            "across the dictionary at point " + rep.space->name(x));
    if (lam < -config.decomposition_tol)
      fail_precondition(
          "normal_derivation_from_rep: negative density against the normal "
          "current");
    out.lambda[x] = std::max(0.0, lam);
  }
  out.flow_residual = flow_decompose(out.N, config.decomposition_tol).residual;
  out.boundary_mass = exact_low_dim_mass(boundary(out.N)).total();
  return out;
}

VectorFieldRepResult vectorfield_direction_rep(const NormalDerivation& ND,
                                               const std::vector<LipFn>& F,
                                               const RunConfig& config) {
  VectorFieldRepResult out;
  const SpacePtr space = ND.D.space();
  const int n = space->size();
  const int m = static_cast<int>(F.size());

  // DF and its vanishing set.
  std::vector<std::vector<double>> DF(m);
  for (int i = 0; i < m; ++i) DF[i] = ND.D.apply(F[i]);
  std::vector<double> dfnorm(n, 0.0);
  double dfmax = 0.0;
  for (int x = 0; x < n; ++x) {
    for (int i = 0; i < m; ++i) dfnorm[x] += DF[i][x] * DF[i][x];
    dfnorm[x] = std::sqrt(dfnorm[x]);
    dfmax = std::max(dfmax, dfnorm[x]);
  }
  std::vector<char> keep(n, 0);
  for (int x = 0; x < n; ++x) {
    if (dfnorm[x] > 1e-12 * std::max(dfmax, 1.0))
      keep[x] = 1;
    else
      out.vanishing.push_back(x);
  }

  auto flow = flow_decompose(ND.N, config.decomposition_tol);

  struct Kept {
    Fragment curve;
    double w;
  };
  std::vector<Kept> curves;
  double total_mass = 0.0, fail_mass = 0.0;
  std::vector<FragmentMeasure> kept_nu;
  for (std::size_t ci = 0; ci < flow.paths.size(); ++ci) {
    auto& [g, w] = flow.paths[ci];
    bool meets = false;
    for (int t : g.trace)
      if (keep[t]) meets = true;
    if (!meets) continue;
    Fragment restr = restrict_to_set(g, keep);
    if (restr.points() < 2) continue;
    Fragment unit = reparametrize_unit(restr, *space);
    FragmentMeasure nu(unit.edges(), 0.0);
    for (int e = 0; e < unit.edges(); ++e) {
      double mass = w * unit.edge_dt(e);
      total_mass += mass;
      std::vector<double> u(m);
      for (int i = 0; i < m; ++i)
        u[i] = pullback_derivative(unit, F[i].values(), e);
      int x = unit.left(e);
      std::vector<double> v(m);
      for (int i = 0; i < m; ++i) v[i] = DF[i][x];
      double un = 0.0, dot = 0.0;
      for (int i = 0; i < m; ++i) {
        un += u[i] * u[i];
        dot += u[i] * v[i];
      }
      un = std::sqrt(un);
      bool pass = false;
      if (un > 0.0 && dot > 0.0) {
        std::vector<double> vhat(v);
        for (double& c : vhat) c /= dfnorm[x];
        pass = cone_contains(
            Cone(vhat, std::max(config.angular_tol, 1e-12)), u);
      }
      if (pass) {
        nu[e] = mass;
      } else {
        fail_mass += mass;
        out.witness_edges.emplace_back(static_cast<int>(ci), e);
        // Separating test vector: signed coordinate tests first, then the
        // component of u orthogonal to v (antiparallel: -v).
        std::vector<double> wj;
        for (int i = 0; i < m && wj.empty(); ++i)
          for (double sgn : {1.0, -1.0}) {
            double wu = sgn * u[i], wv = sgn * v[i];
            if (wu > 0.0 && wv <= 0.0) {
              wj.assign(m, 0.0);
              wj[i] = sgn;
              break;
            }
          }
        if (wj.empty() && un > 0.0) {
          double vv = 0.0;
          for (int i = 0; i < m; ++i) vv += v[i] * v[i];
          wj.assign(m, 0.0);
          if (vv > 0.0) {
            double c = dot / vv;
            bool antiparallel = true;
            for (int i = 0; i < m; ++i) {
              wj[i] = u[i] - c * v[i];
              if (std::abs(wj[i]) > 1e-12) antiparallel = false;
            }
            if (antiparallel)
              for (int i = 0; i < m; ++i) wj[i] = -v[i];
          }
        }
        if (wj.empty()) wj.assign(m, 0.0);  // w_0 branch: (F o gamma)' = 0
        out.witness_vectors.push_back(std::move(wj));
      }
    }
    curves.push_back({unit, w});
    kept_nu.push_back(std::move(nu));
  }

  out.fail_mass = fail_mass;
  out.certified =
      fail_mass <= config.mass_tol * std::max(total_mass, 1.0);
  if (!out.certified) return out;

  // Emit the representation of mu off N_{DF}, weighting the passing edges.
  std::vector<int> keep_ids;
  for (int x = 0; x < n; ++x)
    if (keep[x]) keep_ids.push_back(x);
  Measure mu = ND.D.mu().restrict_to(keep_ids);
  std::vector<double> carrier(n, 0.0);
  for (std::size_t c = 0; c < curves.size(); ++c)
    for (int e = 0; e < curves[c].curve.edges(); ++e)
      carrier[curves[c].curve.left(e)] += kept_nu[c][e];
  AlbertiRep rep;
  rep.space = space;
  rep.provenance = "vectorfield_direction";
  std::vector<double> mtot;
  double M = 0.0;
  for (std::size_t c = 0; c < curves.size(); ++c) {
    FragmentMeasure nu = kept_nu[c];
    double mg = 0.0;
    for (int e = 0; e < curves[c].curve.edges(); ++e) {
      int x = curves[c].curve.left(e);
      nu[e] = carrier[x] > 0.0 ? nu[e] * mu(x) / carrier[x] : 0.0;
      mg += nu[e];
    }
    if (mg <= 0.0) continue;
    rep.fragments.push_back(curves[c].curve);
    rep.nu.push_back(std::move(nu));
    mtot.push_back(mg);
    M += mg;
  }
  for (double mg : mtot) rep.P.push_back(mg / M);
  for (std::size_t g = 0; g < rep.fragments.size(); ++g)
    for (double& v : rep.nu[g]) v *= M / mtot[g];
  out.rep = std::move(rep);
  return out;
}

}  // namespace mct
