#include "mct/derivation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mct {

Derivation::Derivation(SpacePtr space, Measure mu,
                       std::vector<CarrierPiece> carrier)
    : space_(std::move(space)), mu_(std::move(mu)), carrier_(std::move(carrier)) {
  if (mu_.size() != space_->size())
    fail_input("Derivation: measure size mismatch");
  for (const auto& p : carrier_) {
    if (p.P < 0.0) fail_input("Derivation: negative fragment weight");
    if ((int)p.nu.size() != p.fragment.edges())
      fail_input("Derivation: nu must have one weight per edge");
    for (int e = 0; e < p.fragment.edges(); ++e)
      if (p.P * std::abs(p.nu[e]) > 0.0 && mu_(p.fragment.left(e)) <= 0.0)
        fail_precondition(
            "Derivation: carrier mass lands where the reference measure "
            "vanishes (point " + space_->name(p.fragment.left(e)) + ")");
  }
}

std::vector<double> Derivation::apply(const std::vector<double>& f) const {
  if ((int)f.size() != space_->size())
    fail_input("Derivation::apply: f must be defined on all points");
  std::vector<double> out(space_->size(), 0.0);
  for (const auto& p : carrier_) {
    if (p.P == 0.0) continue;
    for (int e = 0; e < p.fragment.edges(); ++e) {
      if (p.nu[e] == 0.0) continue;
      int x = p.fragment.left(e);
      out[x] += p.P * p.nu[e] * (f[p.fragment.right(e)] - f[x]) /
                p.fragment.edge_dt(e);
    }
  }
  for (int x = 0; x < space_->size(); ++x)
    out[x] = mu_(x) > 0.0 ? out[x] / mu_(x) : 0.0;
  return out;
}

std::vector<std::vector<double>> Derivation::kernel() const {
  const int n = space_->size();
  std::vector<std::vector<double>> K(n, std::vector<double>(n, 0.0));
  for (const auto& p : carrier_) {
    if (p.P == 0.0) continue;
    for (int e = 0; e < p.fragment.edges(); ++e) {
      if (p.nu[e] == 0.0) continue;
      int x = p.fragment.left(e), y = p.fragment.right(e);
      double w = p.P * p.nu[e] / p.fragment.edge_dt(e) / mu_(x);
      K[x][y] += w;
      K[x][x] -= w;
    }
  }
  return K;
}

std::vector<std::vector<double>> Derivation::apply_tuple(
    const std::vector<const LipFn*>& fs) const {
  std::vector<std::vector<double>> rows;
  rows.reserve(fs.size());
  for (const auto* f : fs) rows.push_back(apply(f->values()));
  return rows;
}

std::vector<double> local_norm(const Derivation& D) {
  return local_norm(D, D.space()->dist_matrix());
}

std::vector<double> local_norm(const Derivation& D,
                               const std::vector<std::vector<double>>& dist) {
  auto K = D.kernel();
  const int n = D.space()->size();
  std::vector<double> out(n, 0.0);
  for (int x = 0; x < n; ++x) {
    bool zero = true;
    for (double v : K[x])
      if (v != 0.0) zero = false;
    if (zero) continue;
    out[x] = maximize_over_lipschitz(K[x], dist).value;
  }
  return out;
}

double global_norm(const Derivation& D) {
  auto loc = local_norm(D);
  double m = 0.0;
  for (double v : loc) m = std::max(m, v);
  return m;
}

std::vector<char> vanishing_set(const std::vector<double>& loc,
                                double rel_tol) {
  double m = 0.0;
  for (double v : loc) m = std::max(m, v);
  std::vector<char> out(loc.size(), 0);
  for (std::size_t i = 0; i < loc.size(); ++i)
    if (loc[i] <= rel_tol * m) out[i] = 1;
  return out;
}

Derivation module_scale(const std::vector<double>& lambda,
                        const Derivation& D) {
  std::vector<CarrierPiece> carrier = D.carrier();
  for (auto& p : carrier)
    for (int e = 0; e < p.fragment.edges(); ++e)
      p.nu[e] *= lambda[p.fragment.left(e)];
  return Derivation(D.space(), D.mu(), std::move(carrier));
}

Derivation add(const Derivation& a, const Derivation& b) {
  if (a.space() != b.space())
    fail_input("Derivation add: different spaces");
  if (a.mu().weights() != b.mu().weights())
    fail_input("Derivation add: different reference measures");
  std::vector<CarrierPiece> carrier = a.carrier();
  carrier.insert(carrier.end(), b.carrier().begin(), b.carrier().end());
  return Derivation(a.space(), a.mu(), std::move(carrier));
}

Derivation scale(double c, const Derivation& D) {
  std::vector<CarrierPiece> carrier = D.carrier();
  for (auto& p : carrier)
    for (double& w : p.nu) w *= c;
  return Derivation(D.space(), D.mu(), std::move(carrier));
}

Derivation normalize(const Derivation& D) {
  auto loc = local_norm(D);
  auto nul = vanishing_set(loc);
  std::vector<double> lambda(loc.size(), 0.0);
  for (std::size_t x = 0; x < loc.size(); ++x)
    if (!nul[x]) lambda[x] = 1.0 / loc[x];
  return module_scale(lambda, D);
}

double PointMap::lip(const MetricSpace& X) const {
  double L = 0.0;
  for (int p = 0; p < X.size(); ++p)
    for (int q = p + 1; q < X.size(); ++q)
      L = std::max(L, target->dist(image[p], image[q]) / X.dist(p, q));
  return L;
}

Derivation pushforward(const PointMap& F, const Derivation& D,
                       double declared_lip) {
  const MetricSpace& X = *D.space();
  if ((int)F.image.size() != X.size())
    fail_input("pushforward: map must be defined on all points");
  if (declared_lip >= 0.0) {
    for (int p = 0; p < X.size(); ++p)
      for (int q = p + 1; q < X.size(); ++q)
        if (F.target->dist(F.image[p], F.image[q]) >
            declared_lip * X.dist(p, q) + 1e-12)
          fail_precondition("pushforward: map is not " +
                            std::to_string(declared_lip) +
                            "-Lipschitz at pair (" + X.name(p) + "," +
                            X.name(q) + ")");
  }
  std::vector<double> w(F.target->size(), 0.0);
  for (int p = 0; p < X.size(); ++p) w[F.image[p]] += D.mu()(p);
  std::vector<CarrierPiece> carrier;
  for (const auto& pc : D.carrier()) {
    CarrierPiece q;
    q.P = pc.P;
    std::vector<int> tr(pc.fragment.trace);
    for (int& t : tr) t = F.image[t];
    q.fragment = Fragment(pc.fragment.domain, std::move(tr));
    q.nu = pc.nu;
    for (int e = 0; e < q.fragment.edges(); ++e)
      if (q.fragment.left(e) == q.fragment.right(e)) q.nu[e] = 0.0;
    carrier.push_back(std::move(q));
  }
  return Derivation(F.target, Measure(std::move(w)), std::move(carrier));
}

double pushforward_identity_defect(const PointMap& F, const Derivation& D,
                                   const Derivation& FD, const FnDict& Ydict) {
  double worst = 0.0;
  const int nX = D.space()->size();
  for (int fi = 0; fi < Ydict.size(); ++fi)
    for (int gi = 0; gi < Ydict.size(); ++gi) {
      const auto& f = Ydict[fi];
      const auto& g = Ydict[gi];
      auto Ff = FD.apply(f);
      double lhs = 0.0;
      for (int y = 0; y < FD.space()->size(); ++y)
        lhs += g(y) * Ff[y] * FD.mu()(y);
      std::vector<double> fF(nX), gF(nX);
      for (int x = 0; x < nX; ++x) fF[x] = f(F.image[x]), gF[x] = g(F.image[x]);
      auto DfF = D.apply(fF);
      double rhs = 0.0;
      for (int x = 0; x < nX; ++x) rhs += gF[x] * DfF[x] * D.mu()(x);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  return worst;
}

namespace {

struct SweepState {
  std::vector<int> V;
  std::vector<Derivation> tilde;
  std::vector<LipFn> g;
};

double mass_of(const std::vector<int>& pts, const Measure& mu) {
  double s = 0.0;
  for (int x : pts) s += mu(x);
  return s;
}

}  // namespace

PseudodualResult pseudodual_basis(const std::vector<Derivation>& Ds,
                                  const FnDict& dict, double eps) {
  if (Ds.empty()) fail_input("pseudodual_basis: no derivations given");
  if (!(eps > 0.0 && eps < 1.0))
    fail_input("pseudodual_basis: eps must lie in (0,1)");
  const int k = static_cast<int>(Ds.size());
  const Measure& mu = Ds.front().mu();
  const SpacePtr& space = Ds.front().space();

  PseudodualResult result;
  result.eps = eps;
  result.norm_bound = std::tgamma(k + 1.0) * std::pow(1.0 - eps, -k);

  auto generators = dict.generators();

  // Exhausts W by generators whose normalized action reaches 1-eps; returns
  // (sub-piece, generator index) pairs. Throws if a positive-mass set
  // survives the whole dictionary.
  auto exhaust = [&](const Derivation& unit, const std::vector<int>& W)
      -> std::vector<std::pair<std::vector<int>, int>> {
    std::vector<std::pair<std::vector<int>, int>> out;
    std::vector<int> remaining = W;
    while (!remaining.empty()) {
      int best_gen = -1;
      std::vector<int> best_set;
      double best_mass = 0.0;
      for (std::size_t gi = 0; gi < generators.size(); ++gi) {
        auto act = unit.apply(*generators[gi]);
        std::vector<int> hit;
        for (int x : remaining)
          if (act[x] >= 1.0 - eps - 1e-12) hit.push_back(x);
        double m = mass_of(hit, mu);
        if (m > best_mass + 1e-15) {
          best_mass = m;
          best_set = std::move(hit);
          best_gen = static_cast<int>(gi);
        }
      }
      if (best_gen < 0 || best_set.empty()) {
        if (mass_of(remaining, mu) > 0.0) throw DependentDerivations(remaining);
        break;  // leftover has zero mass
      }
      std::vector<int> rest;
      std::vector<char> taken(space->size(), 0);
      for (int x : best_set) taken[x] = 1;
      for (int x : remaining)
        if (!taken[x]) rest.push_back(x);
      out.emplace_back(std::move(best_set), best_gen);
      remaining = std::move(rest);
    }
    return out;
  };

  std::vector<SweepState> work;
  {
    SweepState root;
    root.V = mu.support();
    work.push_back(std::move(root));
  }

  for (int level = 0; level < k; ++level) {
    std::vector<SweepState> next;
    for (auto& st : work) {
      std::vector<char> inV(space->size(), 0);
      for (int x : st.V) inV[x] = 1;

      // Triangular sweep of D_{level} against the established tilde's.
      Derivation swept = Ds[level];
      for (int j = 0; j < level; ++j) {
        auto num = swept.apply(st.g[j]);
        auto den = st.tilde[j].apply(st.g[j]);
        std::vector<double> coef(space->size(), 0.0);
        for (int x : st.V)
          if (std::abs(den[x]) > 1e-12) coef[x] = num[x] / den[x];
        swept = add(swept, module_scale(coef, scale(-1.0, st.tilde[j])));
      }
      std::vector<double> chi(space->size(), 0.0);
      for (int x : st.V) chi[x] = 1.0;
      swept = module_scale(chi, swept);
      Derivation unit = normalize(swept);

      for (auto& [piece, gi] : exhaust(unit, st.V)) {
        SweepState child;
        child.V = piece;
        std::vector<double> chi_piece(space->size(), 0.0);
        for (int x : piece) chi_piece[x] = 1.0;
        child.tilde.reserve(level + 1);
        for (const auto& t : st.tilde)
          child.tilde.push_back(module_scale(chi_piece, t));
        child.tilde.push_back(module_scale(chi_piece, unit));
        child.g = st.g;
        child.g.push_back(*generators[gi]);
        next.push_back(std::move(child));
      }
    }
    work = std::move(next);
  }

  // Pointwise inversion of the triangular matrices.
  for (auto& st : work) {
    PseudodualPiece piece;
    piece.V = st.V;
    piece.d_tilde = st.tilde;
    piece.g = st.g;
    std::vector<std::vector<double>> act(k);  // act[i] = tilde_i applied to g_j
    std::vector<std::vector<std::vector<double>>> table(k);
    for (int i = 0; i < k; ++i) {
      table[i].resize(k);
      for (int j = 0; j < k; ++j) table[i][j] = st.tilde[i].apply(st.g[j]);
    }
    // Coefficient functions of the inverse, per final derivation.
    std::vector<std::vector<double>> inv_coef(
        k, std::vector<double>(k * space->size(), 0.0));
    piece.M.resize(st.V.size());
    piece.det.resize(st.V.size());
    Eigen::MatrixXd M(k, k);
    for (std::size_t vi = 0; vi < st.V.size(); ++vi) {
      int x = st.V[vi];
      piece.M[vi].resize(k * k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          M(i, j) = table[i][j][x];
          piece.M[vi][i * k + j] = M(i, j);
        }
      piece.det[vi] = M.determinant();
      Eigen::MatrixXd Minv = M.inverse();
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          inv_coef[i][j * space->size() + x] = Minv(i, j);
    }
    for (int i = 0; i < k; ++i) {
      Derivation acc = module_scale(
          std::vector<double>(inv_coef[i].begin(),
                              inv_coef[i].begin() + space->size()),
          st.tilde[0]);
      for (int j = 1; j < k; ++j) {
        std::vector<double> coef(inv_coef[i].begin() + j * space->size(),
                                 inv_coef[i].begin() + (j + 1) * space->size());
        acc = add(acc, module_scale(coef, st.tilde[j]));
      }
      piece.d_final.push_back(std::move(acc));
    }
    result.pieces.push_back(std::move(piece));
  }
  return result;
}

std::vector<double> chain_rule(
    const Derivation& D,
    const std::function<std::vector<double>(const std::vector<double>&)>& grad,
    const std::vector<const LipFn*>& psis) {
  const int n = D.space()->size();
  const int k = static_cast<int>(psis.size());
  std::vector<std::vector<double>> dpsi;
  dpsi.reserve(k);
  for (const auto* p : psis) dpsi.push_back(D.apply(*p));
  std::vector<double> out(n, 0.0);
  std::vector<double> y(k);
  for (int x = 0; x < n; ++x) {
    for (int l = 0; l < k; ++l) y[l] = (*psis[l])(x);
    auto gr = grad(y);
    for (int l = 0; l < k; ++l) out[x] += gr[l] * dpsi[l][x];
  }
  return out;
}

}  // namespace mct
