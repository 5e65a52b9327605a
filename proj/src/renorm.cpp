#include "mct/renorm.hpp"

#include <algorithm>
#include <cmath>

namespace mct {

namespace {
const double kPiOverSqrt6 = M_PI / std::sqrt(6.0);
}

int GeneratingSet::effective_M() const {
  return std::min(M, dict->size());
}

std::vector<std::vector<double>> psi_pseudometric(const GeneratingSet& gen) {
  if (gen.M < 1) fail_input("psi_pseudometric: M must be >= 1");
  const MetricSpace& X = *gen.dict->space();
  const int n = X.size();
  const int M = gen.effective_M();
  std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      double s = 0.0;
      for (int m = 1; m < M; ++m) {  // entry 0 is the constant, n = m+1
        double diff = (*gen.dict)[m](x) - (*gen.dict)[m](y);
        double nn = static_cast<double>(m + 1);
        s += diff * diff / (nn * nn);
      }
      out[x][y] = out[y][x] = std::sqrt(s);
    }
  return out;
}

RenormedSpace renorm_distance(SpacePtr X, const GeneratingSet& gen,
                              double eps) {
  if (eps <= 0.0) fail_input("renorm_distance: eps must be > 0");
  RenormedSpace out;
  out.original = X;
  out.eps = eps;
  out.M = gen.effective_M();
  auto psi = psi_pseudometric(gen);
  const int n = X->size();
  out.d_eps.assign(n, std::vector<double>(n, 0.0));
  const double top = 1.0 + eps * kPiOverSqrt6;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      out.d_eps[x][y] = X->dist(x, y) + eps * psi[x][y];
      if (x != y && (out.d_eps[x][y] < X->dist(x, y) - 1e-15 ||
                     out.d_eps[x][y] > top * X->dist(x, y) + 1e-12)) {
        out.sandwich_ok = false;
        fail_precondition(
            "renorm_distance: sandwich violated (a generator is not "
            "1-Lipschitz) at pair (" + X->name(x) + "," + X->name(y) + ")");
      }
    }
  return out;
}

DPhi dphi(const Derivation& D, const GeneratingSet& gen) {
  const int M = gen.effective_M();
  const int n = D.space()->size();
  DPhi out;
  out.norm.assign(n, 0.0);
  for (int m = 0; m < M; ++m) {
    auto a = D.apply((*gen.dict)[m]);
    double nn = static_cast<double>(m + 1);
    for (int x = 0; x < n; ++x) {
      a[x] /= nn;
      out.norm[x] += a[x] * a[x];
    }
    out.components.push_back(std::move(a));
  }
  for (double& v : out.norm) v = std::sqrt(v);
  return out;
}

RenormedNormReport renormed_local_norm(const Derivation& D,
                                       const RenormedSpace& Xe,
                                       const GeneratingSet& gen) {
  RenormedNormReport out;
  out.lp_value = local_norm(D, Xe.d_eps);
  auto base = local_norm(D);
  auto phi = dphi(D, gen);
  const int n = D.space()->size();
  out.formula_value.resize(n);
  for (int x = 0; x < n; ++x) {
    out.formula_value[x] = base[x] + Xe.eps * phi.norm[x];
    out.identity_gap =
        std::max(out.identity_gap,
                 std::abs(out.formula_value[x] - out.lp_value[x]));
  }
  double gn = global_norm(D);
  double sum_inv_sq = 0.0;
  for (int m = 1; m <= gen.effective_M(); ++m) sum_inv_sq += 1.0 / (double(m) * m);
  double tail = std::max(0.0, M_PI * M_PI / 6.0 - sum_inv_sq);
  out.truncation_slack = Xe.eps * 2.0 * gn * std::sqrt(tail);
  return out;
}

ConvexityWitness strict_convexity_witness(const Derivation& D1,
                                          const Derivation& D2,
                                          const std::vector<int>& U,
                                          const RenormedSpace& Xe,
                                          const GeneratingSet& gen,
                                          double tol) {
  ConvexityWitness out;
  auto l1 = local_norm(D1);
  auto l2 = local_norm(D2);
  Derivation D12 = add(D1, D2);
  auto l12 = local_norm(D12);
  auto p1 = dphi(D1, gen);
  auto p2 = dphi(D2, gen);
  auto p12 = dphi(D12, gen);

  // Additivity of the renormed local norm splits into additivity of the
  // d-part and of the Phi-part (both are subadditive).
  for (int x : U) {
    bool d_add = std::abs(l12[x] - l1[x] - l2[x]) <= tol;
    bool phi_add =
        std::abs(p12.norm[x] - p1.norm[x] - p2.norm[x]) <= tol;
    if (!(d_add && phi_add)) out.violating.push_back(x);
  }
  if (!out.violating.empty()) {
    out.additive = false;
    return out;
  }
  out.additive = true;

  const int n = D1.space()->size();
  out.lambda1.assign(n, 0.0);
  out.lambda2.assign(n, 0.0);
  const int M = gen.effective_M();
  for (int x : U) {
    double n1 = p1.norm[x], n2 = p2.norm[x];
    if (n1 <= n2) {
      out.V1.push_back(x);
      out.lambda1[x] = n2 > 0.0 ? n1 / n2 : 0.0;  // D1 Phi = lambda1 D2 Phi
    } else {
      out.V2.push_back(x);
      out.lambda2[x] = n1 > 0.0 ? n2 / n1 : 0.0;
    }
  }

  // Probe the carrier equality chi_V D_i = lambda_i D_j on the generators.
  for (int m = 0; m < M; ++m) {
    auto a1 = D1.apply((*gen.dict)[m]);
    auto a2 = D2.apply((*gen.dict)[m]);
    for (int x : out.V1)
      out.probe_defect = std::max(
          out.probe_defect, std::abs(a1[x] - out.lambda1[x] * a2[x]));
    for (int x : out.V2)
      out.probe_defect = std::max(
          out.probe_defect, std::abs(a2[x] - out.lambda2[x] * a1[x]));
  }
  if (out.probe_defect > tol)
    fail_tolerance(
        "strict_convexity_witness: carrier equality fails on generator "
        "probes (truncation M too small), defect " +
        std::to_string(out.probe_defect));
  return out;
}

}  // namespace mct
