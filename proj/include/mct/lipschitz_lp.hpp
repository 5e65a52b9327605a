#pragma once

#include <vector>

#include "mct/space.hpp"

namespace mct {

/// Solution of max { sum_i c_i f_i : |f_p - f_q| <= dist(p,q) for all pairs }.
/// The objective must be balanced (sum c = 0; every derivation/current
/// coefficient vector is, since constants are annihilated). `optimizer` is a
/// feasible function attaining `value`.
struct LipschitzLpResult {
  double value = 0.0;
  std::vector<double> optimizer;
};

/// Maximizes a balanced linear functional over the 1-Lipschitz polytope of a
/// finite metric. This is the Kantorovich dual of the transportation problem
/// between the positive and negative parts of c, solved exactly by successive
/// shortest paths with potentials; the optimal potentials give the maximizing
/// 1-Lipschitz function. O(n^3) worst case.
LipschitzLpResult maximize_over_lipschitz(
    const std::vector<double>& c, const std::vector<std::vector<double>>& dist);

}  // namespace mct
