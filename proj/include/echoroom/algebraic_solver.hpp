#pragma once

// Closed-form recovery of a planar room and trajectory from a (nearly)
// noiseless echo matrix.
//
// In the gauge r_1 = 0, n_1 = (0, 1) the offsets are q_j = d_{1,j} and the
// remaining unknowns satisfy the (N-1)(K-1) bilinear equations
//
//   x_i sin(theta_j) + a_i cos(theta_j) = b_{i,j},
//   a_i = d_{1,1} - d_{i,1},  b_{i,j} = d_{1,j} - d_{i,j},
//
// i.e. B = X N with X the (N-1) x 2 matrix of locations and N the 2 x K matrix
// of unit normals. The solver factors B at rank 2 (B = U V, unique up to an
// invertible G) and fixes G from the unit-norm conditions v_j^T S v_j = 1,
// which are linear in S = G^T G. S is unique exactly when the normals span at
// least three directions and the locations are not collinear; otherwise the
// configuration is ambiguous.

#include <cstddef>
#include <optional>

#include "echoroom/reconstruction.hpp"

namespace echoroom {

/// Counting condition K N >= d K + d N - d (d + 1) / 2.
bool feasibility(int dimension, std::size_t walls, std::size_t points);

struct AlgebraicOptions {
  double residual_tol = 1e-9;  // max-abs echo residual accepted on noiseless input
  /// When positive, the acceptance threshold becomes 10 sigma sqrt(N K).
  double noise_sigma = 0.0;
  /// Relative singular-value threshold for the collinear / parallelogram tests.
  double rank_tol = 1e-8;
};

/// Throws InfeasibleCount, AmbiguousConfiguration, InconsistentData or
/// MaskedInput. The result is gauge-normalized with q_j = d_{1,j}.
Reconstruction solve_noiseless(const EchoMatrix& d, const AlgebraicOptions& opts = {});

/// Same construction without acceptance tests; used as a warm start for noisy
/// data. Returns nullopt when the factorization breaks down.
std::optional<GaugedUnknowns> algebraic_estimate(const EchoMatrix& d);

}  // namespace echoroom
