#pragma once

// Least-squares ("stress") reconstruction of a planar room and trajectory from
// noisy echo distances:
//
//   minimize  sum_{i,j} w_{i,j} (d_{i,j} - q_j + n_j^T r_i)^2,   |n_j| = 1,
//
// over wall offsets q_j, unit normals n_j = (sin theta_j, cos theta_j) and
// locations r_i, in the gauge r_1 = 0, theta_1 = 0.
//
// The cost is bilinear in (normals, locations): with the angles fixed it is an
// ordinary linear least-squares problem in (q, r), and with (q, r) fixed each
// angle is a separate one-dimensional trigonometric problem. Each restart
// alternates the two exact block minimizations and then polishes all free
// coordinates jointly with Levenberg-Marquardt. Restarts are independent and
// seeded per index, so results do not depend on the worker count.

#include <cstdint>
#include <optional>
#include <random>

#include "echoroom/reconstruction.hpp"
#include "echoroom/random.hpp"

namespace echoroom {

struct StressProblem {
  EchoMatrix measurements;
  Matrix weights;  // N x K, nonnegative; empty means all ones

  explicit StressProblem(EchoMatrix d, Matrix w = {});
};

struct SolverOptions {
  int restarts = 50;
  int max_iters = 500;
  double grad_tol = 1e-10;
  double cost_tol = 1e-14;
  /// Alternation hands over to the joint polish once a sweep lowers the cost
  /// by less than this fraction (or by less than cost_tol).
  double alternation_rel_tol = 5e-2;
  /// Cap on alternating sweeps per restart before the joint polish.
  int alternation_iters = 50;
  std::uint64_t rng_seed = 0;
  /// Used as restart 0 when present.
  std::optional<GaugedUnknowns> warm_start;
  int workers = 1;
};

/// Quadratic form of one cost term after the substitution u = n^T r:
/// with v = (q, u), v^T A v + 2 d c^T v + d^2 = (d - q + u)^2.
struct BilinearForm {
  static Eigen::Matrix2d a() { return (Eigen::Matrix2d() << 1.0, -1.0, -1.0, 1.0).finished(); }
  static Eigen::Vector2d c() { return {-1.0, 1.0}; }
  static double term(double q, double u, double d) {
    const Eigen::Vector2d v(q, u);
    return v.dot(a() * v) + 2.0 * d * c().dot(v) + d * d;
  }
};

double stress_cost(const GaugedUnknowns& params, const StressProblem& problem);

/// Gradient over the free coordinates, laid out as
/// [theta_2 .. theta_K, q_1 .. q_K, x_2, y_2, .., x_N, y_N].
Vector stress_gradient(const GaugedUnknowns& params, const StressProblem& problem);

/// Free-coordinate vector in the stress_gradient layout, and its inverse.
Vector pack_free(const GaugedUnknowns& params);
GaugedUnknowns unpack_free(const Vector& free, std::size_t walls, std::size_t points);

/// Random initial point for one restart (gauge constraints hold exactly).
GaugedUnknowns restart_sampler(const EchoMatrix& d, SplitMix64& rng);

/// Best-of-restarts local minimum. Throws InfeasibleCount or MaskedInput; a
/// restart that stops on the iteration cap is reported through
/// diagnostics.converged.
Reconstruction solve_stress(const StressProblem& problem, const SolverOptions& opts = {});

/// Runs one restart from `start` (exposed for testing).
GaugedUnknowns refine_stress(const StressProblem& problem, GaugedUnknowns start,
                             const SolverOptions& opts, RestartRecord* record = nullptr,
                             int* descent_violations = nullptr);

}  // namespace echoroom
