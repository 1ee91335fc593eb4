#pragma once

// Planar room/trajectory parameters in the fixed gauge r_1 = 0, n_1 = (0, 1),
// and the solver output shared by the algebraic and stress solvers.

#include <string>
#include <utility>
#include <vector>

#include "echoroom/echo_sim.hpp"

namespace echoroom {

/// Wall normals are n_j = (sin theta_j, cos theta_j). In the gauge theta_1 = 0,
/// xs[0] = ys[0] = 0.
struct GaugedUnknowns {
  std::vector<double> thetas;
  std::vector<double> offsets;
  std::vector<double> xs;
  std::vector<double> ys;

  std::size_t walls() const noexcept { return thetas.size(); }
  std::size_t points() const noexcept { return xs.size(); }
};

GaugedUnknowns unknowns_from_geometry(const Room& room, const Trajectory& traj);
std::pair<Room, Trajectory> geometry_from_unknowns(const GaugedUnknowns& u,
                                                   const std::vector<std::string>& labels = {});

/// Model distances q_j - <n_j, r_i>.
Matrix unknowns_distances(const GaugedUnknowns& u);

/// Mirror x -> -x when the wall labels run clockwise around the room, so that
/// reconstructions follow the counterclockwise labelling of room_from_vertices.
/// Mirror images produce identical echoes; this only fixes the convention.
void canonicalize_chirality(GaugedUnknowns& u);

struct RestartRecord {
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int alternating_iters = 0;
  int polish_iters = 0;
  bool converged = false;
  double gradient_norm = 0.0;
};

struct SolverDiagnostics {
  std::string method;
  std::vector<RestartRecord> restarts;
  int chosen_restart = -1;
  int iterations = 0;
  bool converged = false;
  /// Restarts whose cost is within 1e-9 (1 + best) of the best.
  int optimal_candidates = 0;
  /// Two optimal candidates that are not rigidly congruent were found.
  bool ambiguity_suspected = false;
  /// All reconstructed locations lie within 1e-9 of a line.
  bool collinear_suspected = false;
  /// Alternating steps that increased the cost (expected to stay zero).
  int descent_violations = 0;
  std::vector<std::string> notes;
};

struct Reconstruction {
  Room room;
  Trajectory trajectory;
  double cost = 0.0;
  Matrix residuals;  // measured - model, N x K
  double max_abs_residual = 0.0;
  SolverDiagnostics diagnostics;
};

/// Assembles a gauge-normalized Reconstruction and its residuals against `d`.
Reconstruction make_reconstruction(const GaugedUnknowns& u, const EchoMatrix& d,
                                   const Matrix& weights, SolverDiagnostics diagnostics);

}  // namespace echoroom
