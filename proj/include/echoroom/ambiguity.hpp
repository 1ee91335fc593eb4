#pragma once

// Witnesses for non-unique reconstruction from first-order echoes.
//
// Two configurations (n_j, r_i) and (m_j, s_i) with equal offsets give the same
// echo matrix whenever <r_i, n_j> = <s_i, m_j> for all i, j. Two families
// realize this without being rigid copies of each other:
//
//  * Parallelogram rooms. For a rectangle with normals +-e1, +-e2 and any
//    invertible A whose rows are unit vectors u(alpha), u(beta), the room with
//    normals A^T n_j and the trajectory s_i = A^{-1} r_i match every distance.
//  * Collinear trajectories. If every r_i lies on one line, reflecting any
//    subset of walls across that line keeps each <r_i, n_j> and each offset
//    along the line, hence every distance.

#include <cstdint>
#include <optional>
#include <vector>

#include "echoroom/echo_sim.hpp"
#include "echoroom/geometry.hpp"

namespace echoroom {

struct AmbiguousPair {
  Room room_a;
  Trajectory traj_a;
  Room room_b;
  Trajectory traj_b;
  EchoMatrix echoes;  // echo matrix of configuration a
  /// alpha - beta (radians) for the parallelogram family; bitmask of the
  /// reflected walls for the collinear family.
  double family_parameter = 0.0;
  double max_echo_difference = 0.0;  // |D_a - D_b|_inf
};

/// `base` must be an axis-aligned rectangle (normals +-e1, +-e2) containing
/// `traj`. Angles are in radians; (pi/2, 0) yields a mirror copy.
/// Throws InvalidArgument for a non-rectangular base, DegenerateShear when
/// sin(alpha - beta) vanishes, PointLeftRoom if a mapped point leaves room_b.
AmbiguousPair make_parallelogram_family(const Room& base, const Trajectory& traj, double alpha,
                                        double beta);

/// Trajectory r_i = point + offsets[i] * direction. Walls listed in
/// `reflected_walls` are mirrored across the line; without a list, the first
/// subset (by size, then index order) giving a valid room that is not a rigid
/// copy of the original is used, falling back to mirroring every wall.
/// Throws PointLeftRoom if a point is not strictly inside the room.
AmbiguousPair make_collinear_family(const Room& room, const Eigen::Vector2d& point,
                                    const Eigen::Vector2d& direction,
                                    const std::vector<double>& offsets,
                                    std::optional<std::vector<std::size_t>> reflected_walls = std::nullopt);

struct CongruenceResult {
  bool congruent = false;
  std::optional<RigidMotion> motion;  // maps configuration a onto b
  double max_error = 0.0;
};

/// Searches proper and improper rigid motions mapping (room_a, traj_a) onto
/// (room_b, traj_b) with labels carried: trajectory points, wall normals and
/// wall offsets must all agree within `tol`.
CongruenceResult rigid_congruence(const Room& room_a, const Trajectory& traj_a, const Room& room_b,
                                  const Trajectory& traj_b, double tol = 1e-9);

}  // namespace echoroom
