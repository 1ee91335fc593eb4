#pragma once

// Named room and trajectory generators used by the CLI, the sweep and tests.
//
// Rooms:        square | rect W H | parallelogram ALPHA BETA (degrees) |
//               regular-K | random-convex K SEED
// Trajectories: random-interior N SEED | collinear N SEED
//
// Generated rooms contain the origin; random rooms are roughly unit scale.

#include <cstdint>
#include <string>

#include "echoroom/geometry.hpp"

namespace echoroom {

Room square_room(double side = 1.0);
Room rect_room(double width, double height);
/// Unit-offset parallelogram with normal directions at angles alpha and beta
/// (radians, measured from the x axis).
Room parallelogram_room(double alpha, double beta);
Room regular_room(std::size_t k, double circumradius = 1.0);
/// K vertices on a circle of radius 1 at jittered angles; every angular gap is
/// kept below pi so the origin is inside and the polygon is strictly convex.
Room random_convex_room(std::size_t k, std::uint64_t seed);

/// Uniform points at distance at least `margin` from every wall.
Trajectory random_interior_trajectory(const Room& room, std::size_t n, std::uint64_t seed,
                                      double margin = 0.05);
/// Points on a random chord through the room, equally spaced in its middle.
Trajectory collinear_trajectory(const Room& room, std::size_t n, std::uint64_t seed,
                                double margin = 0.05);

/// Parses a generator spec such as "rect 2 1" or "regular-6". Throws
/// InvalidArgument for unknown names or malformed arguments.
Room room_from_spec(const std::string& spec);
Trajectory trajectory_from_spec(const Room& room, const std::string& spec);

}  // namespace echoroom
