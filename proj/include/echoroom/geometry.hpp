#pragma once

// Core geometric types: walls in Hessian normal form, convex rooms,
// trajectories of measurement points and rigid motions.
//
// Rooms are stored wall-first; vertices are derived on demand. A wall
// <n, x> = q bounds the half-space <n, x> <= q, so the signed distance from a
// point r to the wall is q - <n, r> (positive inside the room).

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace echoroom {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kUnitNormTolerance = 1e-12;
inline constexpr double kConvexityTolerance = 1e-9;
inline constexpr double kMinEdgeLength = 1e-9;

class Wall {
 public:
  /// Throws InvalidArgument unless `normal` has unit length within 1e-12.
  Wall(Vector normal, double offset);

  /// Rescales an arbitrary nonzero normal (and its offset) to unit length.
  static Wall normalized(const Vector& normal, double offset);

  const Vector& normal() const noexcept { return normal_; }
  double offset() const noexcept { return offset_; }
  int dimension() const noexcept { return static_cast<int>(normal_.size()); }

  /// Signed distance q - <n, x>; positive on the room side.
  double distance(const Vector& x) const { return offset_ - normal_.dot(x); }

 private:
  Vector normal_;
  double offset_;
};

class Room {
 public:
  /// Checks unit normals, a common dimension in {2, 3} and the minimum wall
  /// count. Boundedness is checked by room_vertices() / validate_room().
  explicit Room(std::vector<Wall> walls, std::vector<std::string> labels = {});

  int dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return walls_.size(); }
  const Wall& wall(std::size_t j) const { return walls_.at(j); }
  const std::vector<Wall>& walls() const noexcept { return walls_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(std::size_t j) const { return labels_.at(j); }

 private:
  std::vector<Wall> walls_;
  std::vector<std::string> labels_;
  int dimension_ = 2;
};

class Trajectory {
 public:
  explicit Trajectory(std::vector<Vector> points);

  std::size_t size() const noexcept { return points_.size(); }
  int dimension() const noexcept { return static_cast<int>(points_.front().size()); }
  const Vector& point(std::size_t i) const { return points_.at(i); }
  const std::vector<Vector>& points() const noexcept { return points_; }

 private:
  std::vector<Vector> points_;
};

/// x -> rotation * x + translation. `rotation` must be orthogonal; det = -1 is
/// accepted only when allow_reflection is set.
class RigidMotion {
 public:
  RigidMotion(Matrix rotation, Vector translation, bool allow_reflection = false);

  static RigidMotion identity(int dimension);
  /// Planar rotation by `angle` radians followed by `translation`.
  static RigidMotion planar(double angle, const Eigen::Vector2d& translation);

  const Matrix& rotation() const noexcept { return rotation_; }
  const Vector& translation() const noexcept { return translation_; }
  bool allow_reflection() const noexcept { return allow_reflection_; }
  bool is_reflection() const;

  Vector apply(const Vector& x) const { return rotation_ * x + translation_; }
  RigidMotion inverse() const;

 private:
  Matrix rotation_;
  Vector translation_;
  bool allow_reflection_;
};

/// Corner of a planar room: intersection of walls `first` and `second`
/// (consecutive in counterclockwise order).
struct Corner {
  Eigen::Vector2d point;
  std::size_t first;
  std::size_t second;
};

Eigen::Vector2d as2d(const Vector& v);
Vector from2d(const Eigen::Vector2d& v);

/// Builds a room from a strictly convex counterclockwise polygon. Wall j is the
/// edge from vertex j to vertex j+1; offsets are relative to the input frame,
/// which must contain the origin in the closed polygon.
Room room_from_vertices(const std::vector<Eigen::Vector2d>& vertices);

/// Counterclockwise corners of a planar room, sorted by normal angle and
/// rotated so the corner ending at the first wall in label order comes first.
/// Throws UnboundedRoom if the half-planes do not close, InvalidArgument if a
/// wall does not support an edge.
std::vector<Corner> room_corners(const Room& room);
std::vector<Eigen::Vector2d> room_vertices(const Room& room);

/// Construction-time check: bounded, every wall an edge, origin inside
/// (offsets >= 0).
void validate_room(const Room& room);

/// Intersection point of the lines of walls a and b (planar). Returns NaNs for
/// parallel walls.
Eigen::Vector2d wall_intersection(const Wall& a, const Wall& b);

std::pair<Room, Trajectory> apply_rigid_motion(const Room& room, const Trajectory& traj,
                                               const RigidMotion& motion);
Room apply_rigid_motion(const Room& room, const RigidMotion& motion);
Trajectory apply_rigid_motion(const Trajectory& traj, const RigidMotion& motion);

/// Moves the first measurement to the origin and rotates the first wall normal
/// onto (0, 1). Planar only.
std::pair<Room, Trajectory> gauge_normalize(const Room& room, const Trajectory& traj);

/// Normal angle theta with n = (sin theta, cos theta), so theta = 0 is (0, 1).
double normal_angle(const Eigen::Vector2d& n);
Eigen::Vector2d normal_from_angle(double theta);

/// True when all points lie within `tol` of a common line.
bool is_collinear(const std::vector<Vector>& points, double tol = 1e-9);

/// Number of distinct normal directions (up to sign) among the walls.
std::size_t distinct_normal_directions(const Room& room, double tol = 1e-9);

void require_planar(int dimension, const char* what);

}  // namespace echoroom
