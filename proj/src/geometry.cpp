#include "echoroom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "echoroom/error.hpp"

namespace echoroom {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

double standard_angle(const Vector& n) { return std::atan2(n(1), n(0)); }

}  // namespace

Wall::Wall(Vector normal, double offset) : normal_(std::move(normal)), offset_(offset) {
  if (normal_.size() < 2 || normal_.size() > 3) {
    throw Error(ErrorCode::UnsupportedDimension, "wall normal must have 2 or 3 components");
  }
  if (!std::isfinite(offset_) || !normal_.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "wall parameters must be finite");
  }
  if (std::abs(normal_.norm() - 1.0) > kUnitNormTolerance) {
    throw Error(ErrorCode::InvalidArgument, "wall normal is not unit length");
  }
}

Wall Wall::normalized(const Vector& normal, double offset) {
  const double len = normal.norm();
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw Error(ErrorCode::InvalidArgument, "wall normal must be nonzero");
  }
  return Wall(normal / len, offset / len);
}

Room::Room(std::vector<Wall> walls, std::vector<std::string> labels)
    : walls_(std::move(walls)), labels_(std::move(labels)) {
  if (walls_.empty()) throw Error(ErrorCode::InvalidArgument, "room has no walls");
  dimension_ = walls_.front().dimension();
  for (const auto& w : walls_) {
    if (w.dimension() != dimension_) {
      throw Error(ErrorCode::InvalidArgument, "walls have mixed dimensions");
    }
  }
  const std::size_t min_walls = dimension_ == 2 ? 3 : 4;
  if (walls_.size() < min_walls) {
    throw Error(ErrorCode::InvalidArgument,
                "a room in R^" + std::to_string(dimension_) + " needs at least " +
                    std::to_string(min_walls) + " walls");
  }
  if (labels_.empty()) {
    for (std::size_t j = 0; j < walls_.size(); ++j) labels_.push_back("wall-" + std::to_string(j));
  } else if (labels_.size() != walls_.size()) {
    throw Error(ErrorCode::LabelMismatch, "label count differs from wall count");
  }
}

Trajectory::Trajectory(std::vector<Vector> points) : points_(std::move(points)) {
  if (points_.empty()) throw Error(ErrorCode::InvalidArgument, "trajectory is empty");
  const auto d = points_.front().size();
  if (d < 2 || d > 3) throw Error(ErrorCode::UnsupportedDimension, "points must be 2D or 3D");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].size() != d) {
      throw Error(ErrorCode::InvalidArgument, "trajectory points have mixed dimensions", i);
    }
    if (!points_[i].allFinite()) {
      throw Error(ErrorCode::InvalidArgument, "trajectory point is not finite", i);
    }
  }
}

RigidMotion::RigidMotion(Matrix rotation, Vector translation, bool allow_reflection)
    : rotation_(std::move(rotation)),
      translation_(std::move(translation)),
      allow_reflection_(allow_reflection) {
  const auto d = rotation_.rows();
  if (rotation_.cols() != d || translation_.size() != d) {
    throw Error(ErrorCode::InvalidArgument, "rigid motion shape mismatch");
  }
  const double orth = (rotation_.transpose() * rotation_ - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (orth > 1e-12) throw Error(ErrorCode::InvalidArgument, "rotation is not orthogonal");
  if (rotation_.determinant() < 0.0 && !allow_reflection_) {
    throw Error(ErrorCode::InvalidArgument, "reflection given but allow_reflection is false");
  }
}

RigidMotion RigidMotion::identity(int dimension) {
  return RigidMotion(Matrix::Identity(dimension, dimension), Vector::Zero(dimension));
}

RigidMotion RigidMotion::planar(double angle, const Eigen::Vector2d& translation) {
  Matrix rot(2, 2);
  rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return RigidMotion(rot, from2d(translation));
}

bool RigidMotion::is_reflection() const { return rotation_.determinant() < 0.0; }

RigidMotion RigidMotion::inverse() const {
  Matrix rt = rotation_.transpose();
  Vector t = -(rt * translation_);
  return RigidMotion(rt, t, allow_reflection_);
}

Eigen::Vector2d as2d(const Vector& v) {
  if (v.size() != 2) throw Error(ErrorCode::UnsupportedDimension, "expected a planar vector");
  return {v(0), v(1)};
}

Vector from2d(const Eigen::Vector2d& v) {
  Vector out(2);
  out << v.x(), v.y();
  return out;
}

void require_planar(int dimension, const char* what) {
  if (dimension != 2) {
    throw Error(ErrorCode::UnsupportedDimension,
                std::string(what) + " supports planar (d = 2) rooms only");
  }
}

Room room_from_vertices(const std::vector<Eigen::Vector2d>& vertices) {
  const std::size_t k = vertices.size();
  if (k < 3) throw Error(ErrorCode::InvalidArgument, "a room needs at least 3 vertices");
  std::vector<Eigen::Vector2d> edges(k);
  for (std::size_t j = 0; j < k; ++j) {
    edges[j] = vertices[(j + 1) % k] - vertices[j];
    if (edges[j].norm() < kMinEdgeLength) {
      throw Error(ErrorCode::DegenerateEdge, "consecutive vertices coincide", j);
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    const Eigen::Vector2d a = edges[j].normalized();
    const Eigen::Vector2d b = edges[(j + 1) % k].normalized();
    if (cross(a, b) <= kConvexityTolerance) {
      throw Error(ErrorCode::NonConvexInput,
                  "polygon is not strictly convex and counterclockwise at a vertex", (j + 1) % k);
    }
  }
  // A convex polygon whose edges all turn left can still wind more than once.
  double turning = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const Eigen::Vector2d& a = edges[j];
    const Eigen::Vector2d& b = edges[(j + 1) % k];
    turning += std::atan2(cross(a, b), a.dot(b));
  }
  if (std::abs(turning - kTwoPi) > 1e-6) {
    throw Error(ErrorCode::NonConvexInput, "polygon winds more than once");
  }

  std::vector<Wall> walls;
  walls.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    const Eigen::Vector2d e = edges[j].normalized();
    const Eigen::Vector2d n(e.y(), -e.x());  // outward for counterclockwise order
    walls.emplace_back(from2d(n), n.dot(vertices[j]));
  }
  return Room(std::move(walls));
}

Eigen::Vector2d wall_intersection(const Wall& a, const Wall& b) {
  const Eigen::Vector2d na = as2d(a.normal());
  const Eigen::Vector2d nb = as2d(b.normal());
  const double det = cross(na, nb);
  if (std::abs(det) < 1e-14) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  // Solve [na^T; nb^T] x = [qa; qb] by Cramer's rule.
  return {(a.offset() * nb.y() - b.offset() * na.y()) / det,
          (na.x() * b.offset() - nb.x() * a.offset()) / det};
}

std::vector<Corner> room_corners(const Room& room) {
  require_planar(room.dimension(), "room_corners");
  const std::size_t k = room.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> angle(k);
  for (std::size_t j = 0; j < k; ++j) angle[j] = standard_angle(room.wall(j).normal());
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return angle[a] < angle[b]; });

  for (std::size_t s = 0; s < k; ++s) {
    const std::size_t a = order[s];
    const std::size_t b = order[(s + 1) % k];
    double gap = angle[b] - angle[a];
    if (s + 1 == k) gap += kTwoPi;
    if (gap >= 3.14159265358979323846 - 1e-12) {
      throw Error(ErrorCode::UnboundedRoom, "walls leave an open direction between " +
                                                room.label(a) + " and " + room.label(b));
    }
    if (gap < 1e-12) {
      throw Error(ErrorCode::InvalidArgument,
                  "walls " + room.label(a) + " and " + room.label(b) + " are parallel duplicates", b);
    }
  }

  std::vector<Corner> corners;
  corners.reserve(k);
  double scale = 1.0;
  for (const auto& w : room.walls()) scale = std::max(scale, std::abs(w.offset()));
  for (std::size_t s = 0; s < k; ++s) {
    const std::size_t a = order[(s + k - 1) % k];
    const std::size_t b = order[s];
    corners.push_back({wall_intersection(room.wall(a), room.wall(b)), a, b});
  }
  for (const auto& c : corners) {
    for (std::size_t j = 0; j < k; ++j) {
      if (room.wall(j).distance(from2d(c.point)) < -1e-9 * scale) {
        throw Error(ErrorCode::InvalidArgument,
                    "wall " + room.label(j) + " cuts off a corner: walls are redundant or the room is empty", j);
      }
    }
  }
  for (std::size_t s = 0; s < k; ++s) {
    if ((corners[(s + 1) % k].point - corners[s].point).norm() < kMinEdgeLength) {
      throw Error(ErrorCode::InvalidArgument,
                  "wall " + room.label(corners[s].second) + " touches the room in a single point",
                  corners[s].second);
    }
  }
  const auto first = std::find_if(corners.begin(), corners.end(),
                                  [](const Corner& c) { return c.second == 0; });
  std::rotate(corners.begin(), first, corners.end());
  return corners;
}

std::vector<Eigen::Vector2d> room_vertices(const Room& room) {
  std::vector<Eigen::Vector2d> out;
  for (const auto& c : room_corners(room)) out.push_back(c.point);
  return out;
}

void validate_room(const Room& room) {
  if (room.dimension() == 2) room_corners(room);
  for (std::size_t j = 0; j < room.size(); ++j) {
    if (room.wall(j).offset() < 0.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "negative offset: origin must lie inside the room at construction", j);
    }
  }
}

Room apply_rigid_motion(const Room& room, const RigidMotion& motion) {
  if (motion.rotation().rows() != room.dimension()) {
    throw Error(ErrorCode::InvalidArgument, "motion dimension differs from room dimension");
  }
  std::vector<Wall> walls;
  walls.reserve(room.size());
  for (const auto& w : room.walls()) {
    Vector n = motion.rotation() * w.normal();
    // Renormalize only against real drift; unit inputs pass through unchanged.
    if (const double len = n.norm(); std::abs(len - 1.0) > 1e-15) n /= len;
    const double q = w.offset() + n.dot(motion.translation());
    walls.emplace_back(std::move(n), q);
  }
  return Room(std::move(walls), room.labels());
}

Trajectory apply_rigid_motion(const Trajectory& traj, const RigidMotion& motion) {
  std::vector<Vector> pts;
  pts.reserve(traj.size());
  for (const auto& p : traj.points()) pts.push_back(motion.apply(p));
  return Trajectory(std::move(pts));
}

std::pair<Room, Trajectory> apply_rigid_motion(const Room& room, const Trajectory& traj,
                                               const RigidMotion& motion) {
  return {apply_rigid_motion(room, motion), apply_rigid_motion(traj, motion)};
}

std::pair<Room, Trajectory> gauge_normalize(const Room& room, const Trajectory& traj) {
  require_planar(room.dimension(), "gauge_normalize");
  require_planar(traj.dimension(), "gauge_normalize");
  const double angle = 0.5 * 3.14159265358979323846 - standard_angle(room.wall(0).normal());
  Matrix rot(2, 2);
  rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  const Vector t = -(rot * traj.point(0));
  const RigidMotion motion(rot, t);

  std::vector<Wall> walls;
  walls.reserve(room.size());
  for (std::size_t j = 0; j < room.size(); ++j) {
    const auto& w = room.wall(j);
    Vector n = rot * w.normal();
    if (j == 0) n << 0.0, 1.0;
    n /= n.norm();
    walls.emplace_back(n, w.offset() + n.dot(t));
  }
  std::vector<Vector> pts;
  pts.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    pts.push_back(i == 0 ? Vector(Vector::Zero(2)) : motion.apply(traj.point(i)));
  }
  return {Room(std::move(walls), room.labels()), Trajectory(std::move(pts))};
}

double normal_angle(const Eigen::Vector2d& n) { return std::atan2(n.x(), n.y()); }

Eigen::Vector2d normal_from_angle(double theta) { return {std::sin(theta), std::cos(theta)}; }

bool is_collinear(const std::vector<Vector>& points, double tol) {
  if (points.size() <= 2) return true;
  const auto d = points.front().size();
  Vector mean = Vector::Zero(d);
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Matrix centered(points.size(), d);
  for (std::size_t i = 0; i < points.size(); ++i) centered.row(i) = (points[i] - mean).transpose();
  Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeFullV);
  const Vector axis = svd.matrixV().col(0);
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vector r = centered.row(i).transpose();
    worst = std::max(worst, (r - axis * axis.dot(r)).norm());
  }
  return worst <= tol;
}

std::size_t distinct_normal_directions(const Room& room, double tol) {
  std::vector<Vector> reps;
  for (const auto& w : room.walls()) {
    const bool seen = std::any_of(reps.begin(), reps.end(), [&](const Vector& r) {
      return (w.normal() - r * r.dot(w.normal())).norm() < tol;
    });
    if (!seen) reps.push_back(w.normal());
  }
  return reps.size();
}

}  // namespace echoroom
