#include "echoroom/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "echoroom/error.hpp"
#include "echoroom/metrics.hpp"

namespace echoroom {

namespace {

double max_difference(const EchoMatrix& a, const EchoMatrix& b) {
  return (a.entries() - b.entries()).cwiseAbs().maxCoeff();
}

void require_inside(const Room& room, const Trajectory& traj, ErrorCode code) {
  if (const auto bad = first_point_outside(room, traj); bad < traj.size()) {
    throw Error(code, "measurement " + std::to_string(bad) + " is not strictly inside the room", bad);
  }
}

Wall reflect_wall(const Wall& w, const Eigen::Vector2d& point, const Eigen::Matrix2d& mirror) {
  const Eigen::Vector2d n = as2d(w.normal());
  Eigen::Vector2d m = mirror * n;
  m.normalize();
  return Wall(from2d(m), w.offset() - n.dot(point) + m.dot(point));
}

bool is_valid_room(const Room& room) {
  try {
    room_corners(room);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

AmbiguousPair make_parallelogram_family(const Room& base, const Trajectory& traj, double alpha,
                                        double beta) {
  require_planar(base.dimension(), "make_parallelogram_family");
  if (base.size() != 4) throw Error(ErrorCode::InvalidArgument, "base room must be a rectangle");
  for (const auto& w : base.walls()) {
    const Eigen::Vector2d n = as2d(w.normal());
    if (std::min(std::abs(n.x()), std::abs(n.y())) > 1e-12) {
      throw Error(ErrorCode::InvalidArgument, "base room must be an axis-aligned rectangle");
    }
  }
  if (distinct_normal_directions(base, 1e-12) != 2) {
    throw Error(ErrorCode::InvalidArgument, "base room must be an axis-aligned rectangle");
  }
  room_corners(base);
  if (std::abs(std::sin(alpha - beta)) < 1e-9) {
    throw Error(ErrorCode::DegenerateShear, "alpha and beta give parallel wall directions");
  }
  require_inside(base, traj, ErrorCode::PointLeftRoom);

  Eigen::Matrix2d a;
  a << std::cos(alpha), std::sin(alpha), std::cos(beta), std::sin(beta);
  const Eigen::Matrix2d a_inv = a.inverse();

  std::vector<Wall> walls;
  for (const auto& w : base.walls()) {
    Eigen::Vector2d m = a.transpose() * as2d(w.normal());
    m.normalize();
    walls.emplace_back(from2d(m), w.offset());
  }
  std::vector<Vector> pts;
  for (const auto& p : traj.points()) pts.push_back(from2d(a_inv * as2d(p)));

  Room room_b(std::move(walls), base.labels());
  Trajectory traj_b(std::move(pts));
  room_corners(room_b);
  require_inside(room_b, traj_b, ErrorCode::PointLeftRoom);

  EchoMatrix da = echo_matrix(base, traj);
  const EchoMatrix db = echo_matrix(room_b, traj_b);
  const double diff = max_difference(da, db);
  return AmbiguousPair{base, traj, std::move(room_b), std::move(traj_b), std::move(da), alpha - beta, diff};
}

AmbiguousPair make_collinear_family(const Room& room, const Eigen::Vector2d& point,
                                    const Eigen::Vector2d& direction,
                                    const std::vector<double>& offsets,
                                    std::optional<std::vector<std::size_t>> reflected_walls) {
  require_planar(room.dimension(), "make_collinear_family");
  if (offsets.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one measurement");
  if (!(direction.norm() > 0.0)) throw Error(ErrorCode::InvalidArgument, "line direction is zero");
  const Eigen::Vector2d u = direction.normalized();
  std::vector<Vector> pts;
  for (double t : offsets) pts.push_back(from2d(point + t * u));
  const Trajectory traj(std::move(pts));
  require_inside(room, traj, ErrorCode::PointLeftRoom);

  const Eigen::Matrix2d mirror = 2.0 * u * u.transpose() - Eigen::Matrix2d::Identity();
  const std::size_t k = room.size();
  auto build = [&](const std::vector<std::size_t>& subset) {
    std::vector<Wall> walls = room.walls();
    for (std::size_t j : subset) {
      if (j >= k) throw Error(ErrorCode::InvalidArgument, "reflected wall index out of range", j);
      walls[j] = reflect_wall(room.wall(j), point, mirror);
    }
    return Room(std::move(walls), room.labels());
  };

  std::vector<std::size_t> chosen;
  std::optional<Room> room_b;
  if (reflected_walls) {
    chosen = *reflected_walls;
    room_b = build(chosen);
    room_corners(*room_b);
  } else {
    // Subsets in order of size, then lexicographically by index.
    for (std::size_t size = 1; size < k && !room_b; ++size) {
      std::vector<bool> pick(k, false);
      std::fill(pick.begin(), pick.begin() + static_cast<long>(size), true);
      do {
        std::vector<std::size_t> subset;
        for (std::size_t j = 0; j < k; ++j) {
          if (pick[j]) subset.push_back(j);
        }
        Room candidate = build(subset);
        if (is_valid_room(candidate) && !rigid_congruence(room, traj, candidate, traj).congruent) {
          chosen = subset;
          room_b = std::move(candidate);
          break;
        }
      } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    if (!room_b) {
      chosen.resize(k);
      for (std::size_t j = 0; j < k; ++j) chosen[j] = j;
      room_b = build(chosen);
    }
  }
  require_inside(*room_b, traj, ErrorCode::PointLeftRoom);

  double mask = 0.0;
  for (std::size_t j : chosen) mask += std::ldexp(1.0, static_cast<int>(j));
  EchoMatrix da = echo_matrix(room, traj);
  const EchoMatrix db = echo_matrix(*room_b, traj);
  const double diff = max_difference(da, db);
  return AmbiguousPair{room, traj, std::move(*room_b), traj, std::move(da), mask, diff};
}

CongruenceResult rigid_congruence(const Room& room_a, const Trajectory& traj_a, const Room& room_b,
                                  const Trajectory& traj_b, double tol) {
  if (room_a.size() != room_b.size() || traj_a.size() != traj_b.size() ||
      room_a.dimension() != room_b.dimension()) {
    throw Error(ErrorCode::LabelMismatch, "configurations have different shapes");
  }
  std::vector<Vector> na;
  std::vector<Vector> nb;
  for (std::size_t j = 0; j < room_a.size(); ++j) {
    na.push_back(room_a.wall(j).normal());
    nb.push_back(room_b.wall(j).normal());
  }

  CongruenceResult best;
  best.max_error = std::numeric_limits<double>::infinity();
  for (bool reflect : {false, true}) {
    const RigidMotion motion = procrustes(traj_a.points(), traj_b.points(), reflect, na, nb);
    double err = 0.0;
    for (std::size_t i = 0; i < traj_a.size(); ++i) {
      err = std::max(err, (motion.apply(traj_a.point(i)) - traj_b.point(i)).norm());
    }
    for (std::size_t j = 0; j < room_a.size(); ++j) {
      const Vector n = motion.rotation() * na[j];
      err = std::max(err, (n - nb[j]).norm());
      const double q = room_a.wall(j).offset() + n.dot(motion.translation());
      err = std::max(err, std::abs(q - room_b.wall(j).offset()));
    }
    if (err < best.max_error) {
      best.max_error = err;
      best.motion = motion;
    }
  }
  best.congruent = best.max_error < tol;
  return best;
}

}  // namespace echoroom
