#include "echoroom/metrics.hpp"

#include <cmath>
#include <limits>
#include <tuple>

#include "echoroom/error.hpp"

namespace echoroom {

RigidMotion procrustes(const std::vector<Vector>& source, const std::vector<Vector>& target,
                       bool allow_reflection, const std::vector<Vector>& source_dirs,
                       const std::vector<Vector>& target_dirs) {
  if (source.size() != target.size() || source_dirs.size() != target_dirs.size() || source.empty()) {
    throw Error(ErrorCode::InvalidArgument, "procrustes needs matching, nonempty point sets");
  }
  const auto d = source.front().size();
  Vector cs = Vector::Zero(d);
  Vector ct = Vector::Zero(d);
  for (std::size_t i = 0; i < source.size(); ++i) {
    cs += source[i];
    ct += target[i];
  }
  cs /= static_cast<double>(source.size());
  ct /= static_cast<double>(source.size());

  Matrix rot(d, d);
  if (d == 2) {
    // Closed form: the best rotation angle is atan2(sum cross, sum dot), which
    // is exactly zero for identical inputs.
    auto fit = [&](double flip) {
      double dot = 0.0, cross = 0.0;
      auto add = [&](const Vector& a, const Vector& b) {
        dot += a(0) * b(0) + flip * a(1) * b(1);
        cross += a(0) * b(1) - flip * a(1) * b(0);
      };
      for (std::size_t i = 0; i < source.size(); ++i) add(source[i] - cs, target[i] - ct);
      for (std::size_t j = 0; j < source_dirs.size(); ++j) add(source_dirs[j], target_dirs[j]);
      const double theta = std::atan2(cross, dot);
      Matrix r(2, 2);
      r << std::cos(theta), -flip * std::sin(theta), std::sin(theta), flip * std::cos(theta);
      return std::pair{r, std::hypot(dot, cross)};
    };
    auto [proper, score] = fit(1.0);
    rot = proper;
    if (allow_reflection) {
      auto [improper, score_b] = fit(-1.0);
      if (score_b > score) rot = improper;
    }
  } else {
    Matrix h = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < source.size(); ++i) h += (source[i] - cs) * (target[i] - ct).transpose();
    for (std::size_t j = 0; j < source_dirs.size(); ++j) h += source_dirs[j] * target_dirs[j].transpose();
    Eigen::JacobiSVD<Matrix> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix v = svd.matrixV();
    rot = v * svd.matrixU().transpose();
    if (!allow_reflection && rot.determinant() < 0.0) {
      v.col(d - 1) *= -1.0;
      rot = v * svd.matrixU().transpose();
    }
  }
  const Vector t = ct - rot * cs;
  return RigidMotion(rot, t, allow_reflection);
}

namespace {

void check_labels(const Room& a, const Trajectory& ta, const Room& b, const Trajectory& tb) {
  if (a.size() != b.size() || ta.size() != tb.size()) {
    throw Error(ErrorCode::LabelMismatch, "configurations have different wall or measurement counts");
  }
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a.label(j) != b.label(j)) {
      throw Error(ErrorCode::LabelMismatch, "wall labels differ: " + a.label(j) + " vs " + b.label(j), j);
    }
  }
}

std::vector<Vector> normals_of(const Room& room) {
  std::vector<Vector> out;
  for (const auto& w : room.walls()) out.push_back(w.normal());
  return out;
}

}  // namespace

ErrorReport align_and_score(const Room& truth_room, const Trajectory& truth_traj,
                            const Room& est_room, const Trajectory& est_traj,
                            const AlignOptions& opts) {
  check_labels(truth_room, truth_traj, est_room, est_traj);
  require_planar(truth_room.dimension(), "align_and_score");

  Room ref_room = truth_room;
  Trajectory ref_traj = truth_traj;
  Room moved_room = est_room;
  Trajectory moved_traj = est_traj;
  ErrorReport report;

  if (opts.gauge_fixed) {
    std::tie(ref_room, ref_traj) = gauge_normalize(truth_room, truth_traj);
    std::tie(moved_room, moved_traj) = gauge_normalize(est_room, est_traj);
  } else {
    const bool pinned = !is_collinear(truth_traj.points(), 1e-9) && !is_collinear(est_traj.points(), 1e-9);
    const RigidMotion motion =
        pinned ? procrustes(est_traj.points(), truth_traj.points(), opts.allow_reflection)
               : procrustes(est_traj.points(), truth_traj.points(), opts.allow_reflection,
                            normals_of(est_room), normals_of(truth_room));
    std::tie(moved_room, moved_traj) = apply_rigid_motion(est_room, est_traj, motion);
    report.aligning_motion = motion;
  }

  double sq = 0.0;
  for (std::size_t i = 0; i < ref_traj.size(); ++i) {
    const double e = (ref_traj.point(i) - moved_traj.point(i)).norm();
    report.per_location.push_back(e);
    report.location_error_sum += e;
    sq += e * e;
  }
  report.location_error = std::sqrt(sq / static_cast<double>(ref_traj.size()));

  sq = 0.0;
  const auto corners = room_corners(ref_room);
  for (const auto& c : corners) {
    // Both vertices come from the same intersection routine, so identical
    // rooms score exactly zero.
    const Eigen::Vector2d ref = wall_intersection(ref_room.wall(c.first), ref_room.wall(c.second));
    const Eigen::Vector2d est = wall_intersection(moved_room.wall(c.first), moved_room.wall(c.second));
    const double e = est.allFinite() ? (ref - est).norm() : std::numeric_limits<double>::infinity();
    report.per_vertex.push_back(e);
    report.vertex_error_sum += e;
    sq += e * e;
  }
  report.vertex_error = std::sqrt(sq / static_cast<double>(corners.size()));
  return report;
}

}  // namespace echoroom
