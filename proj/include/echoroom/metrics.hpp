#pragma once

// Gauge-invariant error metrics between a true and a reconstructed
// configuration: label-matched room vertices and measurement locations after
// the rigid motion that best aligns the trajectories.

#include <vector>

#include "echoroom/geometry.hpp"

namespace echoroom {

struct AlignOptions {
  bool allow_reflection = false;
  /// Compare in the fixed gauge r_1 = 0, n_1 = (0, 1) instead of aligning.
  bool gauge_fixed = false;
};

struct ErrorReport {
  double vertex_error = 0.0;    // RMS over label-matched vertices (m)
  double location_error = 0.0;  // RMS over measurement locations (m)
  double vertex_error_sum = 0.0;    // summed Euclidean distances
  double location_error_sum = 0.0;
  RigidMotion aligning_motion = RigidMotion::identity(2);  // estimate -> truth frame
  std::vector<double> per_vertex;
  std::vector<double> per_location;
};

/// Least-squares rigid motion taking `source` onto `target`. Optional unit
/// direction pairs (e.g. wall normals) join the rotation fit; they carry no
/// translation.
RigidMotion procrustes(const std::vector<Vector>& source, const std::vector<Vector>& target,
                       bool allow_reflection, const std::vector<Vector>& source_dirs = {},
                       const std::vector<Vector>& target_dirs = {});

/// Throws LabelMismatch when wall counts, labels or measurement counts differ.
/// When the true trajectory does not pin the rotation (collinear or single
/// point), wall normals break the tie.
ErrorReport align_and_score(const Room& truth_room, const Trajectory& truth_traj,
                            const Room& est_room, const Trajectory& est_traj,
                            const AlignOptions& opts = {});

}  // namespace echoroom
