#pragma once

// Forward model for a collocated source and receiver: first-order image
// sources, wall distances, arrival times, idealized impulse responses and
// additive distance-domain noise.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "echoroom/geometry.hpp"

namespace echoroom {

using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// N x K matrix of measurement-to-wall distances with an observed-mask and
/// wall labels. Unobserved entries hold NaN.
class EchoMatrix {
 public:
  EchoMatrix(Matrix entries, Mask mask, std::vector<std::string> labels);
  /// Fully observed matrix with default labels.
  explicit EchoMatrix(Matrix entries, std::vector<std::string> labels = {});

  std::size_t rows() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(entries_.cols()); }
  const Matrix& entries() const noexcept { return entries_; }
  const Mask& mask() const noexcept { return mask_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  bool observed(std::size_t i, std::size_t j) const { return mask_(i, j); }
  double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }

  bool fully_observed() const { return mask_.all(); }
  std::size_t observed_count() const { return static_cast<std::size_t>(mask_.count()); }

 private:
  Matrix entries_;
  Mask mask_;
  std::vector<std::string> labels_;
};

enum class AmplitudeModel { Unit, InverseDistance };

struct SimConfig {
  double speed_of_sound = 343.0;  // m/s
  double noise_sigma = 0.0;       // m, standard deviation of additive noise
  std::uint64_t rng_seed = 0;
  AmplitudeModel amplitude_model = AmplitudeModel::Unit;
  std::vector<double> wall_absorption;  // empty means zero for every wall

  void validate(std::size_t wall_count) const;
};

struct Pulse {
  double time;       // s
  double amplitude;  // dimensionless
  std::string wall_label;
};

/// First-order impulse response: one pulse per wall, sorted by arrival time.
struct RirTrace {
  std::vector<Pulse> pulses;
};

/// Mirror image of `r` across the wall plane.
Vector image_source(const Wall& wall, const Vector& r);

/// Signed distance from `r` to the wall plane (q - <n, r>).
double wall_distance(const Wall& wall, const Vector& r);

/// Distances from every trajectory point to every wall plus iid Gaussian noise
/// when cfg.noise_sigma > 0. Throws PointOutsideRoom naming the first point
/// that is not strictly inside.
EchoMatrix echo_matrix(const Room& room, const Trajectory& traj, const SimConfig& cfg = {});

/// Distances q_j - <n_j, r_i> without the inside check or noise.
Matrix model_distances(const Room& room, const Trajectory& traj);

/// Round-trip time of a first-order echo: 2 d / c.
double toa_of_distance(double distance, const SimConfig& cfg = {});
double distance_of_toa(double toa, const SimConfig& cfg = {});

RirTrace render_rir(const Room& room, const Vector& r, const SimConfig& cfg = {});

/// Index of the first point with a non-positive distance to some wall, or
/// traj.size() if every point is strictly inside.
std::size_t first_point_outside(const Room& room, const Trajectory& traj);

}  // namespace echoroom
