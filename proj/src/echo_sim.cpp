#include "echoroom/echo_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "echoroom/error.hpp"
#include "echoroom/random.hpp"

namespace echoroom {

namespace {

std::vector<std::string> default_labels(std::size_t k) {
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < k; ++j) labels.push_back("wall-" + std::to_string(j));
  return labels;
}

void require_speed(const SimConfig& cfg) {
  if (!(cfg.speed_of_sound > 0.0)) throw Error(ErrorCode::InvalidArgument, "speed of sound must be positive");
}

}  // namespace

EchoMatrix::EchoMatrix(Matrix entries, Mask mask, std::vector<std::string> labels)
    : entries_(std::move(entries)), mask_(std::move(mask)), labels_(std::move(labels)) {
  if (mask_.rows() != entries_.rows() || mask_.cols() != entries_.cols()) {
    throw Error(ErrorCode::InvalidArgument, "mask shape differs from entries shape");
  }
  if (labels_.empty()) labels_ = default_labels(cols());
  if (labels_.size() != cols()) {
    throw Error(ErrorCode::LabelMismatch, "label count differs from column count");
  }
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      if (mask_(i, j) && !std::isfinite(entries_(i, j))) {
        throw Error(ErrorCode::InvalidArgument, "observed entry is not finite",
                    static_cast<std::size_t>(i));
      }
      if (!mask_(i, j)) entries_(i, j) = std::numeric_limits<double>::quiet_NaN();
    }
  }
}

EchoMatrix::EchoMatrix(Matrix entries, std::vector<std::string> labels)
    : EchoMatrix(entries, Mask::Constant(entries.rows(), entries.cols(), true), std::move(labels)) {}

void SimConfig::validate(std::size_t wall_count) const {
  require_speed(*this);
  if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise sigma must be nonnegative");
  if (!wall_absorption.empty()) {
    if (wall_absorption.size() != wall_count) {
      throw Error(ErrorCode::InvalidArgument, "one absorption coefficient per wall is required");
    }
    for (std::size_t j = 0; j < wall_count; ++j) {
      if (!(wall_absorption[j] >= 0.0 && wall_absorption[j] <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "absorption must lie in [0, 1]", j);
      }
    }
  }
}

Vector image_source(const Wall& wall, const Vector& r) {
  return r + 2.0 * wall.distance(r) * wall.normal();
}

double wall_distance(const Wall& wall, const Vector& r) { return wall.distance(r); }

Matrix model_distances(const Room& room, const Trajectory& traj) {
  if (room.dimension() != traj.dimension()) {
    throw Error(ErrorCode::InvalidArgument, "room and trajectory dimensions differ");
  }
  Matrix d(traj.size(), room.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    for (std::size_t j = 0; j < room.size(); ++j) d(i, j) = room.wall(j).distance(traj.point(i));
  }
  return d;
}

std::size_t first_point_outside(const Room& room, const Trajectory& traj) {
  for (std::size_t i = 0; i < traj.size(); ++i) {
    for (const auto& w : room.walls()) {
      if (!(w.distance(traj.point(i)) > 0.0)) return i;
    }
  }
  return traj.size();
}

EchoMatrix echo_matrix(const Room& room, const Trajectory& traj, const SimConfig& cfg) {
  cfg.validate(room.size());
  Matrix d = model_distances(room, traj);
  if (const auto bad = first_point_outside(room, traj); bad < traj.size()) {
    throw Error(ErrorCode::PointOutsideRoom,
                "measurement " + std::to_string(bad) + " is not strictly inside the room", bad);
  }
  if (cfg.noise_sigma > 0.0) {
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      for (Eigen::Index j = 0; j < d.cols(); ++j) {
        SplitMix64 gen(stream_seed(cfg.rng_seed, {static_cast<std::uint64_t>(i),
                                                   static_cast<std::uint64_t>(j)}));
        std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
        d(i, j) += noise(gen);
      }
    }
  }
  return EchoMatrix(std::move(d), room.labels());
}

double toa_of_distance(double distance, const SimConfig& cfg) {
  if (distance < 0.0) throw Error(ErrorCode::NegativeDistance, "distance must be nonnegative");
  require_speed(cfg);
  return 2.0 * distance / cfg.speed_of_sound;
}

double distance_of_toa(double toa, const SimConfig& cfg) {
  if (toa < 0.0) throw Error(ErrorCode::NegativeDistance, "arrival time must be nonnegative");
  require_speed(cfg);
  return 0.5 * cfg.speed_of_sound * toa;
}

RirTrace render_rir(const Room& room, const Vector& r, const SimConfig& cfg) {
  cfg.validate(room.size());
  RirTrace trace;
  for (std::size_t j = 0; j < room.size(); ++j) {
    const double d = wall_distance(room.wall(j), r);
    if (!(d > 0.0)) {
      throw Error(ErrorCode::PointOutsideRoom, "receiver is not strictly inside the room", j);
    }
    const double reflect = 1.0 - (cfg.wall_absorption.empty() ? 0.0 : cfg.wall_absorption[j]);
    const double amplitude =
        cfg.amplitude_model == AmplitudeModel::Unit ? reflect : reflect / (2.0 * d);
    trace.pulses.push_back({toa_of_distance(d, cfg), amplitude, room.label(j)});
  }
  std::stable_sort(trace.pulses.begin(), trace.pulses.end(),
                   [](const Pulse& a, const Pulse& b) { return a.time < b.time; });
  return trace;
}

}  // namespace echoroom
