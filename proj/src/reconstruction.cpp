#include "echoroom/reconstruction.hpp"

#include <cmath>

#include "echoroom/error.hpp"

namespace echoroom {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

GaugedUnknowns unknowns_from_geometry(const Room& room, const Trajectory& traj) {
  const auto [g_room, g_traj] = gauge_normalize(room, traj);
  GaugedUnknowns u;
  for (const auto& w : g_room.walls()) {
    u.thetas.push_back(normal_angle(as2d(w.normal())));
    u.offsets.push_back(w.offset());
  }
  u.thetas[0] = 0.0;
  for (const auto& p : g_traj.points()) {
    u.xs.push_back(p(0));
    u.ys.push_back(p(1));
  }
  return u;
}

std::pair<Room, Trajectory> geometry_from_unknowns(const GaugedUnknowns& u,
                                                   const std::vector<std::string>& labels) {
  std::vector<Wall> walls;
  for (std::size_t j = 0; j < u.walls(); ++j) {
    walls.emplace_back(from2d(normal_from_angle(u.thetas[j])), u.offsets[j]);
  }
  std::vector<Vector> pts;
  for (std::size_t i = 0; i < u.points(); ++i) pts.push_back(from2d({u.xs[i], u.ys[i]}));
  return {Room(std::move(walls), labels), Trajectory(std::move(pts))};
}

Matrix unknowns_distances(const GaugedUnknowns& u) {
  Matrix d(u.points(), u.walls());
  for (std::size_t j = 0; j < u.walls(); ++j) {
    const double s = std::sin(u.thetas[j]);
    const double c = std::cos(u.thetas[j]);
    for (std::size_t i = 0; i < u.points(); ++i) d(i, j) = u.offsets[j] - s * u.xs[i] - c * u.ys[i];
  }
  return d;
}

void canonicalize_chirality(GaugedUnknowns& u) {
  const std::size_t k = u.walls();
  if (k < 3) return;
  // Winding of the label sequence around the circle of normal directions:
  // 1 for counterclockwise labels, k - 1 for clockwise ones.
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double a = std::atan2(std::cos(u.thetas[j]), std::sin(u.thetas[j]));
    const double b = std::atan2(std::cos(u.thetas[(j + 1) % k]), std::sin(u.thetas[(j + 1) % k]));
    total += std::fmod(b - a + 4.0 * kPi, 2.0 * kPi);
  }
  const long winding = std::lround(total / (2.0 * kPi));
  if (2 * winding <= static_cast<long>(k)) return;
  for (auto& t : u.thetas) t = -t;
  for (auto& x : u.xs) x = -x;
}

Reconstruction make_reconstruction(const GaugedUnknowns& u, const EchoMatrix& d,
                                   const Matrix& weights, SolverDiagnostics diagnostics) {
  auto [room, traj] = geometry_from_unknowns(u, d.labels());
  Matrix residuals = d.entries() - unknowns_distances(u);
  double cost = 0.0;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < residuals.rows(); ++i) {
    for (Eigen::Index j = 0; j < residuals.cols(); ++j) {
      const double r = residuals(i, j);
      cost += weights(i, j) * r * r;
      worst = std::max(worst, std::abs(r));
    }
  }
  diagnostics.collinear_suspected = is_collinear(traj.points(), 1e-9);
  return Reconstruction{std::move(room), std::move(traj), cost, std::move(residuals), worst,
                        std::move(diagnostics)};
}

}  // namespace echoroom
