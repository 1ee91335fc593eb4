#include <doctest.h>

#include <cmath>

#include "echoroom/echo_sim.hpp"
#include "echoroom/error.hpp"
#include "echoroom/generators.hpp"
#include "oracles.hpp"

using namespace echoroom;

namespace {

Room unit_square() { return room_from_vertices({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

}  // namespace

TEST_CASE("image_source: mirror examples") {
  const Wall top(from2d({0, 1}), 1.0);
  CHECK((image_source(top, from2d({0.5, 0.5})) - from2d({0.5, 1.5})).norm() < 1e-15);
  CHECK((image_source(top, from2d({0.3, 1.0})) - from2d({0.3, 1.0})).norm() < 1e-15);
  const Wall right(from2d({1, 0}), 2.0);
  CHECK((image_source(right, from2d({0.5, 0.7})) - from2d({3.5, 0.7})).norm() < 1e-15);
}

TEST_CASE("wall_distance: unit square examples") {
  const Room room = unit_square();
  for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(wall_distance(room.wall(j), from2d({0.5, 0.5})) - 0.5) < 1e-15);
  // Walls in order bottom, right, top, left.
  const double expected[4] = {0.3, 0.8, 0.7, 0.2};
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(std::abs(wall_distance(room.wall(j), from2d({0.2, 0.3})) - expected[j]) < 1e-15);
  }
  const Wall w = room.wall(1);
  const Vector r = from2d({0.25, 0.6});
  const Vector mid = 0.5 * (r + image_source(w, r));
  CHECK(std::abs(wall_distance(w, mid)) < 1e-15);
}

TEST_CASE("image source identities on random rooms") {
  SplitMix64 rng(3);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto cfg = oracle::random_config(s, 3 + s % 6, 10);
    for (const auto& w : cfg.room.walls()) {
      for (const auto& r : cfg.traj.points()) {
        const Vector img = image_source(w, r);
        CHECK(std::abs(2.0 * wall_distance(w, r) - (img - r).norm()) < 1e-12);
        CHECK((image_source(w, img) - r).norm() < 1e-12);
      }
    }
  }
}

TEST_CASE("echo_matrix: center of the unit square") {
  const EchoMatrix d = echo_matrix(unit_square(), Trajectory({from2d({0.5, 0.5})}));
  CHECK(d.rows() == 1);
  CHECK(d.cols() == 4);
  CHECK(d.fully_observed());
  for (std::size_t j = 0; j < 4; ++j) CHECK(d(0, j) == 0.5);
}

TEST_CASE("echo_matrix agrees with vertex geometry and the factorized form") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto cfg = oracle::random_config(s + 7, 3 + s % 6, 1 + s % 12);
    const Matrix d = echo_matrix(cfg.room, cfg.traj).entries();
    std::vector<Eigen::Vector2d> pts;
    for (const auto& p : cfg.traj.points()) pts.push_back(as2d(p));
    // Random rooms come from room_from_vertices, so wall j is edge j -> j+1.
    CHECK((d - oracle::polygon_distances(room_vertices(cfg.room), pts)).cwiseAbs().maxCoeff() < 1e-12);

    const auto n = static_cast<Eigen::Index>(cfg.traj.size());
    const auto k = static_cast<Eigen::Index>(cfg.room.size());
    Matrix r(2, n), nm(2, k);
    Vector q(k);
    for (Eigen::Index i = 0; i < n; ++i) r.col(i) = cfg.traj.point(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j < k; ++j) {
      nm.col(j) = cfg.room.wall(static_cast<std::size_t>(j)).normal();
      q(j) = cfg.room.wall(static_cast<std::size_t>(j)).offset();
    }
    const Matrix factored = Vector::Ones(n) * q.transpose() - r.transpose() * nm;
    CHECK((d - factored).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(d.minCoeff() > 0.0);
  }
}

TEST_CASE("echo_matrix: noise is reproducible and bounded") {
  const auto cfg = oracle::random_config(11, 5, 8);
  SimConfig sim;
  sim.noise_sigma = 0.05;
  sim.rng_seed = 42;
  const EchoMatrix a = echo_matrix(cfg.room, cfg.traj, sim);
  const EchoMatrix b = echo_matrix(cfg.room, cfg.traj, sim);
  CHECK((a.entries() - b.entries()).cwiseAbs().maxCoeff() == 0.0);
  const Matrix clean = echo_matrix(cfg.room, cfg.traj).entries();
  CHECK((a.entries() - clean).cwiseAbs().maxCoeff() < 5 * 0.05);
  sim.rng_seed = 43;
  CHECK((echo_matrix(cfg.room, cfg.traj, sim).entries() - a.entries()).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("echo_matrix: per-entry streams do not depend on matrix shape") {
  const auto cfg = oracle::random_config(12, 5, 8);
  SimConfig sim;
  sim.noise_sigma = 0.01;
  sim.rng_seed = 9;
  const Matrix full = echo_matrix(cfg.room, cfg.traj, sim).entries() - echo_matrix(cfg.room, cfg.traj).entries();
  const Trajectory first3({cfg.traj.point(0), cfg.traj.point(1), cfg.traj.point(2)});
  const Matrix part = echo_matrix(cfg.room, first3, sim).entries() - echo_matrix(cfg.room, first3).entries();
  CHECK((full.topRows(3) - part).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("noise statistics match the requested sigma") {
  // 12500 x 8 = 100000 draws on a fixed configuration.
  const Room room = unit_square();
  std::vector<Vector> pts(12500, from2d({0.5, 0.5}));
  SimConfig sim;
  sim.noise_sigma = 0.05;
  sim.rng_seed = 2024;
  const Matrix e = echo_matrix(room, Trajectory(pts), sim).entries().array() - 0.5;
  const double count = static_cast<double>(e.size());
  const double mean = e.mean();
  const double var = (e.array() - mean).square().sum() / (count - 1.0);
  const double se_mean = 0.05 / std::sqrt(count);
  const double se_std = 0.05 / std::sqrt(2.0 * (count - 1.0));
  CHECK(std::abs(mean) < 3.0 * se_mean);
  CHECK(std::abs(std::sqrt(var) - 0.05) < 3.0 * se_std);
}

TEST_CASE("echo_matrix: point outside the room names its index") {
  const Trajectory traj({from2d({0.5, 0.5}), from2d({0.2, 0.2}), from2d({1.5, 0.5})});
  try {
    echo_matrix(unit_square(), traj);
    FAIL("expected PointOutsideRoom");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PointOutsideRoom);
    CHECK(e.index() == 2);
    CHECK(std::string(e.what()).find("measurement 2") != std::string::npos);
  }
  // Boundary points are not strictly inside.
  CHECK_THROWS_AS(echo_matrix(unit_square(), Trajectory({from2d({0.0, 0.5})})), Error);
}

TEST_CASE("toa conversions") {
  CHECK(std::abs(toa_of_distance(0.5) - 1.0 / 343.0) < 1e-18);
  CHECK(std::abs(toa_of_distance(0.5) - 2.9155e-3) < 1e-7);
  CHECK(toa_of_distance(0.0) == 0.0);
  CHECK(std::abs(distance_of_toa(toa_of_distance(1.234)) - 1.234) < 1e-15);
  CHECK_THROWS_AS(toa_of_distance(-1e-9), Error);
  try {
    distance_of_toa(-1.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeDistance);
  }
}

TEST_CASE("render_rir: pulses and amplitude models") {
  const Room room = unit_square();
  const RirTrace unit = render_rir(room, from2d({0.5, 0.5}));
  REQUIRE(unit.pulses.size() == 4);
  for (const auto& p : unit.pulses) {
    CHECK(std::abs(p.time - 1.0 / 343.0) < 1e-18);
    CHECK(p.amplitude == 1.0);
  }
  SimConfig inv;
  inv.amplitude_model = AmplitudeModel::InverseDistance;
  const RirTrace inv_trace = render_rir(room, from2d({0.5, 0.5}), inv);
  for (const auto& p : inv_trace.pulses) CHECK(std::abs(p.amplitude - 1.0) < 1e-15);

  SimConfig absorb;
  absorb.wall_absorption = {0.0, 0.5, 0.0, 0.0};
  const RirTrace trace = render_rir(room, from2d({0.2, 0.3}), absorb);
  for (std::size_t k = 1; k < trace.pulses.size(); ++k) CHECK(trace.pulses[k - 1].time <= trace.pulses[k].time);
  for (const auto& p : trace.pulses) {
    CHECK(p.time > 0.0);
    CHECK(p.amplitude == (p.wall_label == "wall-1" ? 0.5 : 1.0));
  }
  CHECK(trace.pulses.front().wall_label == "wall-3");  // x = 0 wall at distance 0.2

  CHECK_THROWS_AS(render_rir(room, from2d({1.2, 0.5})), Error);
  absorb.wall_absorption = {0.0, 1.5, 0.0, 0.0};
  CHECK_THROWS_AS(render_rir(room, from2d({0.5, 0.5}), absorb), Error);
}

TEST_CASE("EchoMatrix: mask handling") {
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  Mask mask(2, 3);
  mask << true, false, true, true, true, true;
  const EchoMatrix d(m, mask, {});
  CHECK_FALSE(d.fully_observed());
  CHECK(d.observed_count() == 5);
  CHECK(std::isnan(d(0, 1)));
  CHECK(d.labels()[2] == "wall-2");
  m(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(EchoMatrix(m, mask, {}), Error);
  CHECK_THROWS_AS(EchoMatrix(Matrix::Ones(2, 3), std::vector<std::string>{"a", "b"}), Error);
}
