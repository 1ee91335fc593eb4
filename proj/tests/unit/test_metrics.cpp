#include <doctest.h>

#include <cmath>

#include "echoroom/error.hpp"
#include "echoroom/metrics.hpp"
#include "echoroom/stress_solver.hpp"
#include "oracles.hpp"

using namespace echoroom;

namespace {

Room unit_square() { return room_from_vertices({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

}  // namespace

TEST_CASE("align_and_score: rigid copies score zero") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto cfg = oracle::random_config(s, 3 + s % 6, 2 + s % 8);
    const auto [room, traj] =
        apply_rigid_motion(cfg.room, cfg.traj, RigidMotion::planar(0.4 * static_cast<double>(s), {1.0, 2.0}));
    const ErrorReport r = align_and_score(cfg.room, cfg.traj, room, traj);
    CHECK(r.vertex_error < 1e-10);
    CHECK(r.location_error < 1e-10);
  }
}

TEST_CASE("align_and_score: identical inputs score exactly zero") {
  const auto cfg = oracle::random_config(3, 5, 6);
  const ErrorReport r = align_and_score(cfg.room, cfg.traj, cfg.room, cfg.traj);
  CHECK(r.vertex_error == 0.0);
  CHECK(r.location_error == 0.0);
  CHECK(r.vertex_error_sum == 0.0);
}

TEST_CASE("align_and_score: one displaced vertex") {
  // Moving the corner (1, 1) to (1.1, 1) changes two walls but keeps the
  // trajectory, so the identity alignment stays optimal.
  const Room truth = unit_square();
  const Room est = room_from_vertices({{0, 0}, {1, 0}, {1.1, 1}, {0, 1}});
  const Trajectory traj({from2d({0.2, 0.3}), from2d({0.7, 0.4}), from2d({0.5, 0.8})});
  const ErrorReport r = align_and_score(truth, traj, est, traj);
  CHECK(std::abs(r.vertex_error - 0.1 / std::sqrt(4.0)) < 1e-12);
  CHECK(std::abs(r.vertex_error_sum - 0.1) < 1e-12);
  CHECK(r.location_error < 1e-15);
  REQUIRE(r.per_vertex.size() == 4);
  CHECK(std::abs(r.per_vertex[2] - 0.1) < 1e-12);
}

TEST_CASE("align_and_score: invariant under motions of the estimate") {
  const auto cfg = oracle::random_config(4, 5, 7);
  SimConfig sim;
  sim.noise_sigma = 0.03;
  sim.rng_seed = 4;
  SolverOptions opts;
  opts.restarts = 10;
  const Reconstruction rec = solve_stress(StressProblem(echo_matrix(cfg.room, cfg.traj, sim)), opts);
  const ErrorReport a = align_and_score(cfg.room, cfg.traj, rec.room, rec.trajectory);
  CHECK(a.location_error > 0.0);
  for (int t = 0; t < 10; ++t) {
    const auto [room, traj] = apply_rigid_motion(rec.room, rec.trajectory, RigidMotion::planar(0.7 * t, {-t, 0.5 * t}));
    const ErrorReport b = align_and_score(cfg.room, cfg.traj, room, traj);
    CHECK(std::abs(a.vertex_error - b.vertex_error) < 1e-9);
    CHECK(std::abs(a.location_error - b.location_error) < 1e-9);
  }
}

TEST_CASE("align_and_score: mirror images need allow_reflection") {
  const auto cfg = oracle::random_config(5, 5, 6);
  Matrix flip(2, 2);
  flip << -1, 0, 0, 1;
  const RigidMotion m(flip, Vector::Zero(2), true);
  const auto [room, traj] = apply_rigid_motion(cfg.room, cfg.traj, m);
  CHECK(align_and_score(cfg.room, cfg.traj, room, traj).location_error > 1e-3);
  AlignOptions opts;
  opts.allow_reflection = true;
  const ErrorReport r = align_and_score(cfg.room, cfg.traj, room, traj, opts);
  CHECK(r.location_error < 1e-10);
  CHECK(r.aligning_motion.is_reflection());
}

TEST_CASE("align_and_score: gauge-fixed mode") {
  const auto cfg = oracle::random_config(6, 4, 5);
  const auto [room, traj] = apply_rigid_motion(cfg.room, cfg.traj, RigidMotion::planar(2.0, {1.0, 1.0}));
  AlignOptions opts;
  opts.gauge_fixed = true;
  const ErrorReport r = align_and_score(cfg.room, cfg.traj, room, traj, opts);
  CHECK(r.vertex_error < 1e-10);
  CHECK(r.location_error < 1e-10);
}

TEST_CASE("align_and_score: single measurement uses the walls") {
  const Room truth = unit_square();
  const Trajectory one({from2d({0.3, 0.6})});
  const auto [room, traj] = apply_rigid_motion(truth, one, RigidMotion::planar(0.9, {2.0, -1.0}));
  const ErrorReport r = align_and_score(truth, one, room, traj);
  CHECK(r.vertex_error < 1e-10);
}

TEST_CASE("align_and_score: label mismatch") {
  const Room a = unit_square();
  const Room b(a.walls(), {"n", "e", "s", "w"});
  const Trajectory t({from2d({0.5, 0.5})});
  try {
    align_and_score(a, t, b, t);
    FAIL("expected LabelMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LabelMismatch);
  }
  const Trajectory two({from2d({0.5, 0.5}), from2d({0.4, 0.5})});
  CHECK_THROWS_AS(align_and_score(a, t, a, two), Error);
}

TEST_CASE("procrustes recovers a known rotation") {
  std::vector<Vector> src, dst;
  const RigidMotion g = RigidMotion::planar(-2.2, {0.1, 0.2});
  for (int i = 0; i < 6; ++i) {
    src.push_back(from2d({std::cos(i * 1.3), std::sin(i * 0.7) + 0.1 * i}));
    dst.push_back(g.apply(src.back()));
  }
  const RigidMotion r = procrustes(src, dst, false);
  CHECK((r.rotation() - g.rotation()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((r.translation() - g.translation()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(procrustes({}, {}, false), Error);
}
