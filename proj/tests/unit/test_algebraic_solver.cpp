#include <doctest.h>

#include <cmath>
#include <numbers>

#include "echoroom/algebraic_solver.hpp"
#include "echoroom/ambiguity.hpp"
#include "echoroom/error.hpp"
#include "echoroom/generators.hpp"
#include "echoroom/metrics.hpp"
#include "oracles.hpp"

using namespace echoroom;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an echoroom::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("feasibility: smallest triplets and their decrements") {
  CHECK(feasibility(2, 3, 3));
  CHECK(feasibility(2, 4, 3));
  CHECK(feasibility(2, 5, 3));
  CHECK(feasibility(3, 4, 6));
  CHECK(feasibility(3, 5, 5));
  CHECK(feasibility(3, 6, 4));
  CHECK_FALSE(feasibility(2, 3, 2));
  CHECK_FALSE(feasibility(2, 4, 2));
  CHECK_FALSE(feasibility(2, 5, 2));
  CHECK_FALSE(feasibility(3, 4, 5));
  CHECK_FALSE(feasibility(3, 5, 4));
  CHECK_FALSE(feasibility(3, 6, 3));
}

TEST_CASE("feasibility agrees with the counting inequality") {
  for (int d = 2; d <= 3; ++d)
    for (std::size_t k = static_cast<std::size_t>(d + 1); k < 12; ++k)
      for (std::size_t n = 1; n < 12; ++n) {
        const long lhs = static_cast<long>(k * n);
        const long rhs = d * static_cast<long>(k) + d * static_cast<long>(n) - d * (d + 1) / 2;
        CHECK(feasibility(d, k, n) == (lhs >= rhs));
      }
}

TEST_CASE("solve_noiseless: unit square with three points") {
  const Trajectory traj({from2d({0.2, 0.3}), from2d({0.7, 0.4}), from2d({0.5, 0.8})});
  // A square is a parallelogram: the shear family fits the same echoes, so the
  // solver must refuse rather than pick one member.
  const Room square = room_from_vertices({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(code_of([&] { solve_noiseless(echo_matrix(square, traj)); }) == ErrorCode::AmbiguousConfiguration);

  // Cutting one corner removes the ambiguity.
  const Room cut = room_from_vertices({{0, 0}, {1, 0}, {1, 0.85}, {0.85, 1}, {0, 1}});
  const Reconstruction rec = solve_noiseless(echo_matrix(cut, traj));
  CHECK(rec.max_abs_residual < 1e-9);
  const ErrorReport err = align_and_score(cut, traj, rec.room, rec.trajectory);
  CHECK(err.vertex_error < 1e-9);
  CHECK(err.location_error < 1e-9);
}

TEST_CASE("solve_noiseless: round trip and gauge contract") {
  int failures = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto cfg = oracle::random_config(s + 300, 3 + s % 6, 3 + s % 10);
    const EchoMatrix d = echo_matrix(cfg.room, cfg.traj);
    try {
      const Reconstruction rec = solve_noiseless(d);
      CHECK(rec.trajectory.point(0).norm() == 0.0);
      CHECK(rec.room.wall(0).normal()(0) == 0.0);
      CHECK(rec.room.wall(0).normal()(1) == 1.0);
      CHECK(rec.max_abs_residual < 1e-9);
      for (std::size_t j = 0; j < d.cols(); ++j) CHECK(std::abs(rec.room.wall(j).offset() - d(0, j)) < 1e-12);
      const ErrorReport err = align_and_score(cfg.room, cfg.traj, rec.room, rec.trajectory);
      CHECK(err.vertex_error < 1e-8);
      CHECK(err.location_error < 1e-8);
    } catch (const Error& e) {
      ++failures;
      MESSAGE("flagged failure: " << e.what());
    }
  }
  CHECK(failures <= 1);
}

TEST_CASE("solve_noiseless agrees with the elimination oracle") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto cfg = oracle::random_config(s + 900, 4 + s % 4, 4 + s % 6);
    const EchoMatrix d = echo_matrix(cfg.room, cfg.traj);
    const auto ref = oracle::elimination_solve(d.entries());
    REQUIRE(ref.has_value());
    const auto [ref_room, ref_traj] = geometry_from_unknowns(*ref);
    const Reconstruction rec = solve_noiseless(d);
    // The oracle does not fix chirality, so mirror images are equivalent.
    AlignOptions opts;
    opts.allow_reflection = true;
    const ErrorReport err = align_and_score(ref_room, ref_traj, rec.room, rec.trajectory, opts);
    CHECK(err.vertex_error < 1e-7);
    CHECK(err.location_error < 1e-7);
  }
}

TEST_CASE("solve_noiseless: error classes") {
  const Room square = room_from_vertices({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const Room tri = room_from_vertices({{0, 0}, {1, 0}, {0.3, 0.9}});

  const Trajectory two({from2d({0.2, 0.2}), from2d({0.3, 0.25})});
  CHECK(code_of([&] { solve_noiseless(echo_matrix(tri, two)); }) == ErrorCode::InfeasibleCount);

  const AmbiguousPair col = make_collinear_family(tri, {0.0, 0.3}, {1.0, 0.0}, {0.3, 0.45, 0.6});
  CHECK(code_of([&] { solve_noiseless(col.echoes); }) == ErrorCode::AmbiguousConfiguration);

  const Trajectory inside({from2d({0.2, 0.3}), from2d({0.7, 0.4}), from2d({0.5, 0.8})});
  const AmbiguousPair par = make_parallelogram_family(square, inside, 75.0 * std::numbers::pi / 180.0,
                                                      10.0 * std::numbers::pi / 180.0);
  CHECK(code_of([&] { solve_noiseless(par.echoes); }) == ErrorCode::AmbiguousConfiguration);

  const auto cfg = oracle::random_config(5, 5, 8);
  SimConfig sim;
  sim.noise_sigma = 0.05;
  sim.rng_seed = 3;
  CHECK(code_of([&] { solve_noiseless(echo_matrix(cfg.room, cfg.traj, sim)); }) == ErrorCode::InconsistentData);

  Mask m = Mask::Constant(8, 5, true);
  m(1, 1) = false;
  Matrix e = echo_matrix(cfg.room, cfg.traj).entries();
  e(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK(code_of([&] { solve_noiseless(EchoMatrix(e, m, {})); }) == ErrorCode::MaskedInput);
}

TEST_CASE("solve_noiseless: relaxed threshold for near-noiseless input") {
  const auto cfg = oracle::random_config(6, 5, 8);
  SimConfig sim;
  sim.noise_sigma = 1e-6;
  sim.rng_seed = 4;
  AlgebraicOptions opts;
  opts.noise_sigma = 1e-6;
  const Reconstruction rec = solve_noiseless(echo_matrix(cfg.room, cfg.traj, sim), opts);
  CHECK(rec.max_abs_residual < 10 * 1e-6 * std::sqrt(40.0));
  CHECK(algebraic_estimate(echo_matrix(cfg.room, cfg.traj, sim)).has_value());
}
