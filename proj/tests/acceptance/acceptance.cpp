// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any selected criterion fails. `--only N` runs a single one.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "echoroom/algebraic_solver.hpp"
#include "echoroom/ambiguity.hpp"
#include "echoroom/error.hpp"
#include "echoroom/io.hpp"
#include "echoroom/metrics.hpp"
#include "echoroom/rank_analysis.hpp"
#include "echoroom/stress_solver.hpp"
#include "echoroom/sweep.hpp"
#include "oracles.hpp"

using namespace echoroom;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Shared by criteria 2 and 3.
std::vector<oracle::Config> roundtrip_instances() {
  std::vector<oracle::Config> out;
  for (std::uint64_t s = 0; s < 100; ++s) out.push_back(oracle::random_config(5000 + s, 3 + s % 5, 3 + s % 10));
  return out;
}

Outcome rank_property() {
  const auto t0 = Clock::now();
  int ok = 0;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto cfg = oracle::random_config(s, 4 + s % 4, 5 + (s / 4) % 8);
    const RankReport r = rank_report(echo_matrix(cfg.room, cfg.traj), 2);
    worst = std::max(worst, r.gap_ratio);
    if (r.gap_ratio < 1e-10) ++ok;
  }
  const double t = seconds_since(t0);
  return {ok == 1000 && t < 5.0,
          std::to_string(ok) + "/1000 below 1e-10, worst " + fmt(worst) + ", " + fmt(t) + " s"};
}

Outcome noiseless_roundtrip() {
  const auto instances = roundtrip_instances();
  const auto t0 = Clock::now();
  int ok = 0, flagged = 0, silent = 0;
  double worst = 0.0;
  for (const auto& cfg : instances) {
    try {
      const Reconstruction rec = solve_noiseless(echo_matrix(cfg.room, cfg.traj));
      const ErrorReport e = align_and_score(cfg.room, cfg.traj, rec.room, rec.trajectory);
      const double err = std::max(e.vertex_error, e.location_error);
      worst = std::max(worst, err);
      if (err < 1e-8) {
        ++ok;
      } else {
        ++silent;
      }
    } catch (const Error&) {
      ++flagged;
    }
  }
  const double t = seconds_since(t0);
  return {ok >= 99 && silent == 0 && t < 10.0,
          std::to_string(ok) + "/100 exact, " + std::to_string(flagged) + " flagged, " + std::to_string(silent) +
              " silent, worst " + fmt(worst) + ", " + fmt(t) + " s"};
}

Outcome stress_optimality() {
  const auto instances = roundtrip_instances();
  const auto t0 = Clock::now();
  int ok = 0;
  double worst_cost = 0.0, worst_err = 0.0;
  std::uint64_t seed = 0;
  for (const auto& cfg : instances) {
    SolverOptions opts;
    opts.rng_seed = seed++;
    const Reconstruction rec = solve_stress(StressProblem(echo_matrix(cfg.room, cfg.traj)), opts);
    const ErrorReport e = align_and_score(cfg.room, cfg.traj, rec.room, rec.trajectory);
    const double err = std::max(e.vertex_error, e.location_error);
    worst_cost = std::max(worst_cost, rec.cost);
    worst_err = std::max(worst_err, err);
    if (rec.cost < 1e-16 && err < 1e-6) ++ok;
  }
  const double t = seconds_since(t0);
  return {ok == 100, std::to_string(ok) + "/100, worst cost " + fmt(worst_cost) + ", worst error " +
                         fmt(worst_err) + ", " + fmt(t) + " s"};
}

Outcome gradient_check() {
  SplitMix64 rng(2);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int ok = 0;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto cfg = oracle::random_config(s + 7000, 3 + s % 5, 3 + s % 8);
    SimConfig sim;
    sim.noise_sigma = 0.05;
    sim.rng_seed = s;
    const StressProblem prob(echo_matrix(cfg.room, cfg.traj, sim));
    const std::size_t k = cfg.room.size(), n = cfg.traj.size();
    GaugedUnknowns p;
    for (std::size_t j = 0; j < k; ++j) {
      p.thetas.push_back(j ? ang(rng) : 0.0);
      p.offsets.push_back(1.0 + u(rng));
    }
    for (std::size_t i = 0; i < n; ++i) {
      p.xs.push_back(i ? u(rng) : 0.0);
      p.ys.push_back(i ? u(rng) : 0.0);
    }
    const Vector g = stress_gradient(p, prob);
    const Vector x = pack_free(p);
    bool good = true;
    for (Eigen::Index c = 0; c < x.size(); ++c) {
      const double h = 1e-6;
      Vector xp = x, xm = x;
      xp(c) += h;
      xm(c) -= h;
      const double fd = (stress_cost(unpack_free(xp, k, n), prob) - stress_cost(unpack_free(xm, k, n), prob)) / (2 * h);
      // Relative error, with unit scale for coordinates whose derivative is near zero.
      const double rel = std::abs(g(c) - fd) / std::max(1.0, std::abs(fd));
      worst = std::max(worst, rel);
      if (!(rel < 1e-6)) good = false;
    }
    if (good) ++ok;
  }
  return {ok == 100, std::to_string(ok) + "/100 points, worst relative error " + fmt(worst)};
}

Outcome noise_sweep() {
  const auto t0 = Clock::now();
  SweepConfig cfg;  // 0:0.005:0.15, 100 trials, N = 8, unit-scale room
  cfg.seed = 2024;
  const SweepResult r = run_sweep(cfg);
  const double t = seconds_since(t0);
  const auto& s = r.summary;
  std::vector<double> sig, vm, lm;
  for (const auto& row : s) {
    sig.push_back(row.sigma);
    vm.push_back(row.vertex_median);
    lm.push_back(row.location_median);
  }
  const bool a = s.front().vertex_median < 1e-6 && s.front().location_median < 1e-6;
  const double rv = spearman(sig, vm), rl = spearman(sig, lm);
  const bool b = rv > 0.95 && rl > 0.95;
  const auto& at05 = s[10];
  const bool c = std::abs(at05.sigma - 0.05) < 1e-12 && at05.vertex_median < 10 * 0.05 &&
                 at05.location_median < 10 * 0.05;
  return {a && b && c && t < 600.0,
          std::string("(a) ") + (a ? "ok" : "no") + " median at 0: " + fmt(s.front().vertex_median) + "/" +
              fmt(s.front().location_median) + "; (b) spearman " + fmt(rv) + "/" + fmt(rl) + "; (c) medians at 0.05: " +
              fmt(at05.vertex_median) + "/" + fmt(at05.location_median) + "; " + fmt(t) + " s"};
}

Outcome ambiguity_witnesses() {
  const auto t0 = Clock::now();
  constexpr double deg = std::numbers::pi / 180.0;
  const Room square = room_from_vertices({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const Trajectory three({from2d({0.2, 0.3}), from2d({0.7, 0.4}), from2d({0.5, 0.8})});
  const AmbiguousPair par = make_parallelogram_family(square, three, 75 * deg, 10 * deg);
  const bool par_ok = par.max_echo_difference < 1e-12 &&
                      !rigid_congruence(par.room_a, par.traj_a, par.room_b, par.traj_b).congruent;
  const Room tri = room_from_vertices({{0, 0}, {1, 0}, {0.3, 0.9}});
  const AmbiguousPair col = make_collinear_family(tri, {0.0, 0.3}, {1.0, 0.0}, {0.3, 0.45, 0.6});
  const bool col_ok = col.max_echo_difference < 1e-12 &&
                      !rigid_congruence(col.room_a, col.traj_a, col.room_b, col.traj_b).congruent;

  // Converse: every zero-cost restart must land on a copy of the truth.
  int distinct = 0, zero_cost = 0;
  for (std::uint64_t s = 0; s < 500; ++s) {
    const auto cfg = oracle::random_config(9000 + s, 4 + s % 4, 5 + (s / 4) % 8);
    const StressProblem prob(echo_matrix(cfg.room, cfg.traj));
    for (std::uint64_t r = 0; r < 50; ++r) {
      SplitMix64 rng(stream_seed(s, {r}));
      const GaugedUnknowns u = refine_stress(prob, restart_sampler(prob.measurements, rng), SolverOptions{});
      if (!(stress_cost(u, prob) < 1e-16)) continue;
      ++zero_cost;
      const auto [room, traj] = geometry_from_unknowns(u);
      if (!rigid_congruence(cfg.room, cfg.traj, room, traj, 1e-6).congruent) ++distinct;
    }
  }
  const double t = seconds_since(t0);
  return {par_ok && col_ok && distinct == 0,
          "parallelogram diff " + fmt(par.max_echo_difference) + (par_ok ? " distinct" : " FAILED") +
              ", collinear diff " + fmt(col.max_echo_difference) + (col_ok ? " distinct" : " FAILED") + ", " +
              std::to_string(zero_cost) + " zero-cost restarts over 500 configurations, " + std::to_string(distinct) +
              " non-congruent, " + fmt(t) + " s"};
}

Outcome completion() {
  const auto cfg = oracle::random_config(4242, 5, 10);
  const Matrix full = echo_matrix(cfg.room, cfg.traj).entries();
  int exact = 0, flagged = 0, silent = 0;
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    // 10 of 50 entries, redrawn until every row and column keeps three.
    SplitMix64 rng(stream_seed(77, {t}));
    Mask m;
    for (;;) {
      m = Mask::Constant(10, 5, true);
      std::vector<int> idx(50);
      for (int i = 0; i < 50; ++i) idx[static_cast<std::size_t>(i)] = i;
      for (int i = 0; i < 10; ++i) {
        std::uniform_int_distribution<int> pick(i, 49);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
        m(idx[static_cast<std::size_t>(i)] / 5, idx[static_cast<std::size_t>(i)] % 5) = false;
      }
      if ((m.rowwise().count().array() >= 3).all() && (m.colwise().count().array() >= 3).all()) break;
    }
    Matrix e = full;
    for (Eigen::Index i = 0; i < 10; ++i)
      for (Eigen::Index j = 0; j < 5; ++j)
        if (!m(i, j)) e(i, j) = std::numeric_limits<double>::quiet_NaN();
    const CompletionResult res = complete_matrix(EchoMatrix(e, m, {}), 2);
    double err = 0.0;
    for (Eigen::Index i = 0; i < 10; ++i)
      for (Eigen::Index j = 0; j < 5; ++j)
        if (!m(i, j)) err = std::max(err, std::abs(res.matrix(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) - full(i, j)));
    worst = std::max(worst, err);
    if (err < 1e-8) {
      ++exact;
    } else if (!res.converged) {
      ++flagged;
    } else {
      ++silent;
    }
  }
  return {exact >= 98 && silent == 0, std::to_string(exact) + "/100 exact, " + std::to_string(flagged) +
                                          " flagged, " + std::to_string(silent) + " silent, worst " + fmt(worst)};
}

Outcome feasibility_table() {
  const int table[6][3] = {{2, 3, 3}, {2, 4, 3}, {2, 5, 3}, {3, 4, 6}, {3, 5, 5}, {3, 6, 4}};
  int ok = 0;
  for (const auto& t : table) {
    const int d = t[0];
    const auto k = static_cast<std::size_t>(t[1]);
    const auto n = static_cast<std::size_t>(t[2]);
    const bool dec_holds = static_cast<long>(k * (n - 1)) >=
                           d * static_cast<long>(k) + d * static_cast<long>(n - 1) - d * (d + 1) / 2;
    if (feasibility(d, k, n) && feasibility(d, k, n - 1) == dec_holds && !dec_holds) ++ok;
  }
  return {ok == 6, std::to_string(ok) + "/6 triplets feasible with infeasible N-1 decrements"};
}

Outcome sweep_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "echoroom_acceptance_sweep";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::vector<std::string> outputs;
  for (int w : {1, 4, 8}) {
    const fs::path out = dir / ("sweep_w" + std::to_string(w) + ".csv");
    const std::string cmd = std::string("env -u ECHOROOM_THREADS '") + ECHOROOM_CLI_PATH +
                            "' sweep --sigma-end 0.03 --trials 8 --restarts 10 --seed 99 --quiet --workers " +
                            std::to_string(w) + " --out '" + out.string() + "'";
    if (std::system(cmd.c_str()) != 0) return {false, "sweep command failed: " + cmd};
    outputs.push_back(read_text_file(out.string()) + read_text_file((dir / ("sweep_w" + std::to_string(w) + ".summary.csv")).string()));
  }
  fs::remove_all(dir);
  const bool same = outputs[0] == outputs[1] && outputs[0] == outputs[2];
  return {same && !outputs[0].empty(),
          std::string(same ? "identical" : "different") + " output at 1, 4 and 8 workers (" +
              std::to_string(outputs[0].size()) + " bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int a = 1; a < argc; ++a) {
    if (std::string(argv[a]) == "--only" && a + 1 < argc) only = std::atoi(argv[++a]);
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"rank property", rank_property},
      {"noiseless round trip", noiseless_roundtrip},
      {"stress solver optimality", stress_optimality},
      {"gradient correctness", gradient_check},
      {"noise sweep", noise_sweep},
      {"ambiguity witnesses", ambiguity_witnesses},
      {"completion", completion},
      {"feasibility table", feasibility_table},
      {"sweep determinism", sweep_determinism},
  };
  bool all = true;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    if (only && static_cast<int>(c + 1) != only) continue;
    Outcome o;
    try {
      o = criteria[c].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", c + 1, criteria[c].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
