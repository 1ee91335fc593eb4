// echoroom command-line front end.
//
//   echoroom simulate  --room-gen square --traj-gen "random-interior 5 1" --sigma 0.01 --seed 1
//   echoroom solve     echoes.csv --mode auto --out rec.json
//   echoroom sweep     --trials 100 --workers 4 --out sweep.csv
//   echoroom ambiguity --family parallelogram --alpha 75 --beta 10
//   echoroom complete  masked.csv --out full.csv
//   echoroom rank      echoes.csv
//
// Exit codes: 0 success, 2 invalid input, 3 no convergence, 4 ambiguous
// configuration, 130 interrupted sweep.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "echoroom/ambiguity.hpp"
#include "echoroom/error.hpp"
#include "echoroom/generators.hpp"
#include "echoroom/io.hpp"
#include "echoroom/metrics.hpp"
#include "echoroom/pipeline.hpp"
#include "echoroom/rank_analysis.hpp"
#include "echoroom/sweep.hpp"

using namespace echoroom;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitAmbiguous = 4;
constexpr int kExitInterrupted = 130;
constexpr double kDeg = std::numbers::pi / 180.0;

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted.store(true); }

struct GeometryArgs {
  std::string room_file;
  std::string traj_file;
  std::string room_gen;
  std::string traj_gen;

  void add_to(CLI::App* app) {
    app->add_option("--room", room_file, "room JSON (walls or vertices form)");
    app->add_option("--traj", traj_file, "trajectory JSON");
    app->add_option("--room-gen", room_gen, "room generator, e.g. \"rect 2 1\" or \"random-convex 5 7\"");
    app->add_option("--traj-gen", traj_gen, "trajectory generator, e.g. \"random-interior 8 1\"");
  }

  bool given() const { return !room_file.empty() || !room_gen.empty(); }

  Room room() const {
    if (!room_file.empty() && !room_gen.empty()) {
      throw Error(ErrorCode::InvalidArgument, "give either --room or --room-gen, not both");
    }
    if (!room_file.empty()) return room_from_json(read_json_file(room_file));
    if (!room_gen.empty()) return room_from_spec(room_gen);
    throw Error(ErrorCode::InvalidArgument, "a room is required (--room or --room-gen)");
  }

  Trajectory trajectory(const Room& room) const {
    if (!traj_file.empty() && !traj_gen.empty()) {
      throw Error(ErrorCode::InvalidArgument, "give either --traj or --traj-gen, not both");
    }
    if (!traj_file.empty()) return trajectory_from_json(read_json_file(traj_file));
    if (!traj_gen.empty()) return trajectory_from_spec(room, traj_gen);
    if (!room_file.empty()) {
      const Json doc = read_json_file(room_file);
      if (doc.contains("trajectory")) return trajectory_from_json(doc);
    }
    throw Error(ErrorCode::InvalidArgument, "a trajectory is required (--traj or --traj-gen)");
  }
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text_file(path, text);
  }
}

EchoMatrix load_echoes(const std::string& path) {
  return parse_echo_csv(path == "-" ? std::string(std::istreambuf_iterator<char>(std::cin), {})
                                    : read_text_file(path));
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

int default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(hw == 0 ? 1 : hw);
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  GeometryArgs geo;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  double speed = 343.0;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  const Room room = a.geo.room();
  const Trajectory traj = a.geo.trajectory(room);
  SimConfig cfg;
  cfg.noise_sigma = a.sigma;
  cfg.rng_seed = a.seed;
  cfg.speed_of_sound = a.speed;
  cfg.validate(room.size());
  const EchoMatrix d = echo_matrix(room, traj, cfg);
  CsvMetadata meta{{"quantity", "distance_m"},
                   {"sigma", format_double(a.sigma)},
                   {"seed", std::to_string(a.seed)},
                   {"speed_of_sound", format_double(a.speed)}};
  emit(a.out, echo_csv(d, meta));
  return 0;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string input;
  std::string mode = "auto";
  int restarts = 50;
  int max_iters = 500;
  std::uint64_t seed = 0;
  int workers = 1;
  double sigma = 0.0;
  std::string out;
  GeometryArgs truth;
};

int cmd_solve(const SolveArgs& a) {
  const EchoMatrix d = load_echoes(a.input);
  PipelineOptions opts;
  opts.mode = parse_solve_mode(a.mode);
  opts.stress.restarts = a.restarts;
  opts.stress.max_iters = a.max_iters;
  opts.stress.rng_seed = a.seed;
  opts.stress.workers = effective_workers(a.workers);
  opts.algebraic.noise_sigma = a.sigma;
  if (a.restarts < 1 || a.max_iters < 1) throw Error(ErrorCode::InvalidArgument, "restarts and max-iters must be positive");

  std::optional<PipelineResult> solved;
  try {
    solved = solve(d, opts);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AmbiguousConfiguration && e.code() != ErrorCode::InconsistentData) throw;
    Json doc{{"format", "echoroom-reconstruction v1"}, {"error", to_string(e.code())}, {"message", e.what()}};
    if (!a.out.empty()) write_text_file(a.out, doc.dump(2) + "\n");
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::AmbiguousConfiguration ? kExitAmbiguous : kExitNoConvergence;
  }
  const PipelineResult& res = *solved;
  const Reconstruction& rec = res.reconstruction;
  Json doc = reconstruction_to_json(rec);
  doc["converged"] = res.converged;
  if (res.completion) {
    doc["completion"] = Json{{"converged", res.completion->converged},
                             {"iterations", res.completion->iterations},
                             {"observed_rms", res.completion->observed_rms}};
  }
  if (a.truth.given()) {
    const Room room = a.truth.room();
    const Trajectory traj = a.truth.trajectory(room);
    doc["errors"] = error_report_to_json(align_and_score(room, traj, rec.room, rec.trajectory));
  }
  emit(a.out, doc.dump(2) + "\n");

  std::ostream& log = (a.out.empty() || a.out == "-") ? std::cerr : std::cout;
  log << "mode=" << a.mode << " cost=" << format_double(rec.cost)
      << " max_abs_residual=" << format_double(rec.max_abs_residual)
      << " converged=" << (res.converged ? "true" : "false") << "\n";
  for (const auto& note : rec.diagnostics.notes) log << "note: " << note << "\n";
  if (rec.diagnostics.ambiguity_suspected || rec.diagnostics.collinear_suspected) return kExitAmbiguous;
  if (!res.converged) return kExitNoConvergence;
  return 0;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  GeometryArgs geo;
  double sigma_start = 0.0;
  double sigma_end = 0.15;
  double sigma_step = 0.005;
  int trials = 100;
  int restarts = 50;
  int max_iters = 500;
  std::string mode = "auto";
  std::uint64_t seed = 0;
  int workers = 0;
  std::string out = "sweep.csv";
  std::string summary;
  bool quiet = false;
};

int cmd_sweep(const SweepArgs& a) {
  SweepConfig cfg;
  cfg.sigma_start = a.sigma_start;
  cfg.sigma_end = a.sigma_end;
  cfg.sigma_step = a.sigma_step;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.workers = a.workers > 0 ? a.workers : default_workers();
  cfg.pipeline.mode = parse_solve_mode(a.mode);
  cfg.pipeline.stress.restarts = a.restarts;
  cfg.pipeline.stress.max_iters = a.max_iters;
  if (!a.geo.room_file.empty()) {
    cfg.room = a.geo.room();
    cfg.trajectory = a.geo.trajectory(*cfg.room);
  } else {
    if (!a.geo.room_gen.empty()) cfg.room_spec = a.geo.room_gen;
    if (!a.geo.traj_gen.empty()) cfg.traj_spec = a.geo.traj_gen;
    if (!a.geo.traj_file.empty()) {
      cfg.room = room_from_spec(cfg.room_spec);
      cfg.trajectory = trajectory_from_json(read_json_file(a.geo.traj_file));
    }
  }
  cfg.validate();

  std::signal(SIGINT, on_sigint);
  std::size_t last_percent = 101;
  const SweepResult res = run_sweep(cfg, &g_interrupted, [&](std::size_t done, std::size_t total) {
    const std::size_t percent = done * 100 / total;
    if (!a.quiet && percent != last_percent) {
      last_percent = percent;
      std::cerr << "\rsweep " << done << "/" << total << std::flush;
    }
  });
  if (!a.quiet) std::cerr << "\n";
  std::signal(SIGINT, SIG_DFL);

  emit(a.out, sweep_csv(res));
  const std::string summary = a.summary.empty() && !a.out.empty() && a.out != "-"
                                  ? sibling_path(a.out, ".summary.csv")
                                  : a.summary;
  if (!summary.empty()) emit(summary, sweep_summary_csv(res));
  if (res.interrupted) {
    std::cerr << "interrupted: wrote " << res.rows.size() << " completed trials\n";
    return kExitInterrupted;
  }
  return 0;
}

// ---------------------------------------------------------------- ambiguity

struct AmbiguityArgs {
  std::string family = "parallelogram";
  double alpha = 75.0;
  double beta = 10.0;
  GeometryArgs geo;
  std::vector<double> point{0.0, 0.3};
  std::vector<double> direction{1.0, 0.0};
  std::vector<double> offsets{0.3, 0.45, 0.6};
  std::vector<std::size_t> reflect;
  std::string out;
};

int cmd_ambiguity(const AmbiguityArgs& a) {
  std::optional<AmbiguousPair> pair;
  if (a.family == "parallelogram") {
    const Room base = a.geo.given() ? a.geo.room() : square_room();
    Trajectory traj = [&] {
      if (!a.geo.traj_file.empty() || !a.geo.traj_gen.empty() || !a.geo.room_file.empty()) {
        try {
          return a.geo.trajectory(base);
        } catch (const Error&) {
          if (!a.geo.traj_file.empty() || !a.geo.traj_gen.empty()) throw;
        }
      }
      return Trajectory({from2d({0.45, 0.5}), from2d({0.5, 0.55}), from2d({0.55, 0.45})});
    }();
    pair = make_parallelogram_family(base, traj, a.alpha * kDeg, a.beta * kDeg);
  } else if (a.family == "collinear") {
    const Room room = a.geo.given() ? a.geo.room() : room_from_vertices({{0.0, 0.0}, {1.0, 0.0}, {0.3, 0.9}});
    std::optional<std::vector<std::size_t>> reflect;
    if (!a.reflect.empty()) reflect = a.reflect;
    pair = make_collinear_family(room, {a.point[0], a.point[1]}, {a.direction[0], a.direction[1]}, a.offsets,
                                 reflect);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown family '" + a.family + "' (parallelogram, collinear)");
  }
  const CongruenceResult verdict = rigid_congruence(pair->room_a, pair->traj_a, pair->room_b, pair->traj_b);
  const Json bundle = ambiguous_pair_to_json(*pair, verdict);
  if (a.out.empty()) {
    std::cout << bundle.dump(2) << "\n";
  } else {
    std::filesystem::create_directories(a.out);
    const std::filesystem::path dir(a.out);
    write_text_file((dir / "a.json").string(),
                    Json{{"room", room_to_json(pair->room_a)}, {"trajectory", trajectory_to_json(pair->traj_a)}}
                            .dump(2) + "\n");
    write_text_file((dir / "b.json").string(),
                    Json{{"room", room_to_json(pair->room_b)}, {"trajectory", trajectory_to_json(pair->traj_b)}}
                            .dump(2) + "\n");
    write_text_file((dir / "echoes.csv").string(), echo_csv(pair->echoes, {{"quantity", "distance_m"}}));
    write_text_file((dir / "bundle.json").string(), bundle.dump(2) + "\n");
  }
  std::ostream& log = a.out.empty() ? std::cerr : std::cout;
  log << "family=" << a.family << " max_echo_difference=" << format_double(pair->max_echo_difference)
      << " verdict=" << (verdict.congruent ? "congruent" : "distinct")
      << " congruence_error=" << format_double(verdict.max_error) << "\n";
  return 0;
}

// ---------------------------------------------------------------- complete

struct CompleteArgs {
  std::string input;
  int max_iters = 500;
  std::string out;
};

int cmd_complete(const CompleteArgs& a) {
  const EchoMatrix d = load_echoes(a.input);
  CompletionOptions opts;
  opts.max_iters = a.max_iters;
  const CompletionResult res = complete_matrix(d, 2, opts);
  emit(a.out, echo_csv(res.matrix, {{"quantity", "distance_m"},
                                    {"completed", res.converged ? "converged" : "not-converged"}}));
  std::cerr << "iterations=" << res.iterations << " observed_rms=" << format_double(res.observed_rms)
            << " converged=" << (res.converged ? "true" : "false") << "\n";
  return res.converged ? 0 : kExitNoConvergence;
}

// ---------------------------------------------------------------- rank

struct RankArgs {
  std::string input;
  GeometryArgs geo;
  double tol = 1e-10;
};

int cmd_rank(const RankArgs& a) {
  std::optional<EchoMatrix> d;
  if (!a.input.empty()) {
    d = load_echoes(a.input);
  } else {
    const Room room = a.geo.room();
    d = echo_matrix(room, a.geo.trajectory(room));
  }
  const RankReport r = rank_report(*d, 2, a.tol);
  const Json doc{{"rows", d->rows()},
                 {"cols", d->cols()},
                 {"singular_values", r.singular_values},
                 {"numerical_rank", r.numerical_rank},
                 {"gap_ratio", r.gap_ratio}};
  std::cout << doc.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Room geometry and trajectory reconstruction from first-order echoes"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "write the echo matrix of a room and trajectory as CSV");
  sim.geo.add_to(s);
  s->add_option("--sigma", sim.sigma, "noise standard deviation (m)");
  s->add_option("--seed", sim.seed, "noise seed");
  s->add_option("--speed-of-sound", sim.speed, "m/s");
  s->add_option("--out", sim.out, "output CSV (default stdout)");

  SolveArgs sol;
  auto* v = app.add_subcommand("solve", "reconstruct room and trajectory from an echo CSV");
  v->add_option("input", sol.input, "echo CSV ('-' for stdin)")->required();
  v->add_option("--mode", sol.mode, "algebraic | stress | auto");
  v->add_option("--restarts", sol.restarts, "stress solver restarts");
  v->add_option("--max-iters", sol.max_iters, "iteration cap per restart");
  v->add_option("--seed", sol.seed, "restart seed");
  v->add_option("--workers", sol.workers, "threads for restarts");
  v->add_option("--sigma", sol.sigma, "expected noise level for the algebraic acceptance test");
  v->add_option("--out", sol.out, "reconstruction JSON (default stdout)");
  v->add_option("--truth-room", sol.truth.room_file, "score against this room");
  v->add_option("--truth-traj", sol.truth.traj_file, "score against this trajectory");

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "noise sweep: simulate, solve and score over a sigma grid");
  sw.geo.add_to(w);
  w->add_option("--sigma-start", sw.sigma_start, "first noise level (m)");
  w->add_option("--sigma-end", sw.sigma_end, "last noise level (m), inclusive");
  w->add_option("--sigma-step", sw.sigma_step, "grid spacing (m)");
  w->add_option("--trials", sw.trials, "trials per sigma");
  w->add_option("--restarts", sw.restarts, "stress solver restarts");
  w->add_option("--max-iters", sw.max_iters, "iteration cap per restart");
  w->add_option("--mode", sw.mode, "algebraic | stress | auto");
  w->add_option("--seed", sw.seed, "master seed");
  w->add_option("--workers", sw.workers, "worker threads (default: all cores, capped by ECHOROOM_THREADS)");
  w->add_option("--out", sw.out, "per-trial CSV");
  w->add_option("--summary", sw.summary, "per-sigma CSV (default: <out>.summary.csv)");
  w->add_flag("--quiet", sw.quiet, "no progress output");

  AmbiguityArgs am;
  auto* m = app.add_subcommand("ambiguity", "construct two configurations with identical echoes");
  m->add_option("--family", am.family, "parallelogram | collinear");
  m->add_option("--alpha", am.alpha, "parallelogram: first normal angle (degrees)");
  m->add_option("--beta", am.beta, "parallelogram: second normal angle (degrees)");
  am.geo.add_to(m);
  m->add_option("--point", am.point, "collinear: point on the line")->expected(2);
  m->add_option("--direction", am.direction, "collinear: line direction")->expected(2);
  m->add_option("--offsets", am.offsets, "collinear: positions along the line")->expected(1, 1 << 20);
  m->add_option("--reflect", am.reflect, "collinear: walls to mirror (default: automatic)")->expected(1, 1 << 20);
  m->add_option("--out", am.out, "output directory (default: bundle JSON on stdout)");

  CompleteArgs co;
  auto* c = app.add_subcommand("complete", "fill missing echo entries by low-rank completion");
  c->add_option("input", co.input, "echo CSV with empty fields ('-' for stdin)")->required();
  c->add_option("--max-iters", co.max_iters, "alternating least squares sweeps");
  c->add_option("--out", co.out, "output CSV (default stdout)");

  RankArgs rk;
  auto* r = app.add_subcommand("rank", "singular values and numerical rank of an echo matrix");
  r->add_option("input", rk.input, "echo CSV");
  rk.geo.add_to(r);
  r->add_option("--tol", rk.tol, "relative rank tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*s) return cmd_simulate(sim);
    if (*v) return cmd_solve(sol);
    if (*w) return cmd_sweep(sw);
    if (*m) return cmd_ambiguity(am);
    if (*c) return cmd_complete(co);
    if (*r) return cmd_rank(rk);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
