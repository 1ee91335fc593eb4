#include "echoroom/stress_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "echoroom/algebraic_solver.hpp"
#include "echoroom/ambiguity.hpp"
#include "echoroom/error.hpp"

namespace echoroom {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_angle(double t) {
  t = std::fmod(t + kPi, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  return t - kPi;
}

std::size_t free_size(std::size_t k, std::size_t n) { return (k - 1) + k + 2 * (n - 1); }

// Residuals e_ij = d_ij - q_j + s_j x_i + c_j y_i.
Matrix residuals(const GaugedUnknowns& u, const Matrix& d) {
  Matrix e(d.rows(), d.cols());
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    const double s = std::sin(u.thetas[j]);
    const double c = std::cos(u.thetas[j]);
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      e(i, j) = d(i, j) - u.offsets[j] + s * u.xs[i] + c * u.ys[i];
    }
  }
  return e;
}

double weighted_cost(const Matrix& e, const Matrix& w) { return (w.array() * e.array().square()).sum(); }

// Jacobian of the residuals over the free coordinates, one row per (i, j) with
// row index j * N + i.
Matrix jacobian(const GaugedUnknowns& u, std::size_t n, std::size_t k) {
  Matrix jac = Matrix::Zero(n * k, free_size(k, n));
  const std::size_t q0 = k - 1;
  const std::size_t r0 = q0 + k;
  for (std::size_t j = 0; j < k; ++j) {
    const double s = std::sin(u.thetas[j]);
    const double c = std::cos(u.thetas[j]);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t row = j * n + i;
      if (j > 0) jac(row, j - 1) = u.xs[i] * c - u.ys[i] * s;
      jac(row, q0 + j) = -1.0;
      if (i > 0) {
        jac(row, r0 + 2 * (i - 1)) = s;
        jac(row, r0 + 2 * (i - 1) + 1) = c;
      }
    }
  }
  return jac;
}

Vector stacked(const Matrix& m) {
  // Column-major flattening matches the j * N + i row order.
  return Eigen::Map<const Vector>(m.data(), m.size());
}

// Block step (a): with the angles fixed, solve the linear least-squares
// problem for the offsets and the free locations exactly.
void solve_positions(GaugedUnknowns& u, const Matrix& d, const Matrix& w) {
  const std::size_t n = u.points();
  const std::size_t k = u.walls();
  const std::size_t dim = k + 2 * (n - 1);
  Matrix h = Matrix::Zero(dim, dim);
  Vector rhs = Vector::Zero(dim);
  for (std::size_t j = 0; j < k; ++j) {
    const Eigen::Vector2d nj(std::sin(u.thetas[j]), std::cos(u.thetas[j]));
    for (std::size_t i = 0; i < n; ++i) {
      const double wij = w(i, j);
      if (wij == 0.0) continue;
      const double dij = d(i, j);
      h(j, j) += wij;
      rhs(j) += wij * dij;
      if (i == 0) continue;
      const std::size_t r = k + 2 * (i - 1);
      const Eigen::Vector2d wn = wij * nj;
      h(j, r) -= wn.x();
      h(j, r + 1) -= wn.y();
      h(r, j) -= wn.x();
      h(r + 1, j) -= wn.y();
      h.block<2, 2>(r, r) += wn * nj.transpose();
      rhs.segment<2>(r) -= dij * wn;
    }
  }
  Eigen::LDLT<Matrix> ldlt(h);
  Vector z;
  if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
      ldlt.vectorD().minCoeff() > 1e-12 * ldlt.vectorD().maxCoeff()) {
    z = ldlt.solve(rhs);
  } else {
    z = h.completeOrthogonalDecomposition().solve(rhs);
  }
  for (std::size_t j = 0; j < k; ++j) u.offsets[j] = z(j);
  for (std::size_t i = 1; i < n; ++i) {
    u.xs[i] = z(k + 2 * (i - 1));
    u.ys[i] = z(k + 2 * (i - 1) + 1);
  }
}

// f(theta) = sum_i w_i (beta_i + x_i sin(theta) + y_i cos(theta))^2 written as
// a trigonometric polynomial of degree two.
struct AngleObjective {
  double c0, c2, s2, c1, s1;

  double value(double t) const {
    return c0 + c2 * std::cos(2 * t) + s2 * std::sin(2 * t) + c1 * std::cos(t) + s1 * std::sin(t);
  }
  double slope(double t) const {
    return -2 * c2 * std::sin(2 * t) + 2 * s2 * std::cos(2 * t) - c1 * std::sin(t) + s1 * std::cos(t);
  }
  double curvature(double t) const {
    return -4 * c2 * std::cos(2 * t) - 4 * s2 * std::sin(2 * t) - c1 * std::cos(t) - s1 * std::sin(t);
  }
};

double minimize_angle(const AngleObjective& f, double current) {
  // A degree-two trigonometric polynomial has at most two local minima; a
  // 32-point scan lands in the basin of the global one, Newton finishes it.
  constexpr int kSamples = 32;
  double best_t = 0.0;
  double best_f = std::numeric_limits<double>::infinity();
  for (int s = 0; s < kSamples; ++s) {
    const double t = -kPi + 2.0 * kPi * s / kSamples;
    const double v = f.value(t);
    if (v < best_f) {
      best_f = v;
      best_t = t;
    }
  }
  double t = best_t;
  for (int it = 0; it < 30; ++it) {
    const double g = f.slope(t);
    const double h = f.curvature(t);
    double step = h > 0.0 ? -g / h : -std::copysign(0.05, g);
    step = std::clamp(step, -0.2, 0.2);
    double next = t + step;
    while (f.value(next) > f.value(t) && std::abs(step) > 1e-16) {
      step *= 0.5;
      next = t + step;
    }
    if (f.value(next) > f.value(t)) break;
    t = next;
    if (std::abs(step) < 1e-15) break;
  }
  return f.value(t) < f.value(current) ? wrap_angle(t) : current;
}

// Block step (b): with offsets and locations fixed, each angle (except the
// gauge-fixed first one) is an independent one-dimensional problem.
void solve_angles(GaugedUnknowns& u, const Matrix& d, const Matrix& w) {
  const std::size_t n = u.points();
  for (std::size_t j = 1; j < u.walls(); ++j) {
    double c0 = 0, mxx = 0, mxy = 0, myy = 0, gx = 0, gy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double wij = w(i, j);
      const double beta = d(i, j) - u.offsets[j];
      const double x = u.xs[i];
      const double y = u.ys[i];
      c0 += wij * beta * beta;
      mxx += wij * x * x;
      mxy += wij * x * y;
      myy += wij * y * y;
      gx += wij * beta * x;
      gy += wij * beta * y;
    }
    const AngleObjective f{c0 + 0.5 * (mxx + myy), 0.5 * (myy - mxx), mxy, 2.0 * gy, 2.0 * gx};
    u.thetas[j] = minimize_angle(f, u.thetas[j]);
  }
}

struct PolishResult {
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
};

Vector gradient_of(const GaugedUnknowns& u, const Matrix& d, const Vector& sw, std::size_t n, std::size_t k) {
  return (sw.asDiagonal() * jacobian(u, n, k)).transpose() * sw.cwiseProduct(stacked(residuals(u, d)));
}

PolishResult polish(GaugedUnknowns& u, const Matrix& d, const Matrix& w, const SolverOptions& opts) {
  const std::size_t n = u.points();
  const std::size_t k = u.walls();
  const Vector sw = stacked(w.array().sqrt().matrix());
  Vector p = pack_free(u);
  Matrix e = residuals(u, d);
  double cost = weighted_cost(e, w);
  double lambda = -1.0;
  double nu = 2.0;
  PolishResult out;
  for (int it = 0; it < opts.max_iters; ++it) {
    const Matrix jac = sw.asDiagonal() * jacobian(u, n, k);
    const Vector ev = sw.cwiseProduct(stacked(e));
    const Matrix h = jac.transpose() * jac;
    const Vector g = jac.transpose() * ev;
    out.gradient_norm = 2.0 * g.norm();
    if (out.gradient_norm < opts.grad_tol || cost == 0.0) {
      out.converged = true;
      break;
    }
    const Vector diag = h.diagonal().cwiseMax(1e-12 * std::max(1.0, h.diagonal().maxCoeff()));
    if (lambda < 0.0) lambda = 1e-6 * diag.maxCoeff();
    bool accepted = false;
    bool negligible = false;
    for (int tries = 0; tries < 60 && !accepted; ++tries) {
      Matrix damped = h;
      damped.diagonal() += lambda * diag;
      const Vector step = -damped.ldlt().solve(g);
      if (step.allFinite()) {
        const GaugedUnknowns trial = unpack_free(p + step, k, n);
        const Matrix e_trial = residuals(trial, d);
        const double c_trial = weighted_cost(e_trial, w);
        const double predicted = -(2.0 * g.dot(step) + step.dot(h * step));
        const double rho = predicted > 0.0 ? (cost - c_trial) / predicted : -1.0;
        // Near a minimum with nonzero cost the decrease can drop below the
        // rounding of the cost itself; then a smaller gradient decides.
        const bool tie = std::abs(c_trial - cost) <= 1e-13 * cost && lambda <= 1e-6 * diag.maxCoeff() &&
                         gradient_of(trial, d, sw, n, k).norm() < g.norm();
        if ((c_trial < cost && rho > 0.0) || tie) {
          negligible = step.norm() <= 1e-15 * (p.norm() + 1e-15);
          p += step;
          u = trial;
          e = e_trial;
          cost = c_trial;
          if (!tie) lambda *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
          nu = 2.0;
          accepted = true;
          continue;
        }
      }
      lambda *= nu;
      nu *= 2.0;
    }
    out.iterations = it + 1;
    // No descent direction left at working precision.
    if (!accepted || negligible) break;
  }
  if (!out.converged) {
    const Matrix jac = sw.asDiagonal() * jacobian(u, n, k);
    out.gradient_norm = 2.0 * (jac.transpose() * sw.cwiseProduct(stacked(e))).norm();
    out.converged = out.gradient_norm < opts.grad_tol;
  }
  for (auto& t : u.thetas) t = wrap_angle(t);
  u.thetas[0] = 0.0;
  return out;
}

void check_problem(const StressProblem& problem) {
  const EchoMatrix& d = problem.measurements;
  if (!d.fully_observed()) {
    throw Error(ErrorCode::MaskedInput, "stress solver needs a fully observed matrix; complete it first");
  }
  if (d.cols() < 3 || d.rows() < 1 || !feasibility(2, d.cols(), d.rows())) {
    throw Error(ErrorCode::InfeasibleCount,
                "K N >= 2 K + 2 N - 3 fails for K = " + std::to_string(d.cols()) +
                    ", N = " + std::to_string(d.rows()));
  }
}

}  // namespace

StressProblem::StressProblem(EchoMatrix d, Matrix w) : measurements(std::move(d)), weights(std::move(w)) {
  if (weights.size() == 0) weights = Matrix::Ones(measurements.rows(), measurements.cols());
  if (static_cast<std::size_t>(weights.rows()) != measurements.rows() ||
      static_cast<std::size_t>(weights.cols()) != measurements.cols()) {
    throw Error(ErrorCode::InvalidArgument, "weights shape differs from the echo matrix");
  }
  if (!(weights.array() >= 0.0).all() || !weights.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "weights must be finite and nonnegative");
  }
}

double stress_cost(const GaugedUnknowns& params, const StressProblem& problem) {
  return weighted_cost(residuals(params, problem.measurements.entries()), problem.weights);
}

Vector stress_gradient(const GaugedUnknowns& params, const StressProblem& problem) {
  const std::size_t n = params.points();
  const std::size_t k = params.walls();
  const Matrix e = residuals(params, problem.measurements.entries());
  const Vector we = stacked(problem.weights).cwiseProduct(stacked(e));
  return 2.0 * jacobian(params, n, k).transpose() * we;
}

Vector pack_free(const GaugedUnknowns& params) {
  const std::size_t k = params.walls();
  const std::size_t n = params.points();
  Vector p(free_size(k, n));
  for (std::size_t j = 1; j < k; ++j) p(j - 1) = params.thetas[j];
  for (std::size_t j = 0; j < k; ++j) p(k - 1 + j) = params.offsets[j];
  for (std::size_t i = 1; i < n; ++i) {
    p(2 * k - 1 + 2 * (i - 1)) = params.xs[i];
    p(2 * k - 1 + 2 * (i - 1) + 1) = params.ys[i];
  }
  return p;
}

GaugedUnknowns unpack_free(const Vector& free, std::size_t walls, std::size_t points) {
  if (static_cast<std::size_t>(free.size()) != free_size(walls, points)) {
    throw Error(ErrorCode::InvalidArgument, "free-coordinate vector has the wrong length");
  }
  GaugedUnknowns u;
  u.thetas.assign(walls, 0.0);
  u.offsets.assign(walls, 0.0);
  u.xs.assign(points, 0.0);
  u.ys.assign(points, 0.0);
  for (std::size_t j = 1; j < walls; ++j) u.thetas[j] = free(j - 1);
  for (std::size_t j = 0; j < walls; ++j) u.offsets[j] = free(walls - 1 + j);
  for (std::size_t i = 1; i < points; ++i) {
    u.xs[i] = free(2 * walls - 1 + 2 * (i - 1));
    u.ys[i] = free(2 * walls - 1 + 2 * (i - 1) + 1);
  }
  return u;
}

GaugedUnknowns restart_sampler(const EchoMatrix& d, SplitMix64& rng) {
  const std::size_t n = d.rows();
  const std::size_t k = d.cols();
  double rho = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (d.observed(i, j)) rho = std::max(rho, d(i, j));
    }
  }
  if (!(rho > 0.0)) rho = 1.0;
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> coord(-rho, rho);
  GaugedUnknowns u;
  for (std::size_t j = 0; j < k; ++j) {
    const double t = angle(rng);
    u.thetas.push_back(j == 0 ? 0.0 : t);
    u.offsets.push_back(std::max(0.0, d(0, j)));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double x = coord(rng);
    u.xs.push_back(i == 0 ? 0.0 : x);
    u.ys.push_back(i == 0 ? 0.0 : d(0, 0) - d(i, 0));
  }
  return u;
}

GaugedUnknowns refine_stress(const StressProblem& problem, GaugedUnknowns start,
                             const SolverOptions& opts, RestartRecord* record,
                             int* descent_violations) {
  const Matrix& d = problem.measurements.entries();
  const Matrix& w = problem.weights;
  GaugedUnknowns u = std::move(start);
  u.thetas[0] = 0.0;
  u.xs[0] = 0.0;
  u.ys[0] = 0.0;
  double cost = weighted_cost(residuals(u, d), w);
  RestartRecord rec;
  rec.initial_cost = cost;
  int violations = 0;
  int it = 0;
  const int alternation_cap = std::min(opts.max_iters, opts.alternation_iters);
  while (it < alternation_cap) {
    ++it;
    const double before = cost;
    solve_positions(u, d, w);
    const double mid = weighted_cost(residuals(u, d), w);
    solve_angles(u, d, w);
    cost = weighted_cost(residuals(u, d), w);
    const double slack = 1e-12 * (1.0 + before);
    if (mid > before + slack || cost > mid + slack) ++violations;
    if (before - cost < std::max(opts.cost_tol, opts.alternation_rel_tol * cost)) break;
  }
  rec.alternating_iters = it;
  const PolishResult pr = polish(u, d, w, opts);
  rec.polish_iters = pr.iterations;
  rec.converged = pr.converged;
  rec.gradient_norm = pr.gradient_norm;
  rec.final_cost = weighted_cost(residuals(u, d), w);
  if (record) *record = rec;
  if (descent_violations) *descent_violations += violations;
  return u;
}

Reconstruction solve_stress(const StressProblem& problem, const SolverOptions& opts) {
  check_problem(problem);
  if (opts.restarts < 1) throw Error(ErrorCode::InvalidArgument, "restarts must be at least 1");
  const EchoMatrix& d = problem.measurements;
  const std::size_t count = static_cast<std::size_t>(opts.restarts);

  std::vector<GaugedUnknowns> finals(count);
  std::vector<RestartRecord> records(count);
  std::vector<int> violations(count, 0);
  auto run = [&](std::size_t r) {
    GaugedUnknowns start;
    if (r == 0 && opts.warm_start) {
      start = *opts.warm_start;
      if (start.walls() != d.cols() || start.points() != d.rows()) {
        throw Error(ErrorCode::InvalidArgument, "warm start shape differs from the echo matrix");
      }
    } else {
      SplitMix64 rng(stream_seed(opts.rng_seed, {static_cast<std::uint64_t>(r)}));
      start = restart_sampler(d, rng);
    }
    finals[r] = refine_stress(problem, std::move(start), opts, &records[r], &violations[r]);
  };

  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(opts.workers, 1)), 1, count);
  if (workers == 1) {
    for (std::size_t r = 0; r < count; ++r) run(r);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t r = t; r < count; r += workers) run(r);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::size_t best = 0;
  for (std::size_t r = 1; r < count; ++r) {
    if (records[r].final_cost < records[best].final_cost) best = r;
  }
  SolverDiagnostics diag;
  diag.method = "stress";
  diag.restarts = records;
  diag.chosen_restart = static_cast<int>(best);
  diag.iterations = records[best].alternating_iters + records[best].polish_iters;
  diag.converged = records[best].converged;
  for (int v : violations) diag.descent_violations += v;

  const double best_cost = records[best].final_cost;
  const auto [best_room, best_traj] = geometry_from_unknowns(finals[best], d.labels());
  double scale = 1.0;
  for (std::size_t j = 0; j < d.cols(); ++j) scale = std::max(scale, std::abs(finals[best].offsets[j]));
  for (std::size_t r = 0; r < count; ++r) {
    if (records[r].final_cost > best_cost + 1e-9 * (1.0 + best_cost)) continue;
    ++diag.optimal_candidates;
    if (r == best || diag.ambiguity_suspected) continue;
    const auto [room_r, traj_r] = geometry_from_unknowns(finals[r], d.labels());
    if (!rigid_congruence(best_room, best_traj, room_r, traj_r, 1e-6 * scale).congruent) {
      diag.ambiguity_suspected = true;
      diag.notes.push_back("restart " + std::to_string(r) +
                           " reaches the optimal cost with a non-congruent geometry");
    }
  }

  GaugedUnknowns chosen = finals[best];
  canonicalize_chirality(chosen);
  Reconstruction rec = make_reconstruction(chosen, d, problem.weights, std::move(diag));
  if (rec.diagnostics.collinear_suspected) {
    rec.diagnostics.notes.push_back("reconstructed locations are collinear; walls are ambiguous up to reflection");
  }
  return rec;
}

}  // namespace echoroom
