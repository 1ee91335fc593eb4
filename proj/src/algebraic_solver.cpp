#include "echoroom/algebraic_solver.hpp"

#include <cmath>

#include "echoroom/error.hpp"

namespace echoroom {

bool feasibility(int dimension, std::size_t walls, std::size_t points) {
  if (dimension != 2 && dimension != 3) {
    throw Error(ErrorCode::UnsupportedDimension, "dimension must be 2 or 3");
  }
  const std::size_t min_walls = dimension == 2 ? 3 : 4;
  if (walls < min_walls || points < 1) {
    throw Error(ErrorCode::InvalidArgument, "too few walls or measurements for a room");
  }
  const long long d = dimension;
  const long long k = static_cast<long long>(walls);
  const long long n = static_cast<long long>(points);
  return k * n >= d * k + d * n - d * (d + 1) / 2;
}

namespace {

enum class Outcome { Ok, Collinear, TwoDirections, NotPositive };

struct Factored {
  Outcome outcome = Outcome::Ok;
  GaugedUnknowns unknowns;
};

Factored factor(const EchoMatrix& d, double rank_tol) {
  const Matrix& dm = d.entries();
  const Eigen::Index n = dm.rows();
  const Eigen::Index k = dm.cols();

  // b_{i,j} = d_{1,j} - d_{i,j} = <n_j, r_i> once r_1 = 0.
  Matrix b(n - 1, k);
  for (Eigen::Index i = 1; i < n; ++i) b.row(i - 1) = dm.row(0) - dm.row(i);

  Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  Factored out;
  if (sv.size() < 2 || !(sv(0) > 0.0) || sv(1) <= rank_tol * sv(0)) {
    out.outcome = Outcome::Collinear;
    return out;
  }
  const Matrix u2 = svd.matrixU().leftCols(2) * sv.head(2).asDiagonal();
  const Matrix v2 = svd.matrixV().leftCols(2).transpose();  // 2 x K

  // Unit normals n_j = G v_j  <=>  v_j^T S v_j = 1 with S = G^T G.
  Matrix quad(k, 3);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double a = v2(0, j);
    const double c = v2(1, j);
    quad.row(j) << a * a, 2.0 * a * c, c * c;
  }
  Eigen::JacobiSVD<Matrix> qsvd(quad, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& qs = qsvd.singularValues();
  if (qs(2) <= rank_tol * qs(0)) {
    out.outcome = Outcome::TwoDirections;
    return out;
  }
  const Vector s = qsvd.solve(Vector::Ones(k));
  Eigen::Matrix2d gram;
  gram << s(0), s(1), s(1), s(2);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(gram);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) {
    out.outcome = Outcome::NotPositive;
    return out;
  }
  const Eigen::Matrix2d g = eig.operatorSqrt();
  Matrix normals = g * v2;        // 2 x K
  Matrix locations = u2 * g.inverse();  // (N-1) x 2

  // Rotate n_1 onto (0, 1).
  const double angle = 0.5 * 3.14159265358979323846 - std::atan2(normals(1, 0), normals(0, 0));
  Eigen::Matrix2d rot;
  rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  normals = rot * normals;
  locations = locations * rot.transpose();

  GaugedUnknowns& g_out = out.unknowns;
  for (Eigen::Index j = 0; j < k; ++j) {
    g_out.thetas.push_back(j == 0 ? 0.0 : std::atan2(normals(0, j), normals(1, j)));
    g_out.offsets.push_back(dm(0, j));
  }
  g_out.xs.push_back(0.0);
  g_out.ys.push_back(0.0);
  for (Eigen::Index i = 0; i < n - 1; ++i) {
    g_out.xs.push_back(locations(i, 0));
    g_out.ys.push_back(locations(i, 1));
  }
  canonicalize_chirality(g_out);
  return out;
}

void require_solvable(const EchoMatrix& d) {
  if (!d.fully_observed()) {
    throw Error(ErrorCode::MaskedInput, "algebraic solver needs a fully observed matrix");
  }
  if (d.cols() < 3 || d.rows() < 1 || !feasibility(2, d.cols(), d.rows())) {
    throw Error(ErrorCode::InfeasibleCount,
                "K N >= 2 K + 2 N - 3 fails for K = " + std::to_string(d.cols()) +
                    ", N = " + std::to_string(d.rows()));
  }
}

}  // namespace

Reconstruction solve_noiseless(const EchoMatrix& d, const AlgebraicOptions& opts) {
  require_solvable(d);
  const Factored f = factor(d, opts.rank_tol);
  switch (f.outcome) {
    case Outcome::Collinear:
      throw Error(ErrorCode::AmbiguousConfiguration,
                  "measurement locations are collinear; walls are only determined up to reflection across the line");
    case Outcome::TwoDirections:
      throw Error(ErrorCode::AmbiguousConfiguration,
                  "wall normals span only two directions (parallelogram room); a shear family fits the data");
    case Outcome::NotPositive:
      throw Error(ErrorCode::InconsistentData, "no unit-normal factorization fits the data");
    case Outcome::Ok:
      break;
  }
  const Matrix weights = Matrix::Ones(d.rows(), d.cols());
  SolverDiagnostics diag;
  diag.method = "algebraic";
  diag.converged = true;
  Reconstruction rec = make_reconstruction(f.unknowns, d, weights, std::move(diag));

  const double n_k = static_cast<double>(d.rows() * d.cols());
  const double tol = opts.noise_sigma > 0.0 ? 10.0 * opts.noise_sigma * std::sqrt(n_k)
                                            : opts.residual_tol;
  if (!(rec.max_abs_residual <= tol)) {
    throw Error(ErrorCode::InconsistentData,
                "best algebraic fit leaves residual " + std::to_string(rec.max_abs_residual) +
                    " above tolerance " + std::to_string(tol));
  }
  return rec;
}

std::optional<GaugedUnknowns> algebraic_estimate(const EchoMatrix& d) {
  if (!d.fully_observed() || d.rows() < 3 || d.cols() < 3) return std::nullopt;
  const Factored f = factor(d, 1e-12);
  if (f.outcome != Outcome::Ok) return std::nullopt;
  return f.unknowns;
}

}  // namespace echoroom
