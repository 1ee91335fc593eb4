#include "echoroom/rank_analysis.hpp"

#include <cmath>
#include <random>

#include "echoroom/error.hpp"
#include "echoroom/random.hpp"

namespace echoroom {

RankReport rank_report(const EchoMatrix& d, int dimension, double tol) {
  if (!d.fully_observed()) {
    throw Error(ErrorCode::MaskedInput, "rank_report needs a fully observed matrix; complete it first");
  }
  if (dimension < 2 || dimension > 3) {
    throw Error(ErrorCode::UnsupportedDimension, "dimension must be 2 or 3");
  }
  Eigen::JacobiSVD<Matrix> svd(d.entries());
  const Vector& s = svd.singularValues();
  RankReport report;
  report.singular_values.assign(s.data(), s.data() + s.size());
  if (s.size() == 0 || s(0) == 0.0) return report;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > tol * s(0)) ++report.numerical_rank;
  }
  const Eigen::Index gap = dimension + 1;  // zero-based index of sigma_{d+2}
  report.gap_ratio = gap < s.size() ? s(gap) / s(0) : 0.0;
  return report;
}

namespace {

double observed_rms(const Matrix& entries, const Mask& mask, const Matrix& u, const Matrix& v,
                    const Vector& c) {
  double sum = 0.0;
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < entries.rows(); ++i) {
    for (Eigen::Index j = 0; j < entries.cols(); ++j) {
      if (!mask(i, j)) continue;
      const double r = entries(i, j) - c(j) - u.row(i).dot(v.row(j));
      sum += r * r;
      ++count;
    }
  }
  return count ? std::sqrt(sum / static_cast<double>(count)) : 0.0;
}

}  // namespace

CompletionResult complete_matrix(const EchoMatrix& d, int dimension, const CompletionOptions& opts) {
  if (dimension < 2 || dimension > 3) {
    throw Error(ErrorCode::UnsupportedDimension, "dimension must be 2 or 3");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(d.rows());
  const Eigen::Index k = static_cast<Eigen::Index>(d.cols());
  const Mask& mask = d.mask();
  const Eigen::Index need = dimension + 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (mask.row(i).count() < need) {
      throw Error(ErrorCode::InsufficientObservations,
                  "row " + std::to_string(i) + " has fewer than d + 1 observed entries",
                  static_cast<std::size_t>(i));
    }
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    if (mask.col(j).count() < need) {
      throw Error(ErrorCode::InsufficientObservations,
                  "column " + std::to_string(j) + " has fewer than d + 1 observed entries",
                  static_cast<std::size_t>(j));
    }
  }

  const Matrix& obs = d.entries();

  // Row-mean fill, then rank-d SVD of the column-centred matrix.
  Matrix filled = obs;
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum = 0.0;
    int cnt = 0;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (mask(i, j)) {
        sum += obs(i, j);
        ++cnt;
      }
    }
    for (Eigen::Index j = 0; j < k; ++j) {
      if (!mask(i, j)) filled(i, j) = sum / cnt;
    }
  }
  Vector c = filled.colwise().mean().transpose();
  Matrix centered = filled.rowwise() - c.transpose();
  Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Index rank = std::min<Eigen::Index>(dimension, svd.singularValues().size());
  Matrix u = Matrix::Zero(n, dimension);
  Matrix v = Matrix::Zero(k, dimension);
  for (Eigen::Index r = 0; r < rank; ++r) {
    const double s = std::sqrt(svd.singularValues()(r));
    u.col(r) = svd.matrixU().col(r) * s;
    v.col(r) = svd.matrixV().col(r) * s;
  }

  struct Attempt {
    Matrix u, v;
    Vector c;
    std::vector<double> history;
    int iterations = 0;
    bool stopped = false;
    double rms = 0.0;
  };

  auto run = [&](Matrix u, Matrix v, Vector c) {
    Attempt a;
    double prev = observed_rms(obs, mask, u, v, c);
    bool stop = prev <= opts.fit_tol;
    int it = 0;
    while (!stop && it < opts.max_iters) {
      ++it;
      // Row factors: D_ij - c_j = u_i . v_j over observed j.
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index m = mask.row(i).count();
        Matrix lhs(m, dimension);
        Vector rhs(m);
        Eigen::Index r = 0;
        for (Eigen::Index j = 0; j < k; ++j) {
          if (!mask(i, j)) continue;
          lhs.row(r) = v.row(j);
          rhs(r) = obs(i, j) - c(j);
          ++r;
        }
        u.row(i) = lhs.colPivHouseholderQr().solve(rhs).transpose();
      }
      // Column factors with the pinned ones-column: D_ij = u_i . v_j + c_j.
      for (Eigen::Index j = 0; j < k; ++j) {
        const Eigen::Index m = mask.col(j).count();
        Matrix lhs(m, dimension + 1);
        Vector rhs(m);
        Eigen::Index r = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (!mask(i, j)) continue;
          lhs.row(r).head(dimension) = u.row(i);
          lhs(r, dimension) = 1.0;
          rhs(r) = obs(i, j);
          ++r;
        }
        const Vector sol = lhs.colPivHouseholderQr().solve(rhs);
        v.row(j) = sol.head(dimension).transpose();
        c(j) = sol(dimension);
      }
      const double rms = observed_rms(obs, mask, u, v, c);
      a.history.push_back(rms);
      if (rms <= opts.fit_tol) {
        stop = true;
      } else if (prev > 0.0 && std::abs(prev - rms) / prev < opts.rel_tol) {
        stop = true;
      }
      prev = rms;
    }
    a.u = std::move(u);
    a.v = std::move(v);
    a.c = std::move(c);
    a.iterations = it;
    a.stopped = stop;
    a.rms = prev;
    return a;
  };

  Attempt best = run(u, v, c);
  // ALS can stall in a spurious basin; reseed the wall factors a few times
  // (deterministically) when the first run does not fit the observations.
  for (int restart = 0; restart < opts.restarts && best.rms > opts.fit_tol; ++restart) {
    SplitMix64 rng(stream_seed(0x636f6d706c657465ULL, {static_cast<std::uint64_t>(restart)}));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix v0(k, dimension);
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index r = 0; r < dimension; ++r) v0(j, r) = gauss(rng);
    Attempt a = run(Matrix::Zero(n, dimension), std::move(v0), c);
    a.iterations += best.iterations;
    if (a.rms < best.rms) {
      best = std::move(a);
    } else {
      best.iterations = a.iterations;
    }
  }
  u = std::move(best.u);
  v = std::move(best.v);
  c = std::move(best.c);

  CompletionResult result{d, false, 0, 0.0, {}};
  result.iterations = best.iterations;
  result.converged = best.stopped;
  result.observed_rms = best.rms;
  result.residual_history = std::move(best.history);

  Matrix out = obs;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      if (!mask(i, j)) out(i, j) = c(j) + u.row(i).dot(v.row(j));
    }
  }
  result.matrix = EchoMatrix(std::move(out), d.labels());
  return result;
}

}  // namespace echoroom
