#pragma once

// Low-rank structure of the echo matrix. In d dimensions D = 1 q^T - R^T N,
// so rank(D) <= d + 1; the same factorization drives masked completion.

#include <vector>

#include "echoroom/echo_sim.hpp"

namespace echoroom {

struct RankReport {
  std::vector<double> singular_values;  // descending
  int numerical_rank = 0;
  double gap_ratio = 0.0;  // sigma_{d+2} / sigma_1, zero if there is no such value
};

/// Singular-value summary. `tol` is relative to the largest singular value.
/// Throws MaskedInput for matrices with missing entries.
RankReport rank_report(const EchoMatrix& d, int dimension, double tol = 1e-10);

struct CompletionOptions {
  int max_iters = 500;
  double rel_tol = 1e-12;  // stop when the relative residual change drops below this
  double fit_tol = 1e-10;  // RMS residual on observed entries counted as an exact fit
  int restarts = 8;        // reseeded runs tried when the first one does not fit
};

struct CompletionResult {
  EchoMatrix matrix;  // observed entries kept, missing ones filled
  bool converged = false;
  int iterations = 0;
  double observed_rms = 0.0;             // RMS model residual on observed entries
  std::vector<double> residual_history;  // observed RMS after each full sweep
};

/// Fills missing entries with the rank-(d+1) model D ~ [R^T | 1] [-N ; q^T],
/// fitted by alternating least squares with the ones-column pinned. When the
/// first run does not reach fit_tol, seeded re-initializations are tried and
/// the best fit is kept; residual_history belongs to that run.
/// Requires at least d + 1 observed entries in every row and column
/// (InsufficientObservations otherwise). A run that hits max_iters reports
/// converged = false and returns its best iterate.
CompletionResult complete_matrix(const EchoMatrix& d, int dimension,
                                 const CompletionOptions& opts = {});

}  // namespace echoroom
