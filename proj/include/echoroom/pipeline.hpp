#pragma once

// End-to-end reconstruction from an echo matrix: optional completion of
// missing entries, then the algebraic solver, the stress solver, or both
// (algebraic estimate as restart 0 of the stress solver).

#include <optional>
#include <string>

#include "echoroom/algebraic_solver.hpp"
#include "echoroom/rank_analysis.hpp"
#include "echoroom/stress_solver.hpp"

namespace echoroom {

enum class SolveMode { Algebraic, Stress, Auto };

SolveMode parse_solve_mode(const std::string& name);
const char* to_string(SolveMode mode) noexcept;

struct PipelineOptions {
  SolveMode mode = SolveMode::Auto;
  AlgebraicOptions algebraic;
  SolverOptions stress;
  CompletionOptions completion;
};

struct PipelineResult {
  Reconstruction reconstruction;
  std::optional<CompletionResult> completion;  // set when the input had missing entries
  /// Completion converged (or was not needed) and the solver converged.
  bool converged = false;
};

/// Throws whatever the chosen solver throws (InfeasibleCount,
/// AmbiguousConfiguration, InconsistentData, InsufficientObservations).
PipelineResult solve(const EchoMatrix& d, const PipelineOptions& opts = {});

}  // namespace echoroom
