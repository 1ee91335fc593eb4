#include "echoroom/pipeline.hpp"

#include "echoroom/error.hpp"

namespace echoroom {

SolveMode parse_solve_mode(const std::string& name) {
  if (name == "algebraic") return SolveMode::Algebraic;
  if (name == "stress") return SolveMode::Stress;
  if (name == "auto") return SolveMode::Auto;
  throw Error(ErrorCode::InvalidArgument, "unknown solve mode '" + name + "' (algebraic, stress, auto)");
}

const char* to_string(SolveMode mode) noexcept {
  switch (mode) {
    case SolveMode::Algebraic:
      return "algebraic";
    case SolveMode::Stress:
      return "stress";
    case SolveMode::Auto:
      return "auto";
  }
  return "?";
}

PipelineResult solve(const EchoMatrix& d, const PipelineOptions& opts) {
  std::optional<CompletionResult> completion;
  const EchoMatrix* input = &d;
  if (!d.fully_observed()) {
    completion = complete_matrix(d, 2, opts.completion);
    input = &completion->matrix;
  }

  Reconstruction rec = [&] {
    switch (opts.mode) {
      case SolveMode::Algebraic:
        return solve_noiseless(*input, opts.algebraic);
      case SolveMode::Stress:
        return solve_stress(StressProblem(*input), opts.stress);
      case SolveMode::Auto: {
        SolverOptions stress = opts.stress;
        stress.warm_start = algebraic_estimate(*input);
        Reconstruction r = solve_stress(StressProblem(*input), stress);
        r.diagnostics.method = "auto";
        r.diagnostics.notes.insert(r.diagnostics.notes.begin(),
                                   stress.warm_start ? "restart 0 started from the algebraic estimate"
                                                     : "algebraic estimate unavailable; random restarts only");
        return r;
      }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown solve mode");
  }();

  if (completion) {
    rec.diagnostics.notes.insert(
        rec.diagnostics.notes.begin(),
        "input had " + std::to_string(d.rows() * d.cols() - d.observed_count()) +
            " missing entries; filled by rank-3 completion (" +
            (completion->converged ? "converged" : "not converged") + " after " +
            std::to_string(completion->iterations) + " sweeps)");
  }
  const bool converged = rec.diagnostics.converged && (!completion || completion->converged);
  return PipelineResult{std::move(rec), std::move(completion), converged};
}

}  // namespace echoroom
