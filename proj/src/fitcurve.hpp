#pragma once

#include <span>

#include "rng.hpp"
#include "types.hpp"

namespace edgealloc {

struct ErrorCurvePoint {
  double v = 0.0;    // training samples, > 0
  double err = 0.0;  // measured classification error, in (0, 1)
};

struct FitResult {
  double a = 0.0;
  double b = 0.0;
  double residual_sse = 0.0;
  int iterations = 0;
};

struct FitConfig {
  double gradient_tol = 1e-10;  // on the SSE gradient norm
  int max_iterations = 500;
  bool multistart = false;  // 8 deterministic jittered starts around the initializer
};

// Thrown when the iteration cap is reached; carries the best iterate found.
class FitConvergenceError : public Error {
 public:
  FitConvergenceError(const std::string& msg, FitResult best)
      : Error(Status::solver_failure, msg), best_(best) {}
  const FitResult& best() const { return best_; }

 private:
  FitResult best_;
};

// Log-log regression starting point for the Gauss-Newton iteration.
void log_linear_init(std::span<const ErrorCurvePoint> points, double* a, double* b);

// Least squares in error space: minimize sum_i (a v_i^-b - err_i)^2 by damped
// Gauss-Newton with a backtracking line search.
FitResult fit_power_law(std::span<const ErrorCurvePoint> points,
                        const FitConfig& config = {});

// Copy of the task with a ~ U(a(1-f), a(1+f)) and b ~ U(b(1-f), b(1+f)),
// drawn independently (a first).
LearningErrorModel perturb_parameters(const LearningErrorModel& task,
                                      double fraction, Rng& rng);

}  // namespace edgealloc
