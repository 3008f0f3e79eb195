#pragma once

#include <span>

#include "types.hpp"

namespace edgealloc {

// Solvers never evaluate the rate gradient below this duration; see theta().
inline constexpr double kTimeFloor = 1e-9;  // s

// Delivered bits Theta(t, E) = alpha * t * B * log2(1 + E|h|^2 / (t sigma^2)).
// Defined as 0 at t = 0 (limit value). Fixed-rate links use alpha * t * R.
double theta(double t, double e, const UserLink& link, const RadioParams& radio);

struct ThetaGradient {
  double dt = 0.0;  // bits/s
  double de = 0.0;  // bits/J
};

// Requires t > 0.
ThetaGradient theta_gradient(double t, double e, const UserLink& link,
                             const RadioParams& radio);

// 2x2 Hessian of Theta; negative semidefinite of rank one. Requires t > 0.
struct ThetaHessian {
  double dtt = 0.0;
  double dte = 0.0;
  double dee = 0.0;
};
ThetaHessian theta_hessian(double t, double e, const UserLink& link,
                           const RadioParams& radio);

// Continuous sample count sum(d_k / D_k) + c for one task; bits is indexed in
// scenario user order.
double samples_for_task(const Scenario& s, const ScenarioIndex& index, int task,
                        std::span<const double> bits);

// Integer reporting view: per-user floor applied before summing.
double samples_for_task_floored(const Scenario& s, const ScenarioIndex& index,
                                int task, std::span<const double> bits);

// a * v^(-b); requires v > 0.
double predicted_error(const LearningErrorModel& task, double v);

// Samples needed beyond the historical ones to reach error level u:
// max(0, (u/a)^(-1/b) - c); requires u > 0.
double required_samples(const LearningErrorModel& task, double u);

// Worst predicted error over tasks given per-task continuous sample counts.
double worst_error(const Scenario& s, std::span<const double> samples);

// Builds an Allocation with bits = theta(t, e) and validates every constraint;
// throws Error(invalid_input) listing all violations beyond tolerance.
Allocation evaluate_allocation(const Scenario& s, std::span<const double> time,
                               std::span<const double> energy);

// Same validation path for callers that deliver fewer bits than theta allows
// (baselines truncate at the dataset cap).
Allocation finalize_allocation(const Scenario& s, const ScenarioIndex& index,
                               std::span<const double> time,
                               std::span<const double> energy,
                               std::span<const double> bits);

std::vector<double> integer_samples(const Scenario& s, const Allocation& alloc);

}  // namespace edgealloc
