#pragma once

#include "model.hpp"
#include "types.hpp"

namespace edgealloc {

// Affine majorizer of one user's delivered-bits function at an anchor point:
// value_at_anchor + (x - anchor) . gradient >= theta(x) everywhere (concavity),
// with equality at the anchor.
struct SurrogateConstraint {
  int user = -1;
  double anchor_t = 0.0;  // s
  double anchor_e = 0.0;  // J
  double value_at_anchor = 0.0;  // bits
  double grad_t = 0.0;           // bits/s
  double grad_e = 0.0;           // bits/J
  double cap_bits = 0.0;         // dataset_size * bits_per_sample

  double value(double t, double e) const {
    return value_at_anchor + (t - anchor_t) * grad_t + (e - anchor_e) * grad_e;
  }
};

// Uniform split t_k = t_max/K, E_k = min(p_max t_k, e_max/K), scaled down
// (homogeneity makes the factor closed-form) until every dataset cap holds,
// then pulled microscopically into the interior.
struct FeasiblePoint {
  std::vector<double> time;
  std::vector<double> energy;
};
FeasiblePoint initial_feasible_point(const Scenario& s);

// One constraint per user. Anchors with positive energy must have
// t >= kTimeFloor; zero-energy anchors are clamped to the floor.
std::vector<SurrogateConstraint> build_surrogate(const Scenario& s,
                                                 std::span<const double> time,
                                                 std::span<const double> energy);

struct InnerStats {
  int newton_iterations = 0;
  int bisection_steps = 0;
  double max_violation = 0.0;          // worst constraint value at the returned point
  double stationarity_residual = 0.0;  // epigraph-form stationarity at the returned point
};

struct SubproblemResult {
  std::vector<double> time;
  std::vector<double> energy;
  double level = 0.0;  // certified error level (objective upper bound)
  InnerStats stats;
  // Stationarity/complementarity residual with the exact rate gradients
  // substituted for the surrogate ones (meaningful near a fixed point).
  double exact_kkt_residual = 0.0;
};

// Minimizes the worst predicted error subject to the budget/power constraints
// and the affine surrogate caps. Engine: bisection on the error level; each
// trial level is a convex feasibility system solved by a phase-I log-barrier
// with damped Newton steps; the final level gets an analytic-center polish
// that also yields multiplier estimates.
SubproblemResult solve_convex_subproblem(
    const Scenario& s, const std::vector<SurrogateConstraint>& surrogates);

enum class DcpTermination { converged, max_iterations, infeasible_start };

struct DcpTrace {
  std::vector<double> objectives;  // objective at the start point, then per accepted iterate
  std::vector<InnerStats> inner;   // per outer iteration
  std::vector<FeasiblePoint> iterates;  // start point, then accepted iterates
  DcpTermination termination = DcpTermination::converged;
  double kkt_residual = 0.0;  // at the returned point, exact rate gradients
};

struct DcpResult {
  Allocation allocation;
  DcpTrace trace;
};

// Iterative linearize-and-solve on the dataset-cap constraint from an
// initial feasible point; stops when the relative objective change drops
// below outer_tol. A subproblem that fails to improve the exact objective is
// treated as converged (the anchor is kept), which keeps the recorded
// objective sequence non-increasing.
DcpResult solve_dcp(const Scenario& s, double outer_tol = 1e-6, int max_outer = 100);

}  // namespace edgealloc
