#include "fitcurve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

namespace edgealloc {

namespace {

constexpr double kParamFloor = 1e-9;

void validate_points(std::span<const ErrorCurvePoint> points) {
  std::set<double> distinct;
  for (const ErrorCurvePoint& p : points) {
    if (!(p.v > 0)) throw Error(Status::invalid_input, "curve point with v <= 0");
    if (!(p.err > 0 && p.err < 1)) {
      throw Error(Status::invalid_input, "curve point with err outside (0, 1)");
    }
    distinct.insert(p.v);
  }
  if (distinct.size() < 2) {
    throw Error(Status::invalid_input,
                "power-law fit needs at least 2 points with distinct v");
  }
}

double sse_at(std::span<const ErrorCurvePoint> points, double a, double b) {
  double sse = 0.0;
  for (const ErrorCurvePoint& p : points) {
    const double r = a * std::pow(p.v, -b) - p.err;
    sse += r * r;
  }
  return sse;
}

struct GnState {
  double a, b, sse;
  int iterations = 0;
  bool converged = false;
};

GnState gauss_newton(std::span<const ErrorCurvePoint> points, double a0, double b0,
                     const FitConfig& config) {
  GnState st{std::max(a0, kParamFloor), std::max(b0, kParamFloor), 0.0};
  st.sse = sse_at(points, st.a, st.b);

  for (int it = 0; it < config.max_iterations; ++it) {
    st.iterations = it + 1;
    // Normal equations of the 2-column Jacobian.
    double jtj00 = 0, jtj01 = 0, jtj11 = 0, jtr0 = 0, jtr1 = 0;
    for (const ErrorCurvePoint& p : points) {
      const double f = std::pow(p.v, -st.b);
      const double r = st.a * f - p.err;
      const double ja = f;
      const double jb = -st.a * std::log(p.v) * f;
      jtj00 += ja * ja;
      jtj01 += ja * jb;
      jtj11 += jb * jb;
      jtr0 += ja * r;
      jtr1 += jb * r;
    }
    const double grad_norm = 2.0 * std::hypot(jtr0, jtr1);
    if (grad_norm <= config.gradient_tol) {
      st.converged = true;
      return st;
    }

    double ridge = 0.0;
    double da = 0.0, db = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      const double det = (jtj00 + ridge) * (jtj11 + ridge) - jtj01 * jtj01;
      if (std::abs(det) > 1e-300) {
        da = (-jtr0 * (jtj11 + ridge) + jtr1 * jtj01) / det;
        db = (-jtr1 * (jtj00 + ridge) + jtr0 * jtj01) / det;
        if (std::isfinite(da) && std::isfinite(db) &&
            da * jtr0 + db * jtr1 < 0) {
          break;  // descent direction found
        }
      }
      ridge = (ridge == 0.0) ? 1e-8 * std::max(jtj00, jtj11) : ridge * 10.0;
      da = db = 0.0;
    }
    if (da == 0.0 && db == 0.0) return st;  // no usable direction

    // Backtracking Armijo search on the SSE.
    const double slope = 2.0 * (da * jtr0 + db * jtr1);
    if (-slope <= 16.0 * std::numeric_limits<double>::epsilon() * st.sse) {
      // The best possible step moves the SSE by less than its double
      // resolution: stationary to machine precision.
      st.converged = true;
      return st;
    }
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      const double a_try = std::max(st.a + step * da, kParamFloor);
      const double b_try = std::max(st.b + step * db, kParamFloor);
      const double sse_try = sse_at(points, a_try, b_try);
      if (sse_try <= st.sse + 1e-4 * step * slope) {
        st.a = a_try;
        st.b = b_try;
        st.sse = sse_try;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return st;  // numerical floor; gradient check failed above
  }
  return st;
}

}  // namespace

void log_linear_init(std::span<const ErrorCurvePoint> points, double* a, double* b) {
  // Regress log(err) on log(v): log err = log a - b log v.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(points.size());
  for (const ErrorCurvePoint& p : points) {
    const double x = std::log(p.v);
    const double y = std::log(p.err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  *a = std::exp(intercept);
  *b = -slope;
}

FitResult fit_power_law(std::span<const ErrorCurvePoint> points,
                        const FitConfig& config) {
  validate_points(points);

  double a0 = 0, b0 = 0;
  log_linear_init(points, &a0, &b0);

  std::vector<std::pair<double, double>> starts{{a0, b0}};
  if (config.multistart) {
    static constexpr double kJitter[8][2] = {
        {0.5, 0.8}, {0.5, 1.25}, {2.0, 0.8}, {2.0, 1.25},
        {0.25, 1.0}, {4.0, 1.0}, {1.0, 0.6}, {1.0, 1.6}};
    for (const auto& j : kJitter) starts.emplace_back(a0 * j[0], b0 * j[1]);
  }

  GnState best;
  best.sse = std::numeric_limits<double>::infinity();
  bool any_converged = false;
  for (const auto& [sa, sb] : starts) {
    const GnState st = gauss_newton(points, sa, sb, config);
    if (st.converged && (!any_converged || st.sse < best.sse)) {
      best = st;
      any_converged = true;
    } else if (!any_converged && st.sse < best.sse) {
      best = st;
    }
  }

  FitResult result{best.a, best.b, best.sse, best.iterations};
  if (!any_converged) {
    throw FitConvergenceError("power-law fit did not reach the gradient tolerance in " +
                                  std::to_string(config.max_iterations) + " iterations",
                              result);
  }
  return result;
}

LearningErrorModel perturb_parameters(const LearningErrorModel& task,
                                      double fraction, Rng& rng) {
  if (!(fraction >= 0 && fraction < 1)) {
    throw Error(Status::invalid_input, "perturbation fraction must be in [0, 1)");
  }
  LearningErrorModel out = task;
  out.a = rng.uniform(task.a * (1.0 - fraction), task.a * (1.0 + fraction));
  out.b = rng.uniform(task.b * (1.0 - fraction), task.b * (1.0 + fraction));
  return out;
}

}  // namespace edgealloc
