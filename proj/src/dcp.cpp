#include "dcp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace edgealloc {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kMargin = 1e-9;       // strict-feasibility margin, normalized units
constexpr double kLevelRelTol = 1e-9;  // bisection width tolerance on the error level
constexpr double kSnapTime = 10.0 * kTimeFloor;

double exact_objective(const Scenario& s, const ScenarioIndex& index,
                       std::span<const double> time, std::span<const double> energy) {
  std::vector<double> bits(s.users.size());
  for (size_t k = 0; k < s.users.size(); ++k) {
    bits[k] = theta(time[k], energy[k], s.users[k], s.radio);
  }
  std::vector<double> v(s.tasks.size());
  for (size_t m = 0; m < s.tasks.size(); ++m) {
    v[m] = samples_for_task(s, index, static_cast<int>(m), bits);
  }
  return worst_error(s, v);
}

// Per-user rate value/derivatives in the normalized variables
// y = [t/T ; E/E_cap].
struct UserEval {
  double value = 0.0;  // bits
  double gt = 0.0, ge = 0.0;
  double htt = 0.0, hte = 0.0, hee = 0.0;
};

// The convex feasibility system behind one trial error level: budget, power
// and floor constraints, affine surrogate caps, and the sample-demand form of
// the per-task error constraints. Relaxed constraints get the phase-I slack;
// the variable box (t >= floor, E >= 0) is kept hard so every rate evaluation
// stays in-domain.
class InnerSystem {
 public:
  InnerSystem(const Scenario& s, const ScenarioIndex& index,
              const std::vector<SurrogateConstraint>& surrogates)
      : s_(s), index_(index), surrogates_(surrogates) {
    K_ = static_cast<int>(s.users.size());
    n_ = 2 * K_;
    T_ = s.budgets.t_max;
    E_ = s.budgets.e_max;
    tf_ = kTimeFloor / T_;
    rho_ = E_ / (s.budgets.p_max * T_);
    pw_norm_ = std::max(rho_, 1.0);
    users_.resize(K_);
  }

  int num_users() const { return K_; }
  int dim() const { return n_; }
  double time_floor_norm() const { return tf_; }

  void set_level(double u) {
    active_tasks_.clear();
    demand_.clear();
    demand_norm_.clear();
    demand_du_.clear();
    for (int m = 0; m < static_cast<int>(s_.tasks.size()); ++m) {
      const LearningErrorModel& task = s_.tasks[m];
      const double q = std::pow(u / task.a, -1.0 / task.b);
      const double demand = q - task.c;
      if (demand <= 0.0) continue;
      active_tasks_.push_back(m);
      demand_.push_back(demand);
      demand_norm_.push_back(std::max(demand, 1.0));
      demand_du_.push_back(q / (task.b * u));  // |d demand / du|
    }
    relaxed_ = 2 + 2 * K_ + static_cast<int>(active_tasks_.size());
    fval_.assign(relaxed_, 0.0);
    if (static_cast<int>(fgrad_.size()) < relaxed_) {
      fgrad_.resize(relaxed_, VectorXd::Zero(n_));
    }
  }

  int relaxed_count() const { return relaxed_; }
  int log_term_count() const { return relaxed_ + n_; }

  // Evaluates every relaxed constraint at y; values land in fval(),
  // gradients in fgrad().
  void eval(const VectorXd& y) {
    for (int k = 0; k < K_; ++k) {
      const double t = std::max(T_ * y[k], kTimeFloor);
      const double e = std::max(E_ * y[K_ + k], 0.0);
      UserEval& ue = users_[k];
      ue.value = theta(t, e, s_.users[k], s_.radio);
      const ThetaGradient g = theta_gradient(t, e, s_.users[k], s_.radio);
      const ThetaHessian h = theta_hessian(t, e, s_.users[k], s_.radio);
      ue.gt = T_ * g.dt;
      ue.ge = E_ * g.de;
      ue.htt = T_ * T_ * h.dtt;
      ue.hte = T_ * E_ * h.dte;
      ue.hee = E_ * E_ * h.dee;
    }

    int i = 0;
    // sum(t) <= T and sum(E) <= E_cap
    fval_[i] = y.head(K_).sum() - 1.0;
    fgrad_[i].setZero();
    fgrad_[i].head(K_).setOnes();
    ++i;
    fval_[i] = y.tail(K_).sum() - 1.0;
    fgrad_[i].setZero();
    fgrad_[i].tail(K_).setOnes();
    ++i;
    // E_k <= P_max t_k
    for (int k = 0; k < K_; ++k, ++i) {
      fval_[i] = (rho_ * y[K_ + k] - y[k]) / pw_norm_;
      fgrad_[i].setZero();
      fgrad_[i][k] = -1.0 / pw_norm_;
      fgrad_[i][K_ + k] = rho_ / pw_norm_;
    }
    // surrogate caps
    for (int k = 0; k < K_; ++k, ++i) {
      const SurrogateConstraint& sc = surrogates_[k];
      const double t = T_ * y[k];
      const double e = E_ * y[K_ + k];
      fval_[i] = (sc.value(t, e) - sc.cap_bits) / sc.cap_bits;
      fgrad_[i].setZero();
      fgrad_[i][k] = T_ * sc.grad_t / sc.cap_bits;
      fgrad_[i][K_ + k] = E_ * sc.grad_e / sc.cap_bits;
    }
    // demand form of the per-task error constraints
    for (size_t a = 0; a < active_tasks_.size(); ++a, ++i) {
      const int m = active_tasks_[a];
      double v = 0.0;
      fgrad_[i].setZero();
      for (int k : index_.task_users[m]) {
        const double d = s_.users[k].bits_per_sample;
        v += users_[k].value / d;
        fgrad_[i][k] -= users_[k].gt / (d * demand_norm_[a]);
        fgrad_[i][K_ + k] -= users_[k].ge / (d * demand_norm_[a]);
      }
      fval_[i] = (demand_[a] - v) / demand_norm_[a];
    }
  }

  const std::vector<double>& fval() const { return fval_; }
  const std::vector<VectorXd>& fgrad() const { return fgrad_; }

  double max_violation(const VectorXd& y) {
    eval(y);
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < relaxed_; ++i) worst = std::max(worst, fval_[i]);
    return worst;
  }

  // Adds weight * (curvature of relaxed constraint i) to H. Only the demand
  // constraints are nonlinear; their Hessian is -sum(theta Hessians)/(D norm).
  void add_constraint_hessian(int i, double weight, MatrixXd& H) const {
    const int first_task = 2 + 2 * K_;
    if (i < first_task) return;
    const size_t a = static_cast<size_t>(i - first_task);
    const int m = active_tasks_[a];
    for (int k : index_.task_users[m]) {
      const double c = weight / (s_.users[k].bits_per_sample * demand_norm_[a]);
      H(k, k) -= c * users_[k].htt;
      H(k, K_ + k) -= c * users_[k].hte;
      H(K_ + k, k) -= c * users_[k].hte;
      H(K_ + k, K_ + k) -= c * users_[k].hee;
    }
  }

  // |d f_task / du| for active task position a (positive).
  double level_sensitivity(size_t a) const { return demand_du_[a] / demand_norm_[a]; }
  int first_task_constraint() const { return 2 + 2 * K_; }
  const std::vector<int>& active_tasks() const { return active_tasks_; }
  const std::vector<UserEval>& users() const { return users_; }

  VectorXd clamp_into_box(VectorXd y) const {
    for (int k = 0; k < K_; ++k) {
      y[k] = std::max(y[k], tf_ * (1.0 + 1e-6) + 1e-300);
      y[K_ + k] = std::max(y[K_ + k], 1e-14);
    }
    return y;
  }

 private:
  const Scenario& s_;
  const ScenarioIndex& index_;
  const std::vector<SurrogateConstraint>& surrogates_;
  int K_ = 0, n_ = 0, relaxed_ = 0;
  double T_ = 0, E_ = 0, tf_ = 0, rho_ = 0, pw_norm_ = 1;
  std::vector<UserEval> users_;
  std::vector<int> active_tasks_;
  std::vector<double> demand_, demand_norm_, demand_du_;
  std::vector<double> fval_;
  std::vector<VectorXd> fgrad_;
};

struct Phase1Result {
  bool feasible = false;
  VectorXd y;
  int newton_steps = 0;
};

// Phase-I barrier on min s subject to f_i(y) <= s over the variable box.
// Succeeds as soon as a point with max violation < -margin is found; declares
// infeasibility once the barrier gap certifies min-max violation > -margin.
Phase1Result phase1(InnerSystem& sys, const VectorXd& y_start) {
  const int n = sys.dim();
  const int K = sys.num_users();
  const double tf = sys.time_floor_norm();
  const int m_logs = sys.log_term_count();

  Phase1Result out;
  VectorXd y = sys.clamp_into_box(y_start);
  double sv = sys.max_violation(y) + 1.0;

  auto barrier_value = [&](const VectorXd& yy, double ss) {
    // +inf outside the domain; reuses sys.eval side effects.
    for (int k = 0; k < K; ++k) {
      if (yy[k] <= tf || yy[K + k] <= 0.0) return std::numeric_limits<double>::infinity();
    }
    sys.eval(yy);
    double val = 0.0;
    for (int i = 0; i < sys.relaxed_count(); ++i) {
      const double r = ss - sys.fval()[i];
      if (r <= 0.0) return std::numeric_limits<double>::infinity();
      val -= std::log(r);
    }
    for (int k = 0; k < K; ++k) {
      val -= std::log(yy[k] - tf) + std::log(yy[K + k]);
    }
    return val;
  };

  VectorXd g(n + 1);
  MatrixXd H(n + 1, n + 1);
  VectorXd step(n + 1);

  for (double tau = 64.0; tau < 1e12; tau *= 16.0) {
    bool stage_converged = false;
    for (int it = 0; it < 40; ++it) {
      sys.eval(y);
      double worst = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < sys.relaxed_count(); ++i) {
        worst = std::max(worst, sys.fval()[i]);
      }
      if (worst < -kMargin) {
        out.feasible = true;
        out.y = y;
        return out;
      }
      if (sv <= worst) sv = worst + 1.0;  // keep the slack in-domain

      g.setZero();
      H.setZero();
      g[n] = tau;
      for (int i = 0; i < sys.relaxed_count(); ++i) {
        const double r = sv - sys.fval()[i];
        const double inv = 1.0 / r;
        const double inv2 = inv * inv;
        const VectorXd& gr = sys.fgrad()[i];
        g.head(n) += inv * gr;
        g[n] -= inv;
        H.topLeftCorner(n, n).noalias() += inv2 * gr * gr.transpose();
        sys.add_constraint_hessian(i, inv, H);
        H.block(0, n, n, 1).noalias() -= inv2 * gr;
        H.block(n, 0, 1, n).noalias() -= inv2 * gr.transpose();
        H(n, n) += inv2;
      }
      for (int k = 0; k < K; ++k) {
        const double st = y[k] - tf;
        const double se = y[K + k];
        g[k] -= 1.0 / st;
        g[K + k] -= 1.0 / se;
        H(k, k) += 1.0 / (st * st);
        H(K + k, K + k) += 1.0 / (se * se);
      }

      double ridge = 0.0;
      for (int attempt = 0;; ++attempt) {
        MatrixXd Hr = H;
        if (ridge > 0.0) Hr.diagonal().array() += ridge;
        step = Hr.ldlt().solve(-g);
        if (step.allFinite() && g.dot(step) < 0.0) break;
        if (attempt >= 10) {
          step = -g;  // gradient fallback
          break;
        }
        ridge = (ridge == 0.0) ? 1e-10 * (1.0 + H.diagonal().maxCoeff()) : ridge * 100.0;
      }

      const double decrement = -g.dot(step);
      if (decrement * 0.5 < 1e-12) {
        stage_converged = true;
        break;
      }

      const double phi0 = barrier_value(y, sv) + tau * sv;
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        const VectorXd y_try = y + alpha * step.head(n);
        const double s_try = sv + alpha * step[n];
        const double phi_try = barrier_value(y_try, s_try) + tau * s_try;
        if (phi_try <= phi0 + 0.25 * alpha * g.dot(step)) {
          y = y_try;
          sv = s_try;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      ++out.newton_steps;
      if (!moved) {
        stage_converged = true;  // numerical floor for this stage
        break;
      }
    }
    if (stage_converged && sv - m_logs / tau > -kMargin) {
      out.feasible = false;
      out.y = y;
      return out;  // certified: no point beats the margin
    }
  }
  out.feasible = sys.max_violation(y) < -kMargin;
  out.y = y;
  return out;
}

struct CenterResult {
  VectorXd y;
  std::vector<double> lambda;  // per relaxed constraint, 1/slack
  std::vector<double> mu_t, mu_e;
  double grad_norm = 0.0;  // of the barrier at the returned point
  int newton_steps = 0;
};

// Analytic center of the feasibility system at a fixed level, started from a
// strictly feasible point. Its slack-inverse multipliers make the point an
// approximate KKT point of the level-bisection epigraph problem.
CenterResult analytic_center(InnerSystem& sys, const VectorXd& y_interior) {
  const int n = sys.dim();
  const int K = sys.num_users();
  const double tf = sys.time_floor_norm();

  auto psi = [&](const VectorXd& yy) {
    for (int k = 0; k < K; ++k) {
      if (yy[k] <= tf || yy[K + k] <= 0.0) return std::numeric_limits<double>::infinity();
    }
    sys.eval(yy);
    double val = 0.0;
    for (int i = 0; i < sys.relaxed_count(); ++i) {
      if (sys.fval()[i] >= 0.0) return std::numeric_limits<double>::infinity();
      val -= std::log(-sys.fval()[i]);
    }
    for (int k = 0; k < K; ++k) {
      val -= std::log(yy[k] - tf) + std::log(yy[K + k]);
    }
    return val;
  };

  CenterResult out;
  VectorXd y = y_interior;
  VectorXd g(n);
  MatrixXd H(n, n);

  for (int it = 0; it < 80; ++it) {
    sys.eval(y);
    g.setZero();
    H.setZero();
    for (int i = 0; i < sys.relaxed_count(); ++i) {
      const double lam = 1.0 / (-sys.fval()[i]);
      const VectorXd& gr = sys.fgrad()[i];
      g.noalias() += lam * gr;
      H.noalias() += (lam * lam) * gr * gr.transpose();
      sys.add_constraint_hessian(i, lam, H);
    }
    for (int k = 0; k < K; ++k) {
      const double st = y[k] - tf;
      const double se = y[K + k];
      g[k] -= 1.0 / st;
      g[K + k] -= 1.0 / se;
      H(k, k) += 1.0 / (st * st);
      H(K + k, K + k) += 1.0 / (se * se);
    }

    VectorXd step = H.ldlt().solve(-g);
    if (!step.allFinite()) {
      MatrixXd Hr = H;
      Hr.diagonal().array() += 1e-10 * (1.0 + H.diagonal().maxCoeff());
      step = Hr.ldlt().solve(-g);
      if (!step.allFinite()) break;
    }
    const double decrement = -g.dot(step);
    if (decrement * 0.5 < 1e-14) break;

    const double psi0 = psi(y);
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const VectorXd y_try = y + alpha * step;
      if (psi(y_try) <= psi0 + 0.25 * alpha * g.dot(step)) {
        y = y_try;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    ++out.newton_steps;
    if (!moved) break;
  }

  sys.eval(y);
  out.y = y;
  out.lambda.resize(sys.relaxed_count());
  for (int i = 0; i < sys.relaxed_count(); ++i) {
    out.lambda[i] = 1.0 / (-sys.fval()[i]);
  }
  out.mu_t.resize(K);
  out.mu_e.resize(K);
  VectorXd resid = VectorXd::Zero(n);
  for (int i = 0; i < sys.relaxed_count(); ++i) {
    resid.noalias() += out.lambda[i] * sys.fgrad()[i];
  }
  for (int k = 0; k < K; ++k) {
    out.mu_t[k] = 1.0 / (y[k] - tf);
    out.mu_e[k] = 1.0 / y[K + k];
    resid[k] -= out.mu_t[k];
    resid[K + k] -= out.mu_e[k];
  }
  out.grad_norm = resid.norm();
  return out;
}

}  // namespace

FeasiblePoint initial_feasible_point(const Scenario& s) {
  const ScenarioIndex index = validate_scenario(s);
  (void)index;
  const int K = static_cast<int>(s.users.size());
  FeasiblePoint p;
  p.time.assign(K, s.budgets.t_max / K);
  p.energy.resize(K);
  for (int k = 0; k < K; ++k) {
    p.energy[k] = std::min(s.budgets.p_max * p.time[k], s.budgets.e_max / K);
  }
  // Homogeneity gives the cap-restoring shrink factor in closed form.
  double gamma = 1.0;
  for (int k = 0; k < K; ++k) {
    const double cap = s.users[k].dataset_size * s.users[k].bits_per_sample;
    const double bits = theta(p.time[k], p.energy[k], s.users[k], s.radio);
    if (bits > cap) gamma = std::min(gamma, cap / bits);
  }
  const double interior = 1.0 - 1e-9;
  for (int k = 0; k < K; ++k) {
    p.time[k] *= gamma * interior;
    p.energy[k] *= gamma * interior * interior;
  }
  return p;
}

std::vector<SurrogateConstraint> build_surrogate(const Scenario& s,
                                                 std::span<const double> time,
                                                 std::span<const double> energy) {
  if (time.size() != s.users.size() || energy.size() != s.users.size()) {
    throw Error(Status::invalid_input, "surrogate anchor must cover all users");
  }
  std::vector<SurrogateConstraint> out;
  out.reserve(s.users.size());
  for (size_t k = 0; k < s.users.size(); ++k) {
    if (energy[k] > 0.0 && time[k] < kTimeFloor) {
      throw Error(Status::invalid_input,
                  "surrogate anchor has positive energy at t below the time floor");
    }
    SurrogateConstraint sc;
    sc.user = static_cast<int>(k);
    sc.anchor_t = std::max(time[k], kTimeFloor);
    sc.anchor_e = std::max(energy[k], 0.0);
    sc.value_at_anchor = theta(sc.anchor_t, sc.anchor_e, s.users[k], s.radio);
    const ThetaGradient g = theta_gradient(sc.anchor_t, sc.anchor_e, s.users[k], s.radio);
    sc.grad_t = g.dt;
    sc.grad_e = g.de;
    sc.cap_bits = s.users[k].dataset_size * s.users[k].bits_per_sample;
    out.push_back(sc);
  }
  return out;
}

SubproblemResult solve_convex_subproblem(
    const Scenario& s, const std::vector<SurrogateConstraint>& surrogates) {
  const ScenarioIndex index = validate_scenario(s);
  if (surrogates.size() != s.users.size()) {
    throw Error(Status::invalid_input, "one surrogate constraint per user required");
  }
  const int K = static_cast<int>(s.users.size());
  InnerSystem sys(s, index, surrogates);

  VectorXd y_anchor(2 * K);
  std::vector<double> anchor_t(K), anchor_e(K);
  for (int k = 0; k < K; ++k) {
    anchor_t[k] = surrogates[k].anchor_t;
    anchor_e[k] = surrogates[k].anchor_e;
    y_anchor[k] = anchor_t[k] / s.budgets.t_max;
    y_anchor[K + k] = anchor_e[k] / s.budgets.e_max;
  }

  const double u_anchor = exact_objective(s, index, anchor_t, anchor_e);
  if (!std::isfinite(u_anchor)) {
    throw Error(Status::infeasible,
                "a task with no historical samples collects nothing at the anchor");
  }

  // Any feasible point keeps each task at or above its full-dataset error.
  double u_floor = 0.0;
  for (int m = 0; m < static_cast<int>(s.tasks.size()); ++m) {
    double v_max = s.tasks[m].c;
    for (int k : index.task_users[m]) v_max += s.users[k].dataset_size;
    u_floor = std::max(u_floor, predicted_error(s.tasks[m], v_max));
  }

  SubproblemResult result;
  result.time = anchor_t;
  result.energy = anchor_e;
  result.level = u_anchor;

  double u_hi = u_anchor * (1.0 + 1e-9);
  double u_lo = std::min(u_floor, u_hi);

  sys.set_level(u_hi);
  Phase1Result probe = phase1(sys, y_anchor);
  result.stats.newton_iterations += probe.newton_steps;
  if (!probe.feasible) {
    // The anchor is already optimal to working precision; keep it.
    sys.set_level(u_hi);
    result.stats.max_violation = sys.max_violation(y_anchor);
    return result;
  }
  VectorXd warm = probe.y;

  while (u_hi - u_lo > kLevelRelTol * u_hi &&
         result.stats.bisection_steps < 90) {
    const double u_trial = 0.5 * (u_lo + u_hi);
    sys.set_level(u_trial);
    Phase1Result trial = phase1(sys, warm);
    result.stats.newton_iterations += trial.newton_steps;
    ++result.stats.bisection_steps;
    if (trial.feasible) {
      u_hi = u_trial;
      warm = trial.y;
    } else {
      u_lo = u_trial;
    }
  }

  sys.set_level(u_hi);
  CenterResult center = analytic_center(sys, warm);
  result.stats.newton_iterations += center.newton_steps;

  // Normalizing by the level sensitivity Z turns the center multipliers into
  // epigraph KKT multipliers: stationarity in the level variable becomes
  // exact and stationarity in y is grad_norm / Z.
  double z_scale = 0.0;
  for (size_t a = 0; a < sys.active_tasks().size(); ++a) {
    const int i = sys.first_task_constraint() + static_cast<int>(a);
    z_scale += center.lambda[i] * sys.level_sensitivity(a);
  }
  result.stats.stationarity_residual =
      (z_scale > 0.0) ? center.grad_norm / z_scale : 0.0;
  result.stats.max_violation = sys.max_violation(center.y);

  result.time.resize(K);
  result.energy.resize(K);
  for (int k = 0; k < K; ++k) {
    result.time[k] = s.budgets.t_max * center.y[k];
    result.energy[k] = s.budgets.e_max * center.y[K + k];
  }
  result.level = u_hi;

  // KKT residual against the exact rate function: swap the surrogate cap
  // gradients for the true ones at the returned point and fold in the worst
  // normalized complementarity term.
  if (z_scale > 0.0) {
    sys.eval(center.y);
    VectorXd resid = VectorXd::Zero(2 * K);
    double comp = 0.0;
    for (int i = 0; i < sys.relaxed_count(); ++i) {
      VectorXd grad = sys.fgrad()[i];
      double fv = sys.fval()[i];
      const int cap0 = 2 + K;
      if (i >= cap0 && i < cap0 + K) {
        const int k = i - cap0;
        grad.setZero();
        grad[k] = sys.users()[k].gt / surrogates[k].cap_bits;
        grad[K + k] = sys.users()[k].ge / surrogates[k].cap_bits;
        fv = (sys.users()[k].value - surrogates[k].cap_bits) / surrogates[k].cap_bits;
      }
      resid.noalias() += center.lambda[i] * grad;
      comp = std::max(comp, center.lambda[i] * std::abs(fv) / z_scale);
    }
    for (int k = 0; k < K; ++k) {
      resid[k] -= center.mu_t[k];
      resid[K + k] -= center.mu_e[k];
      comp = std::max(comp, center.mu_t[k] * (center.y[k] - sys.time_floor_norm()) / z_scale);
      comp = std::max(comp, center.mu_e[k] * center.y[K + k] / z_scale);
    }
    result.exact_kkt_residual = std::max(resid.norm() / z_scale, comp);
  }
  return result;
}

DcpResult solve_dcp(const Scenario& s, double outer_tol, int max_outer) {
  if (outer_tol <= 0.0) {
    throw Error(Status::invalid_input, "solve_dcp: outer_tol must be > 0");
  }
  if (max_outer <= 0) {
    throw Error(Status::invalid_input, "solve_dcp: max_outer must be > 0");
  }
  const ScenarioIndex index = validate_scenario(s);
  const int K = static_cast<int>(s.users.size());

  DcpResult result;

  // No room for the interior-point floor: the zero allocation is the only
  // feasible point.
  if (s.budgets.t_max <= K * kSnapTime) {
    std::vector<double> zero(K, 0.0);
    result.allocation = evaluate_allocation(s, zero, zero);
    result.trace.objectives = {result.allocation.objective};
    result.trace.termination = DcpTermination::converged;
    return result;
  }

  FeasiblePoint point = initial_feasible_point(s);
  double obj = exact_objective(s, index, point.time, point.energy);
  result.trace.objectives.push_back(obj);
  result.trace.iterates.push_back(point);
  result.trace.termination = DcpTermination::max_iterations;

  for (int it = 0; it < max_outer; ++it) {
    const std::vector<SurrogateConstraint> surrogates =
        build_surrogate(s, point.time, point.energy);
    SubproblemResult sub = solve_convex_subproblem(s, surrogates);
    const double obj_new = exact_objective(s, index, sub.time, sub.energy);

    if (!(obj_new < obj)) {
      // The subproblem could not improve on its own anchor: fixed point.
      result.trace.termination = DcpTermination::converged;
      result.trace.kkt_residual = sub.exact_kkt_residual;
      break;
    }

    point.time = std::move(sub.time);
    point.energy = std::move(sub.energy);
    result.trace.objectives.push_back(obj_new);
    result.trace.inner.push_back(sub.stats);
    result.trace.iterates.push_back(point);
    result.trace.kkt_residual = sub.exact_kkt_residual;

    const double drop = obj - obj_new;
    obj = obj_new;
    if (drop <= outer_tol * std::max(obj, 1e-300)) {
      result.trace.termination = DcpTermination::converged;
      break;
    }
  }

  // Snap vanishing users to exactly zero for reporting.
  std::vector<double> t_final = point.time;
  std::vector<double> e_final = point.energy;
  for (int k = 0; k < K; ++k) {
    if (t_final[k] < kSnapTime) {
      t_final[k] = 0.0;
      e_final[k] = 0.0;
    }
  }
  result.allocation = evaluate_allocation(s, t_final, e_final);
  return result;
}

}  // namespace edgealloc
