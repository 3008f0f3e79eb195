#include "baseline.hpp"

#include <algorithm>
#include <cmath>

namespace edgealloc {

Allocation time_fairness(const Scenario& s) {
  const ScenarioIndex index = validate_scenario(s);
  const int K = static_cast<int>(s.users.size());
  std::vector<double> t(K, s.budgets.t_max / K);
  std::vector<double> e(K), bits(K);
  for (int k = 0; k < K; ++k) {
    e[k] = std::min(s.budgets.p_max * t[k], s.budgets.e_max / K);
    const double cap = s.users[k].dataset_size * s.users[k].bits_per_sample;
    bits[k] = std::min(theta(t[k], e[k], s.users[k], s.radio), cap);
  }
  return finalize_allocation(s, index, t, e, bits);
}

Allocation throughput_fairness(const Scenario& s) {
  const ScenarioIndex index = validate_scenario(s);
  const int K = static_cast<int>(s.users.size());
  if (s.budgets.t_max <= 0.0) {
    std::vector<double> zero(K, 0.0);
    return finalize_allocation(s, index, zero, zero, zero);
  }
  const double p_eff = std::min(s.budgets.p_max, s.budgets.e_max / s.budgets.t_max);

  std::vector<double> rate(K, 0.0);
  double inv_rate_sum = 0.0;
  for (int k = 0; k < K; ++k) {
    const UserLink& u = s.users[k];
    if (u.fixed_rate) {
      rate[k] = s.radio.alpha * (*u.fixed_rate);
    } else {
      rate[k] = s.radio.alpha * s.radio.bandwidth *
                std::log2(1.0 + p_eff * u.channel_gain / s.radio.noise_power);
    }
    if (rate[k] > 0.0) inv_rate_sum += 1.0 / rate[k];
  }
  if (inv_rate_sum == 0.0) {
    throw Error(Status::invalid_input,
                "throughput fairness is undefined: every user has rate zero");
  }

  std::vector<double> t(K, 0.0), e(K, 0.0), bits(K, 0.0);
  for (int k = 0; k < K; ++k) {
    if (rate[k] <= 0.0) continue;
    t[k] = s.budgets.t_max * (1.0 / rate[k]) / inv_rate_sum;
    e[k] = p_eff * t[k];
    const double cap = s.users[k].dataset_size * s.users[k].bits_per_sample;
    bits[k] = std::min(t[k] * rate[k], cap);
  }
  return finalize_allocation(s, index, t, e, bits);
}

}  // namespace edgealloc
