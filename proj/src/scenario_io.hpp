#pragma once

#include <string>

#include <json.hpp>

#include "sim.hpp"
#include "types.hpp"

namespace edgealloc {

// Scenario JSON schema (units at the boundary, linear SI inside):
//   radio:   bandwidth_hz, noise_psd_dbm_hz, alpha (default 1),
//            pathloss_db (needed only with random channels)
//   budgets: t_max_s, e_max_j, p_max_w
//   users:   id, bits_per_sample, dataset_size, and one of
//            channel_gain_db | "channel": "random"; optional
//            fixed_rate_samples_per_s (overrides the log rate)
//   tasks:   id, a, b, c, users
// Optional: allow_overlapping_groups (default false).

ScenarioTemplate parse_scenario_template(const nlohmann::json& j);

// For solving directly: rejects "channel": "random" users.
Scenario parse_scenario(const std::string& text);

// Sweep JSON: scenario (template as above), sweep {parameter, values,
// paired_p_max_w?}, monte_carlo_runs, seed, schemes, perturb_fraction,
// epsilon, outer_tol, max_outer.
SweepConfig parse_sweep_config(const std::string& text);

Scheme scheme_from_name(const std::string& name);

// Built-in sweep configs: fig2a, fig2b, vehicular, k4_vs_k6.
// Throws Error(invalid_input) listing the valid names.
std::string builtin_config(const std::string& name);
std::vector<std::string> builtin_config_names();

// Deterministic short number formatting shared by every CSV writer.
std::string fmt_g(double v);

nlohmann::json allocation_to_json(const Scenario& s, const Allocation& alloc);
std::string allocation_users_csv(const Scenario& s, const Allocation& alloc);

nlohmann::json summary_to_json(const MonteCarloSummary& summary);
std::string summary_to_csv(const MonteCarloSummary& summary);

nlohmann::json vehicular_report_to_json(const VehicularReport& report);

}  // namespace edgealloc
