#pragma once

#include "model.hpp"
#include "types.hpp"

namespace edgealloc {

// Equal time slots: t_k = t_max/K, E_k = min(p_max t_k, e_max/K). Bits beyond
// a user's dataset cap are truncated (excess slot time is wasted, never
// reallocated).
Allocation time_fairness(const Scenario& s);

// Equal delivered bits: every user transmits at the uniform effective power
// p_eff = min(p_max, e_max/t_max) and gets time proportional to 1/R_k at that
// power, so t-weighted rates equalize the delivered bits before cap
// truncation. Zero-rate users get no time; all rates zero is a degenerate
// scenario error.
Allocation throughput_fairness(const Scenario& s);

}  // namespace edgealloc
