#pragma once

#include "wpbc/schemes.hpp"

namespace wpbc {

/// Leader optimizes beta and the schedule at an externally fixed energy
/// price; the follower still plays the closed-form response.
GameOutcome solve_fixed_price(const Network& net, const CostModel& cost, double p_l,
                              const SolveOptions& opts = {}, const ScheduleMask& mask = {});

/// Default fixed price: midpoint of [b_m, price_cap], i.e. b_m + a_m p_s_max.
double default_fixed_price(const CostModel& cost);

/// Social-welfare benchmark: block coordinate ascent on (P_S, beta, schedule)
/// maximizing p_r R_sum - beta (a_m P_S^2 + b_m P_S). The returned strategy
/// carries the price that would induce P_S*, and `trace` holds welfare values.
GameOutcome solve_social_welfare(const Network& net, const CostModel& cost,
                                 const SolveOptions& opts = {}, const ScheduleMask& mask = {});

enum class FixedMode {
  Bbcm,   // backscatter only
  Httcm,  // harvest-then-transmit only
  Tdma,   // both modes, rigid equal-slot schedule, price is the only knob
};

GameOutcome solve_fixed_mode(const Network& net, const CostModel& cost, FixedMode mode,
                             const SolveOptions& opts = {});

/// u_social(equilibrium) / u_social(welfare optimum), clamped to [0, 1].
/// Zero when either side failed to negotiate or the optimum is non-positive.
double price_of_anarchy(const GameOutcome& equilibrium, const GameOutcome& welfare_optimum);

}  // namespace wpbc
