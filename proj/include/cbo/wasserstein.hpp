#pragma once

#include <cstdint>
#include <stdexcept>

#include "cbo/consensus.hpp"
#include "cbo/state.hpp"

namespace cbo {

/// Thrown when the exact solver is asked for more atoms than its budget.
struct BudgetExceeded : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Combined atom budget for the exact transport solver in dimension >= 2.
inline constexpr std::size_t kW2ExactBudget = 512;

/// Exact 2-Wasserstein distance between finite weighted point clouds.
/// d = 1 uses the quantile coupling (any size); otherwise the transport
/// problem is solved exactly on the joint support (combined atoms capped by
/// kW2ExactBudget; above it a BudgetExceeded asks the caller to fall back to
/// w2_sliced).
double w2_exact(const WeightedEmpiricalMeasure& mu, const WeightedEmpiricalMeasure& nu);

/// Exact solver on the bipartite transport formulation, regardless of d.
/// Successive shortest paths with potentials; cubic-time in the atom count.
double w2_exact_flow(const WeightedEmpiricalMeasure& mu, const WeightedEmpiricalMeasure& nu);

/// 1-D quantile coupling (exact for d = 1, any masses).
double w2_quantile_1d(const WeightedEmpiricalMeasure& mu, const WeightedEmpiricalMeasure& nu);

/// Sliced surrogate: sqrt of d times the average over random directions of
/// the exact squared 1-D distance of the projections (the factor d undoes the
/// expected squared-displacement loss of an isotropic projection). Still
/// lower-bound-flavored when the optimal pairing varies with the direction;
/// agreement with w2_exact is distribution dependent (see tests for the
/// tolerance this project relies on). For d = 1 it coincides with w2_exact.
double w2_sliced(const WeightedEmpiricalMeasure& mu, const WeightedEmpiricalMeasure& nu,
                 int n_projections, std::uint64_t seed);

}  // namespace cbo
