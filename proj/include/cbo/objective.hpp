#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cbo/state.hpp"

namespace cbo {

/// Constants for the growth assumptions an objective is expected to satisfy:
///   |f(x) - f(y)| <= lipschitz_factor * (1 + |x| + |y|)^growth_exponent * |x - y|
///   c_lower * (|x|^ell - 1) <= f(x) - f_lower <= c_upper * (|x|^ell + 1)
/// Constants are hand-derived per function; for bounded objectives the lower
/// bound cannot hold globally, so validity may be restricted to a ball (see
/// the catalog comments).
struct GrowthMetadata {
    double lipschitz_factor = 0.0;  // L
    double growth_exponent = 0.0;   // s
    double c_lower = 0.0;           // c1
    double c_upper = 0.0;           // c2
    double ell = 0.0;               // moment exponent in the two-sided bound
};

struct Objective {
    std::string name;
    int dim = 0;
    std::function<double(const State&)> eval;
    std::optional<State> known_minimizer;
    std::optional<double> known_min_value;
    std::optional<GrowthMetadata> growth;

    double operator()(const State& x) const { return eval(x); }
};

/// Result of sampling-based verification of the growth bounds on a ball.
/// Only the tested radius is covered; no global claim is made.
struct GrowthCheckReport {
    int samples = 0;
    double radius = 0.0;
    long lipschitz_violations = 0;
    long lower_bound_violations = 0;
    long upper_bound_violations = 0;
    // Ratios of attained value to allowed bound; > 1 means a violation.
    double worst_lipschitz_ratio = 0.0;
    double worst_lower_ratio = 0.0;
    double worst_upper_ratio = 0.0;
    bool pass = false;
};

/// Samples pairs/points uniformly from the ball of given radius and checks
/// the growth bounds. Throws if the objective lacks growth metadata or a
/// known minimum value.
GrowthCheckReport check_growth(const Objective& f, int samples, double radius,
                               std::uint64_t seed);

Objective make_quadratic(int dim, const State& shift);
Objective make_rastrigin(int dim);
Objective make_ackley(int dim);

/// Quadratic (optionally shifted), Rastrigin, Ackley.
std::vector<Objective> benchmark_catalog(int dim, const State& quadratic_shift = {});

/// Lookup by name ("quadratic" | "rastrigin" | "ackley"); shift applies to the
/// quadratic only.
Objective make_objective(const std::string& name, int dim, const State& shift = {});

}  // namespace cbo
