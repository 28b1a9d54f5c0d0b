#pragma once

#include <string>
#include <vector>

namespace cbo {

/// Family of probability measures pi_t on [0,1] that reweight a trajectory's
/// history when forming its consensus point.
///
///  - DiracAtOne: all mass at s = 1 (only the current state matters).
///  - Lebesgue:   uniform on [0,1] (plain occupation average). The simulator
///                integrates this flow in streaming form; the atom
///                discretization below is for diagnostics only.
///  - SampledDelay: (1/n_t) sum_{k=0}^{n_t-1} delta at max((k*tau-theta)/t, 0)
///                with n_t = ceil(t/tau); sampling on a tau-grid delayed by
///                theta, so the most recent theta-window is excluded.
enum class WeightFlowKind { DiracAtOne, Lebesgue, SampledDelay };

struct WeightFlow {
    WeightFlowKind kind = WeightFlowKind::Lebesgue;
    double tau = 0.0;    // SampledDelay sampling period
    double theta = 0.0;  // SampledDelay delay, >= 0
    int lebesgue_resolution = 10000;

    static WeightFlow dirac_at_one() { return {WeightFlowKind::DiracAtOne, 0, 0, 0}; }
    static WeightFlow lebesgue(int resolution = 10000) {
        return {WeightFlowKind::Lebesgue, 0, 0, resolution};
    }
    static WeightFlow sampled_delay(double tau, double theta) {
        return {WeightFlowKind::SampledDelay, tau, theta, 0};
    }
};

std::string to_string(WeightFlowKind kind);
WeightFlowKind weight_flow_kind_from_string(const std::string& s);

/// Discrete measure on [0,1]: locations with matching nonnegative masses
/// summing to 1. Coincident SampledDelay atoms are merged.
struct AtomList {
    std::vector<double> locations;
    std::vector<double> masses;

    std::size_t size() const { return locations.size(); }
    double mass_sum() const;
};

/// Atom representation of pi_t at time t > 0. Lebesgue uses the midpoint rule
/// with `resolution` equal-mass atoms at (k + 1/2)/resolution.
AtomList atoms_at(const WeightFlow& flow, double t, int lebesgue_resolution);
AtomList atoms_at(const WeightFlow& flow, double t);

/// Numerical check of the two admissibility-class criteria for a flow:
/// boundedness of  I1 = int s^-eps pi_t(ds)  against frak_a/frak_b, and
/// stabilization of the truncated integrals
///   I2 = int min(t^eps, s^-eps) pi_t(ds)
///   I3 = int int min(t^eps, |s1-s2|^-eps) pi_t(ds1) pi_t(ds2).
/// The truncation min(t^eps, .) is applied at the singular points (s = 0,
/// s1 = s2) of all three integrands so every evaluation is finite.
struct ClassReport {
    std::vector<double> t_grid;
    std::vector<double> i1;  // int s^-eps
    std::vector<double> i2;  // truncated single integral
    std::vector<double> i3;  // truncated double integral
    double eps = 0.0;
    double threshold = 0.0;  // frak_a / frak_b (infinite when frak_b = 0)
    bool pi1_plausible = false;
    bool pi2_plausible = false;
};

ClassReport class_diagnostic(const WeightFlow& flow, double eps, double frak_a, double frak_b,
                             const std::vector<double>& t_grid, int lebesgue_resolution = 10000);

}  // namespace cbo
