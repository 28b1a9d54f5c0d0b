#pragma once

#include <cstdint>
#include <vector>

#include "cbo/consensus.hpp"
#include "cbo/dynamics.hpp"
#include "cbo/objective.hpp"

namespace cbo {

/// Drift/diffusion dissipativity constants of the rescaled dynamics, computed
/// from the closed-form expressions in terms of (lambda, sigma, kappa, alpha,
/// dim) and the consensus-map bounds l_m (Lipschitz-in-W2) and c_1
/// (second-moment growth).
struct DissipativityConstants {
    double frak_a = 0.0;  // pairwise contraction rate
    double frak_b = 0.0;  // W2^2 coupling coefficient
    double frak_c = 0.0;  // single-state confinement rate
    double K = 0.0;       // confinement offset coefficient
    double delta = 1.0;
    double l_m = 1.0;
    double c_1 = 1.0;
    bool regime_ok = false;  // frak_a > 2 frak_b and frak_c > 0
};

DissipativityConstants dissipativity_constants(double lambda, double sigma, double kappa,
                                               double alpha, int dim, double l_m, double c_1,
                                               double delta);
DissipativityConstants dissipativity_constants(const SimulationConfig& cfg, double l_m,
                                               double c_1, double delta);

/// Empirical consensus-map bounds over random empirical measures: l_m_hat is
/// the worst observed |m(mu) - m(nu)| / W2(mu, nu) with mu supported in the
/// ball of radius sqrt(R) and nu in the ball of radius 2 sqrt(R); c_1_hat the
/// worst |m(nu)| / nu(|.|^2)^{1/2}. 2*n_pairs pairs are streamed; the _first_half
/// fields hold the estimates after n_pairs, and stable reports whether doubling
/// moved either estimate by more than 20%.
struct LmC1Estimate {
    double l_m_hat = 0.0;
    double c_1_hat = 0.0;
    double l_m_first_half = 0.0;
    double c_1_first_half = 0.0;
    bool stable = false;
};

LmC1Estimate estimate_lm_c1(const Objective& f, double alpha, double R, int n_pairs,
                            std::uint64_t seed);

/// Monte-Carlo check of the two dissipativity inequalities (pairwise
/// contraction with the W2^2 coupling term, and single-state confinement).
/// Margins are LHS - RHS; a sample is a violation when its margin exceeds
/// 1e-9 * max(1, |RHS|).
struct InequalityReport {
    int n_samples = 0;
    int violations_contraction = 0;
    int violations_confinement = 0;
    double worst_margin_contraction = 0.0;  // most positive LHS - RHS observed
    double worst_margin_confinement = 0.0;
};

InequalityReport verify_dissipativity_inequalities(const SimulationConfig& cfg,
                                                   const Objective& f,
                                                   const DissipativityConstants& consts,
                                                   int n_samples, std::uint64_t seed,
                                                   double R = 10.0);

/// Softmin sharpness diagnostic on a fixed measure: ell(alpha) is the smoothed
/// minimum -(1/alpha) log sum_i w_i exp(-alpha f_i); as alpha grows it
/// decreases toward the best atom value.
struct LaplaceReport {
    std::vector<double> alphas;
    std::vector<double> ell;                  // smoothed minimum per alpha
    std::vector<double> ell_minus_min_value;  // ell(alpha) - objective.known_min_value
    std::vector<State> eta_mean;              // consensus point per alpha
    std::vector<double> f_at_eta_mean;
    double min_atom_f = 0.0;
    bool residual_nonincreasing = false;  // |ell(alpha) - min_atom_f| non-increasing
};

LaplaceReport laplace_diagnostic(const WeightedEmpiricalMeasure& mu, const Objective& f,
                                 const std::vector<double>& alphas);

/// Log-log least-squares fit of a decay curve over the last half of the
/// points, compared against the analytic exponent min(eps1, eps2/(3(dim+2))).
struct DecayFit {
    std::vector<double> times;
    std::vector<double> values;
    double fitted_exponent = 0.0;
    double fit_r2 = 0.0;
    double theory_exponent = 0.0;
    double reference_exponent = 0.0;  // eps2 / (3 (dim + 2))
};

DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values,
                   double eps1, double eps2, int dim);

}  // namespace cbo
