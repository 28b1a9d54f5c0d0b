#include "cbo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cbo/parallel.hpp"
#include "cbo/rng.hpp"
#include "cbo/wasserstein.hpp"

namespace cbo {

DissipativityConstants dissipativity_constants(double lambda, double sigma, double kappa,
                                               double alpha, int dim, double l_m, double c_1,
                                               double delta) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
    if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
    if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be >= 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    if (!(l_m > 0.0)) throw std::invalid_argument("l_m must be > 0");
    if (!(c_1 > 0.0)) throw std::invalid_argument("c_1 must be > 0");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");

    const double sigma2 = sigma * sigma;
    DissipativityConstants out;
    out.delta = delta;
    out.l_m = l_m;
    out.c_1 = c_1;
    out.frak_a = 2.0 * lambda - lambda * kappa - 2.0 * sigma2;
    out.frak_b = (lambda + 2.0 * sigma2 * kappa) * kappa * l_m * l_m;
    out.frak_c = (2.0 * lambda - lambda * kappa) - 2.0 * sigma2 * (1.0 + delta) * (1.0 + kappa);
    const double floor_term = 2.0 * sigma2 * static_cast<double>(dim) / (alpha * alpha);
    const double growth_term =
        lambda * kappa * c_1 * c_1 + 2.0 * sigma2 * (1.0 + delta) * (1.0 + kappa) * kappa * c_1 * c_1;
    out.K = std::max(floor_term, growth_term);
    out.regime_ok = (out.frak_a > 2.0 * out.frak_b) && (out.frak_c > 0.0);
    return out;
}

DissipativityConstants dissipativity_constants(const SimulationConfig& cfg, double l_m,
                                               double c_1, double delta) {
    return dissipativity_constants(cfg.lambda, cfg.sigma, cfg.kappa, cfg.alpha, cfg.dim, l_m, c_1,
                                   delta);
}

namespace {

using detail::parallel_indices;

// Equal-mass empirical measure with 2..64 atoms drawn uniformly in the ball of
// the given radius. Shared between the bound estimator and the inequality
// verifier so the estimated bounds cover the verifier's samples.
WeightedEmpiricalMeasure sample_ball_measure(Rng& rng, int dim, double radius) {
    const int n = 2 + static_cast<int>(rng.uniform() * 63.0);
    std::vector<State> points(static_cast<std::size_t>(n), State(static_cast<std::size_t>(dim)));
    for (State& x : points) rng.uniform_in_ball(dim, radius, x);
    return equal_mass_measure(points);
}

std::vector<double> eval_atoms(const Objective& f, const WeightedEmpiricalMeasure& mu) {
    std::vector<double> out(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) out[i] = f.eval(mu.points[i]);
    return out;
}

State sample_ball_point(Rng& rng, int dim, double radius) {
    State x(static_cast<std::size_t>(dim));
    rng.uniform_in_ball(dim, radius, x);
    return x;
}

}  // namespace

LmC1Estimate estimate_lm_c1(const Objective& f, double alpha, double R, int n_pairs,
                            std::uint64_t seed) {
    if (!(R > 0.0)) throw std::invalid_argument("R must be > 0");
    if (n_pairs < 1) throw std::invalid_argument("n_pairs must be >= 1");
    if (!(alpha > 0.0) || std::isinf(alpha))
        throw std::invalid_argument("alpha must be positive and finite");

    const long total = 2L * n_pairs;
    const double r_mu = std::sqrt(R);
    const double r_nu = 2.0 * std::sqrt(R);
    std::vector<double> l_ratio(static_cast<std::size_t>(total),
                                -std::numeric_limits<double>::infinity());
    std::vector<double> c_ratio(static_cast<std::size_t>(total),
                                -std::numeric_limits<double>::infinity());

    parallel_indices(total, [&](long i) {
        Rng rng(mix_key(seed, static_cast<std::uint64_t>(i)));
        const WeightedEmpiricalMeasure mu = sample_ball_measure(rng, f.dim, r_mu);
        const WeightedEmpiricalMeasure nu = sample_ball_measure(rng, f.dim, r_nu);
        const State m_mu = consensus_point(mu, eval_atoms(f, mu), alpha);
        const State m_nu = consensus_point(nu, eval_atoms(f, nu), alpha);
        const double w2 = w2_exact(mu, nu);
        if (w2 >= 1e-8) l_ratio[static_cast<std::size_t>(i)] = dist(m_mu, m_nu) / w2;
        const double moment = nu.second_moment();
        if (moment > 0.0) c_ratio[static_cast<std::size_t>(i)] = norm(m_nu) / std::sqrt(moment);
    });

    const auto max_over = [](const std::vector<double>& v, long count) {
        double best = 0.0;
        for (long i = 0; i < count; ++i) best = std::max(best, v[static_cast<std::size_t>(i)]);
        return best;
    };
    LmC1Estimate out;
    out.l_m_first_half = max_over(l_ratio, n_pairs);
    out.c_1_first_half = max_over(c_ratio, n_pairs);
    out.l_m_hat = max_over(l_ratio, total);
    out.c_1_hat = max_over(c_ratio, total);
    const auto within_20pct = [](double full, double half) {
        if (full == 0.0) return half == 0.0;
        return (full - half) <= 0.2 * full;
    };
    out.stable = within_20pct(out.l_m_hat, out.l_m_first_half) &&
                 within_20pct(out.c_1_hat, out.c_1_first_half);
    return out;
}

InequalityReport verify_dissipativity_inequalities(const SimulationConfig& cfg,
                                                   const Objective& f,
                                                   const DissipativityConstants& consts,
                                                   int n_samples, std::uint64_t seed, double R) {
    if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
    if (!(R > 0.0)) throw std::invalid_argument("R must be > 0");
    if (f.dim != cfg.dim) throw std::invalid_argument("objective dimension mismatch");

    const double lambda = cfg.lambda;
    const double sigma = cfg.sigma;
    const double kappa = cfg.kappa;
    const double floor = std::isinf(cfg.alpha) ? 0.0 : 1.0 / cfg.alpha;
    const double delta = consts.delta;
    const double r_mu = std::sqrt(R);
    const double r_nu = 2.0 * std::sqrt(R);
    const int dim = cfg.dim;

    std::vector<double> margin1(static_cast<std::size_t>(n_samples));
    std::vector<double> margin2(static_cast<std::size_t>(n_samples));
    std::vector<double> rhs1_scale(static_cast<std::size_t>(n_samples));
    std::vector<double> rhs2_scale(static_cast<std::size_t>(n_samples));

    parallel_indices(n_samples, [&](long i) {
        Rng rng(mix_key(seed, static_cast<std::uint64_t>(i)));
        const State x = sample_ball_point(rng, dim, r_nu);
        const State y = sample_ball_point(rng, dim, r_nu);
        const WeightedEmpiricalMeasure mu = sample_ball_measure(rng, dim, r_mu);
        const WeightedEmpiricalMeasure nu = sample_ball_measure(rng, dim, r_nu);
        const State m_mu = consensus_point(mu, eval_atoms(f, mu), cfg.alpha);
        const State m_nu = consensus_point(nu, eval_atoms(f, nu), cfg.alpha);

        // Pairwise contraction: 2 <x-y, b(x,mu)-b(y,nu)> + ||s(x,mu)-s(y,nu)||_F^2
        //   <= -frak_a |x-y|^2 + frak_b W2^2(mu, nu).
        double drift_term = 0.0;
        double diff_term = 0.0;
        for (int c = 0; c < dim; ++c) {
            const double gx = x[static_cast<std::size_t>(c)] - kappa * m_mu[static_cast<std::size_t>(c)];
            const double gy = y[static_cast<std::size_t>(c)] - kappa * m_nu[static_cast<std::size_t>(c)];
            const double dxy = x[static_cast<std::size_t>(c)] - y[static_cast<std::size_t>(c)];
            drift_term += dxy * (-lambda * gx + lambda * gy);
            const double sd = sigma * (std::fabs(gx) - std::fabs(gy));
            diff_term += sd * sd;
        }
        const double w2 = w2_exact(mu, nu);
        const double lhs1 = 2.0 * drift_term + diff_term;
        const double rhs1 = -consts.frak_a * dist_sq(x, y) + consts.frak_b * w2 * w2;
        margin1[static_cast<std::size_t>(i)] = lhs1 - rhs1;
        rhs1_scale[static_cast<std::size_t>(i)] = std::fabs(rhs1);

        // Confinement: 2 <x, b(x,nu)> + (1+delta) ||s(x,nu)||_F^2
        //   <= -frak_c |x|^2 + K (1 + delta + nu(|.|^2)).
        double drift2 = 0.0;
        double diff2 = 0.0;
        for (int c = 0; c < dim; ++c) {
            const double gx = x[static_cast<std::size_t>(c)] - kappa * m_nu[static_cast<std::size_t>(c)];
            drift2 += x[static_cast<std::size_t>(c)] * (-lambda * gx);
            const double sd = sigma * (floor + std::fabs(gx));
            diff2 += sd * sd;
        }
        const double lhs2 = 2.0 * drift2 + (1.0 + delta) * diff2;
        const double rhs2 = -consts.frak_c * norm_sq(x) + consts.K * (1.0 + delta + nu.second_moment());
        margin2[static_cast<std::size_t>(i)] = lhs2 - rhs2;
        rhs2_scale[static_cast<std::size_t>(i)] = std::fabs(rhs2);
    });

    InequalityReport report;
    report.n_samples = n_samples;
    report.worst_margin_contraction = -std::numeric_limits<double>::infinity();
    report.worst_margin_confinement = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_samples; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        if (margin1[idx] > 1e-9 * std::max(1.0, rhs1_scale[idx])) ++report.violations_contraction;
        if (margin2[idx] > 1e-9 * std::max(1.0, rhs2_scale[idx])) ++report.violations_confinement;
        report.worst_margin_contraction = std::max(report.worst_margin_contraction, margin1[idx]);
        report.worst_margin_confinement = std::max(report.worst_margin_confinement, margin2[idx]);
    }
    return report;
}

LaplaceReport laplace_diagnostic(const WeightedEmpiricalMeasure& mu, const Objective& f,
                                 const std::vector<double>& alphas) {
    mu.validate();
    if (f.dim != mu.dim()) throw std::invalid_argument("objective dimension mismatch");
    if (!f.known_min_value.has_value())
        throw std::invalid_argument("objective has no recorded minimum value");
    if (alphas.empty()) throw std::invalid_argument("alphas must be non-empty");
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!(alphas[i] > 0.0) || std::isinf(alphas[i]))
            throw std::invalid_argument("alphas must be positive and finite");
        if (i > 0 && !(alphas[i] > alphas[i - 1]))
            throw std::invalid_argument("alphas must be strictly increasing");
    }

    const std::vector<double> f_vals = eval_atoms(f, mu);
    LaplaceReport report;
    report.alphas = alphas;
    report.min_atom_f = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu.masses[i] > 0.0) report.min_atom_f = std::min(report.min_atom_f, f_vals[i]);

    double prev_residual = std::numeric_limits<double>::infinity();
    report.residual_nonincreasing = true;
    for (double alpha : alphas) {
        double max_exp = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < mu.size(); ++i)
            if (mu.masses[i] > 0.0) max_exp = std::max(max_exp, -alpha * f_vals[i]);
        double sum = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i)
            if (mu.masses[i] > 0.0) sum += mu.masses[i] * std::exp(-alpha * f_vals[i] - max_exp);
        const double ell = -(max_exp + std::log(sum)) / alpha;
        report.ell.push_back(ell);
        report.ell_minus_min_value.push_back(ell - *f.known_min_value);
        report.eta_mean.push_back(consensus_point(mu, f_vals, alpha));
        report.f_at_eta_mean.push_back(f.eval(report.eta_mean.back()));
        const double residual = std::fabs(ell - report.min_atom_f);
        if (residual > prev_residual + 1e-12) report.residual_nonincreasing = false;
        prev_residual = residual;
    }
    return report;
}

DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values,
                   double eps1, double eps2, int dim) {
    if (times.size() != values.size()) throw std::invalid_argument("times/values size mismatch");
    if (times.size() < 8) throw std::invalid_argument("need at least 8 points");
    if (!(eps1 > 0.0) || !(eps2 > 0.0)) throw std::invalid_argument("eps1, eps2 must be > 0");
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0.0)) throw std::invalid_argument("times must be positive");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw std::invalid_argument("times must be strictly increasing");
        if (!(values[i] > 0.0)) throw std::invalid_argument("nonpositive values");
    }

    DecayFit fit;
    fit.times = times;
    fit.values = values;

    const std::size_t start = times.size() / 2;
    const std::size_t m = times.size() - start;
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = start; i < times.size(); ++i) {
        mean_x += std::log(times[i]);
        mean_y += std::log(values[i]);
    }
    mean_x /= static_cast<double>(m);
    mean_y /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = start; i < times.size(); ++i) {
        const double dx = std::log(times[i]) - mean_x;
        const double dy = std::log(values[i]) - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
    }
    fit.fitted_exponent = sxy / sxx;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = start; i < times.size(); ++i) {
        const double dx = std::log(times[i]) - mean_x;
        const double dy = std::log(values[i]) - mean_y;
        const double resid = dy - fit.fitted_exponent * dx;
        ss_res += resid * resid;
        ss_tot += dy * dy;
    }
    fit.fit_r2 = (ss_tot == 0.0 || ss_res == 0.0) ? 1.0 : 1.0 - ss_res / ss_tot;
    fit.reference_exponent = eps2 / (3.0 * static_cast<double>(dim + 2));
    fit.theory_exponent = std::min(eps1, fit.reference_exponent);
    return fit;
}

}  // namespace cbo
