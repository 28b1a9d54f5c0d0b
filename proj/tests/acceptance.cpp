// End-to-end acceptance checks for the library. Each check prints exactly one
// [PASS]/[FAIL] line; the process exits nonzero if any check fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "cbo/consensus.hpp"
#include "cbo/dynamics.hpp"
#include "cbo/harness.hpp"
#include "cbo/metrics.hpp"
#include "cbo/objective.hpp"
#include "cbo/rng.hpp"
#include "cbo/wasserstein.hpp"

using namespace cbo;

namespace {

struct CheckResult {
    bool ok = false;
    std::string note;
};

int g_failures = 0;

void run_check(const std::string& label, const std::function<CheckResult()>& body) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult res;
    try {
        res = body();
    } catch (const std::exception& e) {
        res.ok = false;
        res.note = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!res.ok) ++g_failures;
    std::printf("[%s] %s (%.1fs%s%s)\n", res.ok ? "PASS" : "FAIL", label.c_str(), secs,
                res.note.empty() ? "" : ": ", res.note.c_str());
    std::fflush(stdout);
}

SimulationConfig concentration_config() {
    SimulationConfig cfg;
    cfg.variant = Variant::SelfInteracting;
    cfg.lambda = 1.0;
    cfg.sigma = 0.2;
    cfg.kappa = 0.1;
    cfg.alpha = 100.0;
    cfg.dim = 2;
    cfg.dt = 0.01;
    cfg.t_final = 200.0;
    cfg.init_point = {1.0, 1.0};
    cfg.seed = 2024;
    return cfg;
}

WeightedEmpiricalMeasure pooled_window(const SimulationConfig& base, const Objective& f,
                                       int replicas, double burn_in) {
    std::vector<State> points;
    for (int r = 0; r < replicas; ++r) {
        SimulationConfig cfg = base;
        cfg.seed = mix_key(base.seed, static_cast<std::uint64_t>(r));
        const WeightedEmpiricalMeasure window =
            estimate_invariant_measure(run(cfg, f), burn_in);
        points.insert(points.end(), window.points.begin(), window.points.end());
    }
    return equal_mass_measure(points);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

double brute_force_w2(const WeightedEmpiricalMeasure& a, const WeightedEmpiricalMeasure& b) {
    const std::size_t n = a.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) cost += dist_sq(a.points[i], b.points[perm[i]]);
        best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::sqrt(best / static_cast<double>(n));
}

WeightedEmpiricalMeasure random_equal_mass(Rng& rng, int n, int dim, double radius) {
    std::vector<State> pts(static_cast<std::size_t>(n), State(static_cast<std::size_t>(dim)));
    for (State& x : pts) rng.uniform_in_ball(dim, radius, x);
    return equal_mass_measure(pts);
}

}  // namespace

int main() {
    const Objective shifted = make_objective("quadratic", 2, {1.0, 1.0});
    const double kappa = 0.1;
    WeightedEmpiricalMeasure occupation;  // built by the first check, reused by the fourth

    run_check("long-run terminal states land on kappa times the minimizer", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        const SimulationConfig base = concentration_config();
        State terminal_mean(2, 0.0);
        std::vector<State> points;  // full occupation, pooled over replicas
        for (int r = 0; r < 20; ++r) {
            SimulationConfig cfg = base;
            cfg.seed = mix_key(base.seed, static_cast<std::uint64_t>(r));
            const Trajectory traj = run(cfg, shifted);
            for (std::size_t c = 0; c < 2; ++c) terminal_mean[c] += traj.states.back()[0][c];
            const WeightedEmpiricalMeasure occ = estimate_invariant_measure(traj, 0.0);
            points.insert(points.end(), occ.points.begin(), occ.points.end());
        }
        for (double& v : terminal_mean) v /= 20.0;
        occupation = equal_mass_measure(points);

        const State mean = occupation.mean();
        std::vector<double> values(occupation.size());
        for (std::size_t i = 0; i < occupation.size(); ++i)
            values[i] = shifted.eval(occupation.points[i]);
        const State m_alpha = consensus_point(occupation, values, 100.0);
        double residual = 0.0;
        for (std::size_t c = 0; c < 2; ++c) {
            const double d = mean[c] - kappa * m_alpha[c];
            residual += d * d;
        }
        residual = std::sqrt(residual);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        CheckResult res;
        res.ok = std::abs(terminal_mean[0] - kappa) <= 0.15 &&
                 std::abs(terminal_mean[1] - kappa) <= 0.15 && residual <= 0.1 && secs <= 60.0;
        res.note = "terminal mean=(" + fmt(terminal_mean[0]) + "," + fmt(terminal_mean[1]) +
                   "), residual=" + fmt(residual);
        return res;
    });

    run_check("single-particle occupation tracks the rescaled particle system", [&] {
        ExperimentSpec a;
        a.name = "self_interacting";
        a.objective_name = "quadratic";
        a.objective_shift = {1.0, 1.0};
        a.base_config = concentration_config();
        a.base_config.seed = 11;
        a.replicas = 10;
        a.burn_in_fraction = 0.5;

        ExperimentSpec b = a;
        b.name = "rescaled_cloud";
        b.base_config.variant = Variant::RescaledCBO_N;
        b.base_config.n_particles = 50;
        b.base_config.seed = 22;

        const ComparisonReport report = compare_variants(a, b);
        CheckResult res;
        const bool decays_a = report.a.fit.fitted_exponent < 0.0 && report.a.fit.fit_r2 >= 0.5;
        const bool decays_b = report.b.fit.fitted_exponent < 0.0 && report.b.fit.fit_r2 >= 0.5;
        res.ok = report.terminal_w2 <= 0.2 && decays_a && decays_b;
        res.note = "terminal_w2=" + fmt(report.terminal_w2) +
                   ", slopes=" + fmt(report.a.fit.fitted_exponent) + "/" +
                   fmt(report.b.fit.fitted_exponent) + ", r2=" + fmt(report.a.fit.fit_r2) + "/" +
                   fmt(report.b.fit.fit_r2);
        return res;
    });

    run_check("long-run occupation forgets the start point", [&] {
        SimulationConfig lo = concentration_config();
        lo.init_point = {-5.0, -5.0};
        lo.seed = 31;
        SimulationConfig hi = concentration_config();
        hi.init_point = {5.0, 5.0};
        hi.seed = 32;
        const WeightedEmpiricalMeasure from_lo =
            thin_measure(pooled_window(lo, shifted, 10, 0.5), 256);
        const WeightedEmpiricalMeasure from_hi =
            thin_measure(pooled_window(hi, shifted, 10, 0.5), 256);
        const double w2 = w2_exact(from_lo, from_hi);
        CheckResult res;
        res.ok = w2 <= 0.25;
        res.note = "w2=" + fmt(w2);
        return res;
    });

    run_check("smoothed minimum of the occupation window tightens with sharpness", [&] {
        CheckResult res;
        if (occupation.size() == 0) {
            res.note = "occupation window unavailable";
            return res;
        }
        const LaplaceReport rep =
            laplace_diagnostic(occupation, shifted, {1.0, 10.0, 100.0, 1000.0});
        bool monotone = true;
        for (std::size_t i = 1; i < rep.ell_minus_min_value.size(); ++i)
            if (rep.ell_minus_min_value[i] > rep.ell_minus_min_value[i - 1] + 1e-12)
                monotone = false;
        res.ok = monotone && rep.ell_minus_min_value.back() <= 0.05;
        res.note = "residual(1000)=" + fmt(rep.ell_minus_min_value.back());
        return res;
    });

    run_check("dissipativity inequalities hold with estimated consensus bounds", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        SimulationConfig cfg;
        cfg.variant = Variant::SelfInteracting;
        cfg.lambda = 1.0;
        cfg.sigma = 0.3;
        cfg.kappa = 0.05;
        cfg.alpha = 1.0;
        cfg.dim = 2;
        cfg.dt = 0.01;
        cfg.t_final = 1.0;
        const Objective f = make_objective("quadratic", 2);
        const LmC1Estimate bounds = estimate_lm_c1(f, cfg.alpha, 10.0, 10000, 91);
        const DissipativityConstants consts =
            dissipativity_constants(cfg, bounds.l_m_hat, bounds.c_1_hat, 1.0);
        const InequalityReport report =
            verify_dissipativity_inequalities(cfg, f, consts, 10000, 92);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        CheckResult res;
        res.ok = bounds.stable && report.violations_contraction == 0 &&
                 report.violations_confinement == 0 && secs <= 120.0;
        res.note = "l_m=" + fmt(bounds.l_m_hat) + ", c_1=" + fmt(bounds.c_1_hat) +
                   ", violations=" + std::to_string(report.violations_contraction) + "/" +
                   std::to_string(report.violations_confinement) + ", " + fmt(secs) + "s";
        return res;
    });

    run_check("closed-form constants match an independent re-derivation", [&] {
        Rng rng(4242);
        int mismatches = 0;
        for (int k = 0; k < 1000; ++k) {
            const double lambda = rng.uniform(0.1, 5.0);
            const double sigma = rng.uniform(0.0, 1.5);
            const double kap = rng.uniform(0.0, 0.9);
            const double alpha = rng.uniform(1.0, 1e4);
            const int dim = 1 + static_cast<int>(rng.uniform() * 6.0);
            const double l_m = rng.uniform(0.1, 3.0);
            const double c_1 = rng.uniform(0.1, 3.0);
            const double delta = rng.uniform(0.1, 2.0);
            const DissipativityConstants got =
                dissipativity_constants(lambda, sigma, kap, alpha, dim, l_m, c_1, delta);

            const double s2 = sigma * sigma;
            const double a = 2.0 * lambda - lambda * kap - 2.0 * s2;
            const double b = (lambda + 2.0 * s2 * kap) * kap * l_m * l_m;
            const double c = 2.0 * lambda - lambda * kap - 2.0 * s2 * (1.0 + delta) * (1.0 + kap);
            const double K =
                std::max(2.0 * s2 * dim / (alpha * alpha),
                         (lambda + 2.0 * s2 * (1.0 + delta) * (1.0 + kap)) * kap * c_1 * c_1);
            const auto close = [](double x, double y) {
                return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y));
            };
            if (!close(got.frak_a, a) || !close(got.frak_b, b) || !close(got.frak_c, c) ||
                !close(got.K, K) || got.regime_ok != (a > 2.0 * b && c > 0.0))
                ++mismatches;
        }
        CheckResult res;
        res.ok = mismatches == 0;
        res.note = std::to_string(mismatches) + " mismatches over 1000 tuples";
        return res;
    });

    run_check("point clouds freeze under the standard drift and move once rescaled", [&] {
        SimulationConfig cfg;
        cfg.variant = Variant::StandardCBO_N;
        cfg.lambda = 1.0;
        cfg.sigma = 0.2;
        cfg.kappa = 0.5;  // ignored by the standard kernel
        cfg.alpha = 100.0;
        cfg.dim = 2;
        cfg.dt = 0.01;
        cfg.t_final = 10.0;  // 1000 steps
        cfg.n_particles = 8;
        cfg.init_cloud.assign(8, State{3.0, -4.0});
        const Trajectory frozen = run(cfg, make_objective("quadratic", 2));
        bool stationary = true;
        for (const auto& row : frozen.states)
            for (const State& x : row)
                if (x != State{3.0, -4.0}) stationary = false;
        for (const State& m : frozen.consensus_log)
            if (m != State{3.0, -4.0}) stationary = false;

        SimulationConfig moved = cfg;
        moved.variant = Variant::RescaledCBO_N;
        moved.kappa = 0.1;
        moved.t_final = moved.dt;
        const Trajectory one = run(moved, make_objective("quadratic", 2));
        double displacement = 0.0;
        for (const State& x : one.states.back()) displacement += dist(x, State{3.0, -4.0});

        CheckResult res;
        res.ok = stationary && displacement > 0.0;
        res.note = "rescaled first-step displacement=" + fmt(displacement);
        return res;
    });

    run_check("delayed sampling pins the consensus to the start point", [&] {
        SimulationConfig cfg;
        cfg.variant = Variant::SelfInteractingWeighted;
        cfg.lambda = 1.0;
        cfg.sigma = 0.3;
        cfg.kappa = 0.1;
        cfg.alpha = 100.0;
        cfg.dim = 2;
        cfg.dt = 0.01;
        cfg.t_final = 2.0;
        cfg.init_point = {2.0, -1.0};
        const double tau = 1.0 / cfg.t_final;
        cfg.weight_flow = WeightFlow::sampled_delay(tau, 2.0 * tau);

        const Trajectory traj = run(cfg, make_objective("quadratic", 2));
        int rows_checked = 0;
        bool pinned = true;
        for (std::size_t row = 0; row < traj.retained_steps.size(); ++row) {
            const double t = traj.time_at(row);
            if (std::floor(t / tau) > 1.0) continue;
            ++rows_checked;
            if (traj.consensus_log[row] != cfg.init_point) pinned = false;
        }
        CheckResult res;
        res.ok = pinned && rows_checked > 0;
        res.note = std::to_string(rows_checked) + " rows bitwise at the start point";
        return res;
    });

    run_check("exact transport distance matches brute force and is a metric", [&] {
        Rng rng(515);
        double worst_gap = 0.0;
        for (int k = 0; k < 200; ++k) {
            const int dim = 1 + k % 3;
            const int n = 1 + static_cast<int>(rng.uniform() * 6.0);
            const WeightedEmpiricalMeasure a = random_equal_mass(rng, n, dim, 3.0);
            const WeightedEmpiricalMeasure b = random_equal_mass(rng, n, dim, 3.0);
            worst_gap = std::max(worst_gap, std::abs(w2_exact(a, b) - brute_force_w2(a, b)));
        }

        double worst_axiom = 0.0;
        for (int k = 0; k < 500; ++k) {
            const int n = 2 + static_cast<int>(rng.uniform() * 7.0);
            const WeightedEmpiricalMeasure a = random_equal_mass(rng, n, 2, 3.0);
            const WeightedEmpiricalMeasure b = random_equal_mass(rng, n, 2, 3.0);
            const WeightedEmpiricalMeasure c = random_equal_mass(rng, n, 2, 3.0);
            const double ab = w2_exact(a, b);
            const double ba = w2_exact(b, a);
            const double ac = w2_exact(a, c);
            const double cb = w2_exact(c, b);
            worst_axiom = std::max(worst_axiom, std::abs(ab - ba));
            worst_axiom = std::max(worst_axiom, ab - (ac + cb));
            worst_axiom = std::max(worst_axiom, w2_exact(a, a));
        }
        CheckResult res;
        res.ok = worst_gap <= 1e-9 && worst_axiom <= 1e-9;
        res.note = "worst brute-force gap=" + fmt(worst_gap) +
                   ", worst axiom slack=" + fmt(worst_axiom);
        return res;
    });

    run_check("multi-particle system at n=1 reproduces the single-particle law", [&] {
        SimulationConfig cfg = concentration_config();
        cfg.variant = Variant::MultiSelfInteracting;
        cfg.t_final = 5.0;
        cfg.sigma = 0.3;
        cfg.seed = 7;
        SimulationConfig single = cfg;
        single.variant = Variant::SelfInteracting;

        const Objective f = make_objective("quadratic", 2);
        const Trajectory a = run(cfg, f);
        const Trajectory b = run(single, f);
        CheckResult res;
        res.ok = a.states == b.states && a.consensus_log == b.consensus_log;
        res.note = std::to_string(a.retained_steps.size()) + " rows compared bitwise";
        return res;
    });

    if (g_failures > 0) {
        std::printf("%d of 10 checks failed\n", g_failures);
        return 1;
    }
    std::printf("all 10 checks passed\n");
    return 0;
}
