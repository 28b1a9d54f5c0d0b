#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbo/consensus.hpp"
#include "cbo/objective.hpp"
#include "cbo/state.hpp"
#include "cbo/weights.hpp"

namespace cbo {

/// Which interacting system is integrated. All share the Euler-Maruyama
/// scheme; they differ in where the consensus point comes from.
enum class Variant {
    StandardCBO_N,           // N particles, consensus of the current cloud, no rescaling
    RescaledCBO_N,           // N particles, kappa-rescaled drift + noise floor 1/alpha
    MeanFieldWeighted_N,     // N particles, consensus of the flow-weighted history of the cloud
    SelfInteracting,         // single particle, consensus of its own occupation average
    SelfInteractingWeighted, // single particle, flow-weighted history
    MarkovianReference,      // single particle, frozen external consensus point
    MultiSelfInteracting,    // N particles sharing the pooled occupation consensus
};

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

bool is_single_particle(Variant v);

struct SimulationConfig {
    Variant variant = Variant::SelfInteracting;
    double lambda = 1.0;
    double sigma = 0.2;
    double kappa = 0.1;   // must lie in (0,1) for the rescaled family
    double alpha = 100.0; // +infinity disables the 1/alpha noise floor
    int dim = 2;
    double dt = 0.01;
    double t_final = 10.0;
    int n_particles = 1;  // particle variants only
    std::uint64_t seed = 0;
    WeightFlow weight_flow = WeightFlow::lebesgue();
    State init_point;               // defaults to the origin
    std::vector<State> init_cloud;  // optional; single point is replicated
    long snapshot_stride = 0;       // 0: every step while <= 1e5 steps, else ~1e5 rows

    long n_steps() const;
    long resolved_stride() const;
    void validate() const;  // throws invalid_argument on hard violations
    bool lambda_regime_ok() const { return lambda > 8.0 * sigma * sigma; }
};

/// Raised when a state coordinate stops being finite; `step` is the index of
/// the Euler step that produced it. Nothing is clamped, the run is abandoned.
struct BlowUpError : std::runtime_error {
    long step;
    explicit BlowUpError(long s)
        : std::runtime_error("state blew up at step " + std::to_string(s)), step(s) {}
};

/// Grid trajectory of one run. Rows are kept at the stride grid (always
/// including steps 0 and n_steps); consensus_log[j] is the consensus point in
/// force at retained_steps[j].
struct Trajectory {
    SimulationConfig config;
    long n_steps = 0;
    std::vector<long> retained_steps;
    std::vector<std::vector<State>> states;  // [row][particle]
    std::vector<State> consensus_log;        // [row]

    int dim() const { return config.dim; }
    int n_particles() const { return states.empty() ? 0 : static_cast<int>(states[0].size()); }
    double time_at(std::size_t row) const { return retained_steps[row] * config.dt; }
    const std::vector<State>& final_states() const { return states.back(); }
    State mean_final_state() const;
};

/// One Euler-Maruyama step of the plain dynamics:
///   x' = x - lambda (x - m) dt + sigma |x_i - m_i| sqrt(dt) z_i per coordinate.
State step_standard(const State& x, const State& m, double lambda, double sigma, double dt,
                    std::span<const double> noise);

/// One step of the rescaled dynamics: drift toward kappa*m and diagonal noise
/// sigma (1/alpha + |x_i - kappa m_i|). alpha = +infinity drops the floor.
State step_rescaled(const State& x, const State& m, double lambda, double sigma, double kappa,
                    double alpha, double dt, std::span<const double> noise);

/// Diagonal of the anisotropic diffusion operator: D(z) = diag(|z_1|..|z_d|).
State anisotropic_diag(const State& z);

/// N-particle systems (StandardCBO_N, RescaledCBO_N, MeanFieldWeighted_N).
Trajectory run_particle_system(const SimulationConfig& cfg, const Objective& f);

/// Single self-interacting particle (SelfInteracting uses the streaming
/// occupation average; SelfInteractingWeighted uses the configured flow over
/// the snapshot grid).
Trajectory run_self_interacting(const SimulationConfig& cfg, const Objective& f);

/// Single particle with the consensus frozen at m_star.
Trajectory run_markovian_reference(const SimulationConfig& cfg, const Objective& f,
                                   const State& m_star);

/// N self-interacting particles sharing the consensus of their pooled
/// occupation mass. With n_particles = 1 this reproduces run_self_interacting
/// bit for bit.
Trajectory run_multi_self_interacting(const SimulationConfig& cfg, const Objective& f);

/// Dispatch on cfg.variant (m_star required for MarkovianReference).
Trajectory run(const SimulationConfig& cfg, const Objective& f, const State* m_star = nullptr);

namespace detail {

/// Noise injection point for tests: fills the per-(particle, step) Gaussian
/// increments. The default draws from noise_stream(seed, particle, step).
using NoiseFn = std::function<void(int particle, long step, std::span<double> out)>;

Trajectory run_with_noise(const SimulationConfig& cfg, const Objective& f, const State* m_star,
                          const NoiseFn& noise);

}  // namespace detail

/// Equal-mass measure over the retained states with step * dt < t_upper,
/// pooled over particles, then thinned to at most max_atoms (stride
/// subsample). Used for occupation-measure diagnostics.
WeightedEmpiricalMeasure occupation_measure(const Trajectory& traj, double t_upper,
                                            std::size_t max_atoms);

/// Equal-mass measure over the post-burn-in retained rows (pooled particles).
WeightedEmpiricalMeasure estimate_invariant_measure(const Trajectory& traj,
                                                    double burn_in_fraction);

/// Deterministic stride thinning to at most max_atoms (equal-mass input).
WeightedEmpiricalMeasure thin_measure(const WeightedEmpiricalMeasure& mu, std::size_t max_atoms);

}  // namespace cbo
