#include "cbo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "cbo/rng.hpp"

namespace cbo {

std::string to_string(Variant v) {
    switch (v) {
        case Variant::StandardCBO_N: return "StandardCBO_N";
        case Variant::RescaledCBO_N: return "RescaledCBO_N";
        case Variant::MeanFieldWeighted_N: return "MeanFieldWeighted_N";
        case Variant::SelfInteracting: return "SelfInteracting";
        case Variant::SelfInteractingWeighted: return "SelfInteractingWeighted";
        case Variant::MarkovianReference: return "MarkovianReference";
        case Variant::MultiSelfInteracting: return "MultiSelfInteracting";
    }
    throw std::invalid_argument("unknown variant enum value");
}

Variant variant_from_string(const std::string& s) {
    if (s == "StandardCBO_N") return Variant::StandardCBO_N;
    if (s == "RescaledCBO_N") return Variant::RescaledCBO_N;
    if (s == "MeanFieldWeighted_N") return Variant::MeanFieldWeighted_N;
    if (s == "SelfInteracting") return Variant::SelfInteracting;
    if (s == "SelfInteractingWeighted") return Variant::SelfInteractingWeighted;
    if (s == "MarkovianReference") return Variant::MarkovianReference;
    if (s == "MultiSelfInteracting") return Variant::MultiSelfInteracting;
    throw std::invalid_argument("unknown variant: " + s);
}

bool is_single_particle(Variant v) {
    switch (v) {
        case Variant::SelfInteracting:
        case Variant::SelfInteractingWeighted:
        case Variant::MarkovianReference:
            return true;
        default:
            return false;
    }
}

long SimulationConfig::n_steps() const {
    return std::max<long>(1, std::llround(t_final / dt));
}

long SimulationConfig::resolved_stride() const {
    if (snapshot_stride > 0) return snapshot_stride;
    const long n = n_steps();
    constexpr long kMaxRows = 100000;
    if (n <= kMaxRows) return 1;
    return (n + kMaxRows - 1) / kMaxRows;
}

void SimulationConfig::validate() const {
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (!(t_final >= dt)) throw std::invalid_argument("t_final must be >= dt");
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
    if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
    if (std::isinf(alpha) && variant != Variant::MarkovianReference)
        throw std::invalid_argument(
            "alpha must be finite for variants that evaluate a consensus point");
    if (variant != Variant::StandardCBO_N && !(kappa > 0.0 && kappa < 1.0))
        throw std::invalid_argument("kappa must lie in (0,1)");
    if (n_particles < 1) throw std::invalid_argument("n_particles must be >= 1");
    if (is_single_particle(variant) && n_particles != 1)
        throw std::invalid_argument("n_particles must be 1 for single-particle variants");
    if (snapshot_stride < 0) throw std::invalid_argument("snapshot_stride must be >= 0");
    if (!init_point.empty()) {
        if (static_cast<int>(init_point.size()) != dim)
            throw std::invalid_argument("init_point dimension mismatch");
        if (!all_finite(init_point)) throw std::invalid_argument("init_point must be finite");
    }
    if (!init_cloud.empty()) {
        if (init_cloud.size() != 1 &&
            init_cloud.size() != static_cast<std::size_t>(n_particles))
            throw std::invalid_argument("init_cloud size must be 1 or n_particles");
        for (const State& x : init_cloud) {
            if (static_cast<int>(x.size()) != dim)
                throw std::invalid_argument("init_cloud dimension mismatch");
            if (!all_finite(x)) throw std::invalid_argument("init_cloud must be finite");
        }
    }
    if (variant == Variant::SelfInteractingWeighted ||
        variant == Variant::MeanFieldWeighted_N ||
        variant == Variant::MultiSelfInteracting) {
        if (weight_flow.kind == WeightFlowKind::SampledDelay) {
            if (!(weight_flow.tau > 0.0)) throw std::invalid_argument("weight_flow.tau must be > 0");
            if (!(weight_flow.theta >= 0.0))
                throw std::invalid_argument("weight_flow.theta must be >= 0");
        }
        if (weight_flow.kind == WeightFlowKind::Lebesgue && weight_flow.lebesgue_resolution < 1)
            throw std::invalid_argument("weight_flow.lebesgue_resolution must be >= 1");
    }
}

State Trajectory::mean_final_state() const {
    const auto& cloud = states.back();
    State mean(config.dim, 0.0);
    for (const State& x : cloud)
        for (int i = 0; i < config.dim; ++i) mean[i] += x[i];
    for (int i = 0; i < config.dim; ++i) mean[i] /= static_cast<double>(cloud.size());
    return mean;
}

State anisotropic_diag(const State& z) {
    State d(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) d[i] = std::fabs(z[i]);
    return d;
}

namespace {

// Shared Euler-Maruyama kernel. target_i = kappa * m_i; per coordinate:
//   x' = x - lambda (x - kappa m) dt + sigma (floor + |x - kappa m|) sqrt(dt) z.
// kappa = 1 and floor = 0 give the plain dynamics; multiplying by 1.0 is exact,
// so the two entry points stay bit-compatible.
State euler_step(const State& x, const State& m, double lambda, double sigma, double kappa,
                 double floor, double dt, std::span<const double> noise) {
    check_dim(m, static_cast<int>(x.size()), "consensus point");
    if (noise.size() != x.size()) throw std::invalid_argument("noise dimension mismatch");
    const double sqrt_dt = std::sqrt(dt);
    State out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double gap = x[i] - kappa * m[i];
        out[i] = x[i] - lambda * gap * dt + sigma * (floor + std::fabs(gap)) * sqrt_dt * noise[i];
    }
    return out;
}

double noise_floor(double alpha) { return std::isinf(alpha) ? 0.0 : 1.0 / alpha; }

}  // namespace

State step_standard(const State& x, const State& m, double lambda, double sigma, double dt,
                    std::span<const double> noise) {
    return euler_step(x, m, lambda, sigma, 1.0, 0.0, dt, noise);
}

State step_rescaled(const State& x, const State& m, double lambda, double sigma, double kappa,
                    double alpha, double dt, std::span<const double> noise) {
    return euler_step(x, m, lambda, sigma, kappa, noise_floor(alpha), dt, noise);
}

namespace {

// Nearest entry of a sorted, strictly increasing time grid; ties go to the
// earlier entry.
std::size_t nearest_time_index(const std::vector<double>& times, double target) {
    auto it = std::lower_bound(times.begin(), times.end(), target);
    if (it == times.begin()) return 0;
    if (it == times.end()) return times.size() - 1;
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    const std::size_t lo = hi - 1;
    return (target - times[lo] <= times[hi] - target) ? lo : hi;
}

struct EngineState {
    const SimulationConfig& cfg;
    const Objective& f;
    std::vector<State> cloud;          // current particle states
    std::vector<double> f_cloud;       // f evaluated at the current states
    std::vector<ConsensusAccumulator> accs;  // streaming occupation accumulators
    // flow-snapshot history on the stride grid (weighted variants)
    std::vector<double> hist_times;
    std::vector<std::vector<State>> hist_states;
    std::vector<std::vector<double>> hist_f;
};

void eval_cloud(EngineState& es) {
    es.f_cloud.resize(es.cloud.size());
    for (std::size_t p = 0; p < es.cloud.size(); ++p) es.f_cloud[p] = es.f.eval(es.cloud[p]);
}

State current_cloud_consensus(const EngineState& es) {
    ConsensusAccumulator acc(es.cfg.alpha, es.cfg.dim);
    for (std::size_t p = 0; p < es.cloud.size(); ++p)
        acc.insert(es.cloud[p], es.f_cloud[p], 1.0);
    return acc.read();
}

void push_snapshot(EngineState& es, double t) {
    es.hist_times.push_back(t);
    es.hist_states.push_back(es.cloud);
    es.hist_f.push_back(es.f_cloud);
}

// Consensus of the weight flow applied to the snapshot history: each flow atom
// at fraction s picks the snapshot nearest to s*t, contributing its whole cloud
// with mass (atom mass)/N.
State flow_consensus_over_history(const EngineState& es, double t) {
    const AtomList atoms = atoms_at(es.cfg.weight_flow, t);
    ConsensusAccumulator acc(es.cfg.alpha, es.cfg.dim);
    const double n_inv = 1.0 / static_cast<double>(es.cloud.size());
    for (std::size_t a = 0; a < atoms.size(); ++a) {
        const std::size_t u = nearest_time_index(es.hist_times, atoms.locations[a] * t);
        const double w = atoms.masses[a] * n_inv;
        for (std::size_t p = 0; p < es.hist_states[u].size(); ++p)
            acc.insert(es.hist_states[u][p], es.hist_f[u][p], w);
    }
    return acc.read();
}

// Single-trajectory weighted consensus via consensus_over_flow (atom fractions
// rescaled to absolute time so the snapshot history need not be rebuilt).
State weighted_single_consensus(const EngineState& es, const std::vector<FlowSnapshot>& hist,
                                double t) {
    AtomList atoms = atoms_at(es.cfg.weight_flow, t);
    for (double& s : atoms.locations) s *= t;
    return consensus_over_flow(hist, atoms, es.cfg.alpha);
}

bool uses_streaming_occupation(const SimulationConfig& cfg) {
    return cfg.variant == Variant::SelfInteracting ||
           (cfg.variant == Variant::MultiSelfInteracting &&
            cfg.weight_flow.kind == WeightFlowKind::Lebesgue);
}

bool uses_cloud_history(const SimulationConfig& cfg) {
    return cfg.variant == Variant::MeanFieldWeighted_N ||
           (cfg.variant == Variant::MultiSelfInteracting &&
            cfg.weight_flow.kind != WeightFlowKind::Lebesgue);
}

std::vector<State> initial_cloud(const SimulationConfig& cfg, int n) {
    State point = cfg.init_point.empty() ? State(cfg.dim, 0.0) : cfg.init_point;
    std::vector<State> cloud;
    if (!cfg.init_cloud.empty()) {
        if (cfg.init_cloud.size() == 1)
            cloud.assign(static_cast<std::size_t>(n), cfg.init_cloud[0]);
        else
            cloud = cfg.init_cloud;
    } else {
        cloud.assign(static_cast<std::size_t>(n), point);
    }
    return cloud;
}

}  // namespace

namespace detail {

Trajectory run_with_noise(const SimulationConfig& cfg, const Objective& f, const State* m_star,
                          const NoiseFn& noise) {
    cfg.validate();
    if (f.dim != cfg.dim) throw std::invalid_argument("objective dimension mismatch");
    if (cfg.variant == Variant::MarkovianReference) {
        if (m_star == nullptr)
            throw std::invalid_argument("MarkovianReference requires a reference consensus point");
        if (static_cast<int>(m_star->size()) != cfg.dim || !all_finite(*m_star))
            throw std::invalid_argument("reference consensus point must be finite with matching dim");
    }

    const long n = cfg.n_steps();
    const long stride = cfg.resolved_stride();
    const int n_part = is_single_particle(cfg.variant) ? 1 : cfg.n_particles;
    const bool standard_kernel = (cfg.variant == Variant::StandardCBO_N);
    const double kappa = standard_kernel ? 1.0 : cfg.kappa;
    const double floor = standard_kernel ? 0.0 : noise_floor(cfg.alpha);

    EngineState es{cfg, f, initial_cloud(cfg, n_part), {}, {}, {}, {}, {}};
    eval_cloud(es);
    if (uses_streaming_occupation(cfg))
        es.accs.assign(static_cast<std::size_t>(n_part), ConsensusAccumulator(cfg.alpha, cfg.dim));

    std::vector<FlowSnapshot> single_hist;  // SelfInteractingWeighted history

    Trajectory out;
    out.config = cfg;
    out.n_steps = n;
    out.retained_steps.reserve(static_cast<std::size_t>(n / stride + 2));

    const auto consensus_now = [&](long k, double t) -> State {
        switch (cfg.variant) {
            case Variant::StandardCBO_N:
            case Variant::RescaledCBO_N:
                return current_cloud_consensus(es);
            case Variant::MeanFieldWeighted_N:
                return k == 0 ? current_cloud_consensus(es) : flow_consensus_over_history(es, t);
            case Variant::SelfInteracting:
                return k == 0 ? es.cloud[0] : es.accs[0].read();
            case Variant::SelfInteractingWeighted:
                return k == 0 ? es.cloud[0] : weighted_single_consensus(es, single_hist, t);
            case Variant::MarkovianReference:
                return *m_star;
            case Variant::MultiSelfInteracting:
                if (cfg.weight_flow.kind == WeightFlowKind::Lebesgue) {
                    if (k == 0) return current_cloud_consensus(es);
                    return ConsensusAccumulator::merge(es.accs).read();
                }
                return k == 0 ? current_cloud_consensus(es) : flow_consensus_over_history(es, t);
        }
        throw std::logic_error("unreachable variant");
    };

    State z(static_cast<std::size_t>(cfg.dim));
    for (long k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        const bool retained = (k % stride == 0) || (k == n);

        if (retained) {
            if (cfg.variant == Variant::SelfInteractingWeighted)
                single_hist.push_back({t, es.cloud[0], es.f_cloud[0]});
            else if (uses_cloud_history(cfg))
                push_snapshot(es, t);
        }

        const State m = consensus_now(k, t);
        if (retained) {
            out.retained_steps.push_back(k);
            out.states.push_back(es.cloud);
            out.consensus_log.push_back(m);
        }
        if (k == n) break;

        if (uses_streaming_occupation(cfg))
            for (int p = 0; p < n_part; ++p)
                es.accs[static_cast<std::size_t>(p)].insert(
                    es.cloud[static_cast<std::size_t>(p)],
                    es.f_cloud[static_cast<std::size_t>(p)], cfg.dt);

        for (int p = 0; p < n_part; ++p) {
            noise(p, k, z);
            State& x = es.cloud[static_cast<std::size_t>(p)];
            x = euler_step(x, m, cfg.lambda, cfg.sigma, kappa, floor, cfg.dt, z);
            if (!all_finite(x)) throw BlowUpError(k);
        }
        eval_cloud(es);
    }
    return out;
}

}  // namespace detail

namespace {

detail::NoiseFn default_noise(std::uint64_t seed) {
    return [seed](int particle, long step, std::span<double> out) {
        noise_stream(seed, static_cast<std::uint64_t>(particle), static_cast<std::uint64_t>(step))
            .fill_normals(out);
    };
}

void require_variant(const SimulationConfig& cfg, std::initializer_list<Variant> allowed,
                     const char* fn) {
    for (Variant v : allowed)
        if (cfg.variant == v) return;
    throw std::invalid_argument(std::string(fn) + " does not handle variant " +
                                to_string(cfg.variant));
}

}  // namespace

Trajectory run_particle_system(const SimulationConfig& cfg, const Objective& f) {
    require_variant(cfg,
                    {Variant::StandardCBO_N, Variant::RescaledCBO_N, Variant::MeanFieldWeighted_N},
                    "run_particle_system");
    return detail::run_with_noise(cfg, f, nullptr, default_noise(cfg.seed));
}

Trajectory run_self_interacting(const SimulationConfig& cfg, const Objective& f) {
    require_variant(cfg, {Variant::SelfInteracting, Variant::SelfInteractingWeighted},
                    "run_self_interacting");
    return detail::run_with_noise(cfg, f, nullptr, default_noise(cfg.seed));
}

Trajectory run_markovian_reference(const SimulationConfig& cfg, const Objective& f,
                                   const State& m_star) {
    require_variant(cfg, {Variant::MarkovianReference}, "run_markovian_reference");
    return detail::run_with_noise(cfg, f, &m_star, default_noise(cfg.seed));
}

Trajectory run_multi_self_interacting(const SimulationConfig& cfg, const Objective& f) {
    require_variant(cfg, {Variant::MultiSelfInteracting}, "run_multi_self_interacting");
    return detail::run_with_noise(cfg, f, nullptr, default_noise(cfg.seed));
}

Trajectory run(const SimulationConfig& cfg, const Objective& f, const State* m_star) {
    switch (cfg.variant) {
        case Variant::StandardCBO_N:
        case Variant::RescaledCBO_N:
        case Variant::MeanFieldWeighted_N:
            return run_particle_system(cfg, f);
        case Variant::SelfInteracting:
        case Variant::SelfInteractingWeighted:
            return run_self_interacting(cfg, f);
        case Variant::MarkovianReference:
            if (m_star == nullptr)
                throw std::invalid_argument("MarkovianReference requires a reference consensus point");
            return run_markovian_reference(cfg, f, *m_star);
        case Variant::MultiSelfInteracting:
            return run_multi_self_interacting(cfg, f);
    }
    throw std::logic_error("unreachable variant");
}

WeightedEmpiricalMeasure occupation_measure(const Trajectory& traj, double t_upper,
                                            std::size_t max_atoms) {
    std::vector<State> points;
    for (std::size_t row = 0; row < traj.retained_steps.size(); ++row) {
        if (traj.time_at(row) >= t_upper) break;  // left-endpoint convention
        for (const State& x : traj.states[row]) points.push_back(x);
    }
    if (points.empty())
        throw std::invalid_argument("occupation_measure: no retained states before t_upper");
    return thin_measure(equal_mass_measure(points), max_atoms);
}

WeightedEmpiricalMeasure estimate_invariant_measure(const Trajectory& traj,
                                                    double burn_in_fraction) {
    if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
        throw std::invalid_argument("burn_in_fraction must lie in [0,1)");
    const std::size_t n_rows = traj.retained_steps.size();
    if (n_rows == 0) throw std::invalid_argument("empty trajectory");
    const auto first = static_cast<std::size_t>(burn_in_fraction * static_cast<double>(n_rows));
    std::vector<State> points;
    points.reserve((n_rows - first) * traj.states[0].size());
    for (std::size_t row = std::min(first, n_rows - 1); row < n_rows; ++row)
        for (const State& x : traj.states[row]) points.push_back(x);
    return equal_mass_measure(points);
}

WeightedEmpiricalMeasure thin_measure(const WeightedEmpiricalMeasure& mu, std::size_t max_atoms) {
    if (max_atoms == 0) throw std::invalid_argument("max_atoms must be >= 1");
    if (mu.size() <= max_atoms) return mu;
    WeightedEmpiricalMeasure out;
    out.points.reserve(max_atoms);
    const double mass = 1.0 / static_cast<double>(max_atoms);
    for (std::size_t i = 0; i < max_atoms; ++i) {
        const std::size_t idx = (i * mu.size()) / max_atoms;
        out.points.push_back(mu.points[idx]);
        out.masses.push_back(mass);
    }
    out.validate();
    return out;
}

}  // namespace cbo
