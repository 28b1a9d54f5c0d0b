#include "cbo/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "cbo/parallel.hpp"
#include "cbo/rng.hpp"
#include "cbo/wasserstein.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace cbo {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

void check_keys(const ordered_json& j, std::initializer_list<const char*> allowed,
                const std::string& context) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) { known = true; break; }
        if (!known)
            throw std::invalid_argument("unknown field: " + context + item.key());
    }
}

ordered_json alpha_to_json(double alpha) {
    if (std::isinf(alpha)) return "inf";
    return alpha;
}

double alpha_from_json(const ordered_json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "+inf" || s == "infinity")
            return std::numeric_limits<double>::infinity();
        throw std::invalid_argument("field 'alpha': expected a number or \"inf\", got \"" + s +
                                    "\"");
    }
    return j.get<double>();
}

ordered_json state_to_json(const State& x) {
    ordered_json arr = ordered_json::array();
    for (double v : x) arr.push_back(v);
    return arr;
}

State state_from_json(const ordered_json& j, const std::string& field) {
    if (!j.is_array()) throw std::invalid_argument("field '" + field + "': expected an array");
    State x;
    for (const auto& v : j) x.push_back(v.get<double>());
    return x;
}

ordered_json weight_flow_to_json(const WeightFlow& flow) {
    ordered_json j;
    j["kind"] = to_string(flow.kind);
    if (flow.kind == WeightFlowKind::Lebesgue) j["resolution"] = flow.lebesgue_resolution;
    if (flow.kind == WeightFlowKind::SampledDelay) {
        j["tau"] = flow.tau;
        j["theta"] = flow.theta;
    }
    return j;
}

WeightFlow weight_flow_from_json(const ordered_json& j) {
    check_keys(j, {"kind", "resolution", "tau", "theta"}, "weight_flow.");
    if (!j.contains("kind"))
        throw std::invalid_argument("field 'weight_flow': missing 'kind'");
    const WeightFlowKind kind = weight_flow_kind_from_string(j.at("kind").get<std::string>());
    switch (kind) {
        case WeightFlowKind::DiracAtOne:
            if (j.contains("resolution") || j.contains("tau") || j.contains("theta"))
                throw std::invalid_argument("field 'weight_flow': dirac_at_one takes no options");
            return WeightFlow::dirac_at_one();
        case WeightFlowKind::Lebesgue: {
            if (j.contains("tau") || j.contains("theta"))
                throw std::invalid_argument("field 'weight_flow': lebesgue takes only 'resolution'");
            int res = j.contains("resolution") ? j.at("resolution").get<int>() : 10000;
            return WeightFlow::lebesgue(res);
        }
        case WeightFlowKind::SampledDelay: {
            if (j.contains("resolution"))
                throw std::invalid_argument("field 'weight_flow': sampled_delay takes no 'resolution'");
            if (!j.contains("tau") || !j.contains("theta"))
                throw std::invalid_argument("field 'weight_flow': sampled_delay needs 'tau' and 'theta'");
            return WeightFlow::sampled_delay(j.at("tau").get<double>(),
                                             j.at("theta").get<double>());
        }
    }
    throw std::logic_error("unreachable weight flow kind");
}

constexpr const char* kSweepable[] = {"lambda", "sigma",      "kappa",      "alpha",
                                      "dt",     "t_final",    "n_particles"};

void apply_parameter(SimulationConfig& cfg, const std::string& parameter, double value) {
    if (parameter == "lambda") cfg.lambda = value;
    else if (parameter == "sigma") cfg.sigma = value;
    else if (parameter == "kappa") cfg.kappa = value;
    else if (parameter == "alpha") cfg.alpha = value;
    else if (parameter == "dt") cfg.dt = value;
    else if (parameter == "t_final") cfg.t_final = value;
    else if (parameter == "n_particles") cfg.n_particles = static_cast<int>(std::llround(value));
    else
        throw std::invalid_argument("sweep parameter '" + parameter + "' is not sweepable");
}

using SweepAssignment = std::vector<std::pair<std::string, double>>;

std::vector<SweepAssignment> sweep_points(const ExperimentSpec& spec) {
    std::vector<SweepAssignment> points{{}};
    for (const SweepEntry& entry : spec.sweep) {
        std::vector<SweepAssignment> next;
        for (const SweepAssignment& base : points)
            for (double v : entry.values) {
                SweepAssignment a = base;
                a.emplace_back(entry.parameter, v);
                next.push_back(std::move(a));
            }
        points = std::move(next);
    }
    return points;
}

SimulationConfig config_at(const ExperimentSpec& spec, const SweepAssignment& assignment) {
    SimulationConfig cfg = spec.base_config;
    for (const auto& [param, value] : assignment) apply_parameter(cfg, param, value);
    return cfg;
}

std::vector<double> resolve_probe_grid(const std::vector<double>& requested,
                                       const SimulationConfig& cfg) {
    if (!requested.empty()) return requested;
    const double hi = cfg.t_final;
    const double lo = std::min(10.0 * cfg.dt, hi);
    std::vector<double> grid;
    if (lo >= hi) {
        grid.push_back(hi);
        return grid;
    }
    constexpr int kPoints = 16;
    const double ratio = std::log(hi / lo);
    for (int i = 0; i < kPoints; ++i) {
        const double t = lo * std::exp(ratio * static_cast<double>(i) / (kPoints - 1));
        if (grid.empty() || t > grid.back()) grid.push_back(std::min(t, hi));
    }
    return grid;
}

std::string zero_pad(int v, int width) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%0*d", width, v);
    return buf;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_trajectory_csv(const fs::path& path, const Trajectory& traj) {
    std::ostringstream out;
    const int n_part = traj.n_particles();
    const int dim = traj.dim();
    out << "t";
    for (int p = 0; p < n_part; ++p)
        for (int c = 0; c < dim; ++c) out << ",x" << p << "_" << c;
    for (int c = 0; c < dim; ++c) out << ",m_" << c;
    out << "\n";
    for (std::size_t row = 0; row < traj.retained_steps.size(); ++row) {
        out << fmt_double(traj.time_at(row));
        for (int p = 0; p < n_part; ++p)
            for (int c = 0; c < dim; ++c)
                out << ',' << fmt_double(traj.states[row][static_cast<std::size_t>(p)]
                                                    [static_cast<std::size_t>(c)]);
        for (int c = 0; c < dim; ++c)
            out << ',' << fmt_double(traj.consensus_log[row][static_cast<std::size_t>(c)]);
        out << "\n";
    }
    write_text_file(path, out.str());
}

double initial_second_moment(const SimulationConfig& cfg) {
    if (!cfg.init_cloud.empty()) {
        double acc = 0.0;
        for (const State& x : cfg.init_cloud) acc += norm_sq(x);
        return acc / static_cast<double>(cfg.init_cloud.size());
    }
    if (!cfg.init_point.empty()) return norm_sq(cfg.init_point);
    return 0.0;
}

struct ReplicaResult {
    bool completed = false;
    long blow_up_step = -1;
    State final_consensus;
    State final_state_mean;
    WeightedEmpiricalMeasure window_measure;  // post-burn-in states, thinned
    std::vector<WeightedEmpiricalMeasure> probe_occupations;
};

ReplicaResult run_one_replica(const SimulationConfig& cfg, const Objective& f,
                              const State* m_star, double burn_in,
                              const std::vector<double>& probes, const fs::path* csv_path) {
    ReplicaResult res;
    try {
        const Trajectory traj = run(cfg, f, m_star);
        if (csv_path != nullptr) write_trajectory_csv(*csv_path, traj);
        res.final_consensus = traj.consensus_log.back();
        res.final_state_mean = traj.mean_final_state();
        res.window_measure = thin_measure(estimate_invariant_measure(traj, burn_in), 1024);
        res.probe_occupations.reserve(probes.size());
        for (double t : probes) res.probe_occupations.push_back(occupation_measure(traj, t, 128));
        res.completed = true;
    } catch (const BlowUpError& e) {
        res.blow_up_step = e.step;
    }
    return res;
}

WeightedEmpiricalMeasure pool_window_measures(const std::vector<ReplicaResult>& results) {
    std::vector<State> points;
    for (const ReplicaResult& r : results) {
        if (!r.completed) continue;
        points.insert(points.end(), r.window_measure.points.begin(),
                      r.window_measure.points.end());
    }
    if (points.empty()) throw std::runtime_error("no completed replicas");
    return equal_mass_measure(points);
}

// Mean and standard error of W2^2(occupation at probe, reference) over
// completed replicas, per probe time.
void curve_against_reference(const std::vector<ReplicaResult>& results,
                             const WeightedEmpiricalMeasure& reference, std::size_t n_probes,
                             std::vector<double>& mean_out, std::vector<double>& stderr_out,
                             int& n_used) {
    mean_out.assign(n_probes, 0.0);
    stderr_out.assign(n_probes, 0.0);
    std::vector<std::vector<double>> samples(n_probes);
    for (const ReplicaResult& r : results) {
        if (!r.completed) continue;
        for (std::size_t i = 0; i < n_probes; ++i) {
            const double w2 = w2_exact(r.probe_occupations[i], reference);
            samples[i].push_back(w2 * w2);
        }
    }
    n_used = samples.empty() ? 0 : static_cast<int>(samples[0].size());
    for (std::size_t i = 0; i < n_probes; ++i) {
        const auto& s = samples[i];
        if (s.empty()) continue;
        double mean = 0.0;
        for (double v : s) mean += v;
        mean /= static_cast<double>(s.size());
        mean_out[i] = mean;
        if (s.size() > 1) {
            double var = 0.0;
            for (double v : s) var += (v - mean) * (v - mean);
            var /= static_cast<double>(s.size() - 1);
            stderr_out[i] = std::sqrt(var / static_cast<double>(s.size()));
        }
    }
}

void write_decay_csv(const fs::path& path, const std::vector<double>& times,
                     const std::vector<double>& mean, const std::vector<double>& se,
                     int n_replicas) {
    std::ostringstream out;
    out << "t,mean_w2_sq,stderr_w2_sq,n_replicas\n";
    for (std::size_t i = 0; i < times.size(); ++i)
        out << fmt_double(times[i]) << ',' << fmt_double(mean[i]) << ',' << fmt_double(se[i])
            << ',' << n_replicas << "\n";
    write_text_file(path, out.str());
}

// Log-log fit tolerant of zero values (dropped before fitting); returns a
// zeroed fit when fewer than 8 positive points remain.
DecayFit fit_curve(const std::vector<double>& times, const std::vector<double>& values, int dim) {
    std::vector<double> ts, vs;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (values[i] > 0.0) {
            ts.push_back(times[i]);
            vs.push_back(values[i]);
        }
    if (ts.size() >= 8) return fit_decay(ts, vs, 1.0, 1.0, dim);
    DecayFit fit;
    fit.times = times;
    fit.values = values;
    fit.reference_exponent = 1.0 / (3.0 * static_cast<double>(dim + 2));
    fit.theory_exponent = fit.reference_exponent;
    return fit;
}

const std::vector<double> kSummaryAlphas = {1.0, 10.0, 100.0, 1000.0};

ordered_json laplace_to_json(const LaplaceReport& rep) {
    ordered_json j;
    j["alphas"] = rep.alphas;
    j["ell"] = rep.ell;
    j["ell_minus_min_value"] = rep.ell_minus_min_value;
    ordered_json means = ordered_json::array();
    for (const State& m : rep.eta_mean) means.push_back(state_to_json(m));
    j["eta_mean"] = means;
    j["f_at_eta_mean"] = rep.f_at_eta_mean;
    j["min_atom_f"] = rep.min_atom_f;
    j["residual_nonincreasing"] = rep.residual_nonincreasing;
    return j;
}

ordered_json constants_to_json(const DissipativityConstants& c) {
    ordered_json j;
    j["frak_a"] = c.frak_a;
    j["frak_b"] = c.frak_b;
    j["frak_c"] = c.frak_c;
    j["K"] = c.K;
    j["delta"] = c.delta;
    j["l_m"] = c.l_m;
    j["c_1"] = c.c_1;
    j["regime_ok"] = c.regime_ok;
    return j;
}

ordered_json spec_to_json(const ExperimentSpec& spec) {
    ordered_json j;
    j["name"] = spec.name;
    ordered_json obj;
    obj["name"] = spec.objective_name;
    obj["dim"] = spec.base_config.dim;
    if (!spec.objective_shift.empty()) obj["shift"] = state_to_json(spec.objective_shift);
    j["objective"] = obj;
    j["variant"] = to_string(spec.base_config.variant);
    j["lambda"] = spec.base_config.lambda;
    j["sigma"] = spec.base_config.sigma;
    j["kappa"] = spec.base_config.kappa;
    j["alpha"] = alpha_to_json(spec.base_config.alpha);
    j["dt"] = spec.base_config.dt;
    j["t_final"] = spec.base_config.t_final;
    j["n_particles"] = spec.base_config.n_particles;
    j["seed"] = spec.base_config.seed;
    j["snapshot_stride"] = spec.base_config.snapshot_stride;
    j["weight_flow"] = weight_flow_to_json(spec.base_config.weight_flow);
    ordered_json init;
    if (!spec.base_config.init_cloud.empty()) {
        ordered_json cloud = ordered_json::array();
        for (const State& x : spec.base_config.init_cloud) cloud.push_back(state_to_json(x));
        init["cloud"] = cloud;
    } else {
        init["point"] = state_to_json(spec.base_config.init_point.empty()
                                          ? State(static_cast<std::size_t>(spec.base_config.dim), 0.0)
                                          : spec.base_config.init_point);
    }
    j["init"] = init;
    if (!spec.m_star.empty()) j["m_star"] = state_to_json(spec.m_star);
    j["replicas"] = spec.replicas;
    j["time_probe_grid"] = spec.time_probe_grid;
    ordered_json sweep = ordered_json::array();
    for (const SweepEntry& e : spec.sweep) {
        ordered_json entry;
        entry["parameter"] = e.parameter;
        entry["values"] = e.values;
        sweep.push_back(entry);
    }
    j["sweep"] = sweep;
    j["burn_in_fraction"] = spec.burn_in_fraction;
    j["outputs_dir"] = spec.outputs_dir;
    return j;
}

ExperimentSpec spec_from_json(const ordered_json& j) {
    check_keys(j,
               {"name", "objective", "variant", "lambda", "sigma", "kappa", "alpha", "dt",
                "t_final", "n_particles", "seed", "snapshot_stride", "weight_flow", "init",
                "m_star", "replicas", "time_probe_grid", "sweep", "burn_in_fraction",
                "outputs_dir"},
               "");
    ExperimentSpec spec;
    if (j.contains("name")) spec.name = j.at("name").get<std::string>();
    if (j.contains("objective")) {
        const auto& obj = j.at("objective");
        check_keys(obj, {"name", "dim", "shift"}, "objective.");
        if (obj.contains("name")) spec.objective_name = obj.at("name").get<std::string>();
        if (obj.contains("dim")) spec.base_config.dim = obj.at("dim").get<int>();
        if (obj.contains("shift")) spec.objective_shift = state_from_json(obj.at("shift"), "objective.shift");
    }
    if (j.contains("variant"))
        spec.base_config.variant = variant_from_string(j.at("variant").get<std::string>());
    if (j.contains("lambda")) spec.base_config.lambda = j.at("lambda").get<double>();
    if (j.contains("sigma")) spec.base_config.sigma = j.at("sigma").get<double>();
    if (j.contains("kappa")) spec.base_config.kappa = j.at("kappa").get<double>();
    if (j.contains("alpha")) spec.base_config.alpha = alpha_from_json(j.at("alpha"));
    if (j.contains("dt")) spec.base_config.dt = j.at("dt").get<double>();
    if (j.contains("t_final")) spec.base_config.t_final = j.at("t_final").get<double>();
    if (j.contains("n_particles")) spec.base_config.n_particles = j.at("n_particles").get<int>();
    if (j.contains("seed")) spec.base_config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("snapshot_stride"))
        spec.base_config.snapshot_stride = j.at("snapshot_stride").get<long>();
    if (j.contains("weight_flow"))
        spec.base_config.weight_flow = weight_flow_from_json(j.at("weight_flow"));
    if (j.contains("init")) {
        const auto& init = j.at("init");
        check_keys(init, {"point", "cloud"}, "init.");
        if (init.contains("point") && init.contains("cloud"))
            throw std::invalid_argument("field 'init': give either 'point' or 'cloud', not both");
        if (init.contains("point"))
            spec.base_config.init_point = state_from_json(init.at("point"), "init.point");
        if (init.contains("cloud")) {
            if (!init.at("cloud").is_array())
                throw std::invalid_argument("field 'init.cloud': expected an array of points");
            for (const auto& row : init.at("cloud"))
                spec.base_config.init_cloud.push_back(state_from_json(row, "init.cloud[]"));
        }
    }
    if (j.contains("m_star")) spec.m_star = state_from_json(j.at("m_star"), "m_star");
    if (j.contains("replicas")) spec.replicas = j.at("replicas").get<int>();
    if (j.contains("time_probe_grid")) {
        for (const auto& v : j.at("time_probe_grid"))
            spec.time_probe_grid.push_back(v.get<double>());
    }
    if (j.contains("sweep")) {
        if (!j.at("sweep").is_array())
            throw std::invalid_argument("field 'sweep': expected an array");
        for (const auto& e : j.at("sweep")) {
            check_keys(e, {"parameter", "values"}, "sweep[].");
            if (!e.contains("parameter") || !e.contains("values"))
                throw std::invalid_argument("field 'sweep[]': needs 'parameter' and 'values'");
            SweepEntry entry;
            entry.parameter = e.at("parameter").get<std::string>();
            for (const auto& v : e.at("values")) entry.values.push_back(v.get<double>());
            spec.sweep.push_back(std::move(entry));
        }
    }
    if (j.contains("burn_in_fraction"))
        spec.burn_in_fraction = j.at("burn_in_fraction").get<double>();
    if (j.contains("outputs_dir")) spec.outputs_dir = j.at("outputs_dir").get<std::string>();
    return spec;
}

}  // namespace

ExperimentSpec ExperimentSpec::from_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open spec file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_string(buf.str());
}

ExperimentSpec ExperimentSpec::from_json_string(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("spec is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("spec must be a JSON object");
    try {
        return spec_from_json(j);
    } catch (const ordered_json::exception& e) {
        throw std::invalid_argument(std::string("spec field has the wrong type: ") + e.what());
    }
}

std::string ExperimentSpec::to_json_string() const { return spec_to_json(*this).dump(2) + "\n"; }

void ExperimentSpec::validate() const {
    if (name.empty()) throw std::invalid_argument("name must be non-empty");
    if (name.find('/') != std::string::npos || name.find('\\') != std::string::npos)
        throw std::invalid_argument("name must not contain path separators");
    if (replicas < 1) throw std::invalid_argument("replicas must be >= 1");
    if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
        throw std::invalid_argument("burn_in_fraction must lie in [0,1)");
    make_objective_instance();  // throws on unknown objective / bad shift
    if (base_config.variant == Variant::MarkovianReference) {
        if (m_star.empty())
            throw std::invalid_argument("m_star is required for MarkovianReference");
        if (static_cast<int>(m_star.size()) != base_config.dim || !all_finite(m_star))
            throw std::invalid_argument("m_star must be finite with matching dim");
    } else if (!m_star.empty()) {
        throw std::invalid_argument("m_star is only meaningful for MarkovianReference");
    }
    for (const SweepEntry& entry : sweep) {
        bool known = false;
        for (const char* p : kSweepable)
            if (entry.parameter == p) { known = true; break; }
        if (!known)
            throw std::invalid_argument("sweep parameter '" + entry.parameter +
                                        "' is not sweepable");
        if (entry.values.empty())
            throw std::invalid_argument("sweep parameter '" + entry.parameter +
                                        "' has no values");
    }
    for (const SweepAssignment& assignment : sweep_points(*this)) {
        const SimulationConfig cfg = config_at(*this, assignment);
        cfg.validate();
        for (std::size_t i = 0; i < time_probe_grid.size(); ++i) {
            if (!(time_probe_grid[i] > 0.0) || time_probe_grid[i] > cfg.t_final)
                throw std::invalid_argument("time_probe_grid values must lie in (0, t_final]");
            if (i > 0 && !(time_probe_grid[i] > time_probe_grid[i - 1]))
                throw std::invalid_argument("time_probe_grid must be strictly increasing");
        }
    }
}

std::vector<double> ExperimentSpec::resolved_probe_grid() const {
    return resolve_probe_grid(time_probe_grid, base_config);
}

Objective ExperimentSpec::make_objective_instance() const {
    return make_objective(objective_name, base_config.dim, objective_shift);
}

std::string RunManifest::to_json_string() const {
    ordered_json j;
    j["version"] = version;
    j["wall_seconds"] = wall_seconds;
    ordered_json regime;
    regime["lambda_gt_8sigma_sq"] = lambda_regime_ok;
    regime["constants"] = constants_to_json(constants);
    regime["bounds_estimate_stable"] = bounds_estimate_stable;
    regime["bounds_R"] = bounds_R;
    j["regime"] = regime;
    j["spec"] = spec_to_json(spec);
    ordered_json seeds = ordered_json::array();
    for (const auto& point_seeds : replica_seeds) seeds.push_back(point_seeds);
    j["replica_seeds"] = seeds;
    ordered_json ab = ordered_json::array();
    for (const ReplicaAbort& a : aborts) {
        ordered_json e;
        e["sweep_point"] = a.sweep_point;
        e["replica"] = a.replica;
        e["step"] = a.step;
        ab.push_back(e);
    }
    j["aborts"] = ab;
    return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open manifest file: " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("manifest is not valid JSON: ") + e.what());
    }
    RunManifest m;
    if (j.contains("version")) m.version = j.at("version").get<std::string>();
    if (!j.contains("spec")) throw std::invalid_argument("manifest has no 'spec' object");
    m.spec = spec_from_json(j.at("spec"));
    if (j.contains("replica_seeds"))
        for (const auto& row : j.at("replica_seeds"))
            m.replica_seeds.push_back(row.get<std::vector<std::uint64_t>>());
    return m;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, int n_threads) {
    spec.validate();
    const Objective f = spec.make_objective_instance();
    const auto t_start = std::chrono::steady_clock::now();

    const fs::path root = fs::path(spec.outputs_dir) / spec.name;
    fs::create_directories(root);

    ExperimentResult result;
    result.manifest.spec = spec;
    result.manifest.lambda_regime_ok = spec.base_config.lambda_regime_ok();
    result.manifest.bounds_R = std::max(1.0, 10.0 * initial_second_moment(spec.base_config));
    double l_m_hat = 1.0, c_1_hat = 1.0;  // placeholders when alpha is infinite
    if (std::isfinite(spec.base_config.alpha)) {
        const LmC1Estimate bounds =
            estimate_lm_c1(f, spec.base_config.alpha, result.manifest.bounds_R, 200,
                           mix_key(spec.base_config.seed, 0xD1A6u));
        l_m_hat = bounds.l_m_hat;
        c_1_hat = bounds.c_1_hat;
        result.manifest.bounds_estimate_stable = bounds.stable;
    }
    result.manifest.constants =
        dissipativity_constants(spec.base_config.lambda, spec.base_config.sigma,
                                spec.base_config.kappa, spec.base_config.alpha,
                                spec.base_config.dim, l_m_hat, c_1_hat, 1.0);

    const std::vector<SweepAssignment> points = sweep_points(spec);
    for (std::size_t pt = 0; pt < points.size(); ++pt) {
        const SimulationConfig cfg_pt = config_at(spec, points[pt]);
        const std::vector<double> probes = resolve_probe_grid(spec.time_probe_grid, cfg_pt);
        const fs::path pt_dir = root / ("point_" + zero_pad(static_cast<int>(pt), 3));
        fs::create_directories(pt_dir);

        std::vector<std::uint64_t> seeds(static_cast<std::size_t>(spec.replicas));
        for (int r = 0; r < spec.replicas; ++r)
            seeds[static_cast<std::size_t>(r)] =
                mix_key(cfg_pt.seed, static_cast<std::uint64_t>(r));
        result.manifest.replica_seeds.push_back(seeds);

        std::vector<ReplicaResult> rep(static_cast<std::size_t>(spec.replicas));
        detail::parallel_indices(
            spec.replicas,
            [&](long r) {
                SimulationConfig cfg_r = cfg_pt;
                cfg_r.seed = seeds[static_cast<std::size_t>(r)];
                const fs::path csv =
                    pt_dir / ("replica_" + zero_pad(static_cast<int>(r), 3) + ".csv");
                rep[static_cast<std::size_t>(r)] = run_one_replica(
                    cfg_r, f, spec.m_star.empty() ? nullptr : &spec.m_star,
                    spec.burn_in_fraction, probes, &csv);
            },
            n_threads);

        PointSummary summary;
        summary.parameters = points[pt];
        summary.replica_seeds = seeds;
        summary.probe_times = probes;
        for (int r = 0; r < spec.replicas; ++r) {
            const ReplicaResult& rr = rep[static_cast<std::size_t>(r)];
            summary.final_consensus.push_back(rr.final_consensus);
            summary.final_state_mean.push_back(rr.final_state_mean);
            if (!rr.completed)
                result.manifest.aborts.push_back(
                    {static_cast<int>(pt), r, rr.blow_up_step});
        }

        const ReplicaResult* reference_replica = nullptr;
        for (const ReplicaResult& rr : rep)
            if (rr.completed) { reference_replica = &rr; break; }
        if (reference_replica != nullptr) {
            const WeightedEmpiricalMeasure reference =
                thin_measure(reference_replica->window_measure, 256);
            curve_against_reference(rep, reference, probes.size(), summary.mean_w2_sq,
                                    summary.stderr_w2_sq, summary.completed_replicas);
            write_decay_csv(pt_dir / "decay.csv", probes, summary.mean_w2_sq,
                            summary.stderr_w2_sq, summary.completed_replicas);

            const WeightedEmpiricalMeasure pooled =
                thin_measure(pool_window_measures(rep), 4096);
            State mean = pooled.mean();
            const State m = [&] {
                if (!std::isfinite(cfg_pt.alpha)) return spec.m_star;
                std::vector<double> v(pooled.size());
                for (std::size_t i = 0; i < pooled.size(); ++i) v[i] = f.eval(pooled.points[i]);
                return consensus_point(pooled, v, cfg_pt.alpha);
            }();
            State target(m.size());
            for (std::size_t c = 0; c < m.size(); ++c) target[c] = cfg_pt.kappa * m[c];
            summary.fixed_point_residual = dist(mean, target);
            summary.laplace = laplace_diagnostic(pooled, f, kSummaryAlphas);

            State rep_mean(static_cast<std::size_t>(cfg_pt.dim), 0.0);
            int n_done = 0;
            for (const ReplicaResult& rr : rep) {
                if (!rr.completed) continue;
                for (std::size_t c = 0; c < rep_mean.size(); ++c)
                    rep_mean[c] += rr.final_state_mean[c];
                ++n_done;
            }
            for (double& v : rep_mean) v /= static_cast<double>(n_done);
            summary.replica_mean_terminal_state = rep_mean;
        }
        result.points.push_back(std::move(summary));
    }

    result.manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    ordered_json summary_json;
    summary_json["name"] = spec.name;
    ordered_json pts = ordered_json::array();
    for (const PointSummary& p : result.points) {
        ordered_json pj;
        ordered_json params;
        for (const auto& [k, v] : p.parameters) params[k] = v;
        pj["parameters"] = params;
        pj["replica_seeds"] = p.replica_seeds;
        ordered_json reps = ordered_json::array();
        for (std::size_t r = 0; r < p.final_consensus.size(); ++r) {
            ordered_json rj;
            rj["replica"] = r;
            rj["seed"] = p.replica_seeds[r];
            const bool completed = !p.final_consensus[r].empty();
            rj["completed"] = completed;
            if (completed) {
                rj["final_consensus"] = state_to_json(p.final_consensus[r]);
                rj["final_state_mean"] = state_to_json(p.final_state_mean[r]);
            }
            reps.push_back(rj);
        }
        pj["replicas"] = reps;
        pj["completed_replicas"] = p.completed_replicas;
        if (p.completed_replicas > 0) {
            pj["replica_mean_terminal_state"] = state_to_json(p.replica_mean_terminal_state);
            pj["fixed_point_residual"] = p.fixed_point_residual;
            pj["laplace"] = laplace_to_json(p.laplace);
            ordered_json decay;
            decay["times"] = p.probe_times;
            decay["mean_w2_sq"] = p.mean_w2_sq;
            decay["stderr_w2_sq"] = p.stderr_w2_sq;
            pj["decay"] = decay;
        }
        pts.push_back(pj);
    }
    summary_json["points"] = pts;

    result.manifest_path = (root / "manifest.json").string();
    result.summary_path = (root / "summary.json").string();
    write_text_file(root / "manifest.json", result.manifest.to_json_string());
    write_text_file(root / "summary.json", summary_json.dump(2) + "\n");
    return result;
}

namespace {

void require_match(bool ok, const char* field) {
    if (!ok)
        throw std::invalid_argument(std::string("compare_variants: specs differ in ") + field);
}

}  // namespace

ComparisonReport compare_variants(const ExperimentSpec& a, const ExperimentSpec& b,
                                  int n_threads) {
    a.validate();
    b.validate();
    if (!a.sweep.empty() || !b.sweep.empty())
        throw std::invalid_argument("compare_variants does not support sweeps");
    require_match(a.base_config.lambda == b.base_config.lambda, "lambda");
    require_match(a.base_config.sigma == b.base_config.sigma, "sigma");
    require_match(a.base_config.kappa == b.base_config.kappa, "kappa");
    require_match(a.base_config.alpha == b.base_config.alpha, "alpha");
    require_match(a.base_config.dim == b.base_config.dim, "dim");
    require_match(a.objective_name == b.objective_name, "objective");
    require_match(a.objective_shift == b.objective_shift, "objective shift");

    const Objective f = a.make_objective_instance();
    const std::vector<double> probes = a.resolved_probe_grid();
    for (double t : probes)
        if (t > b.base_config.t_final)
            throw std::invalid_argument("probe grid exceeds spec B's horizon");

    const int n_a = a.replicas;
    const int n_b = b.replicas;
    std::vector<ReplicaResult> rep_a(static_cast<std::size_t>(n_a));
    std::vector<ReplicaResult> rep_b(static_cast<std::size_t>(n_b));
    detail::parallel_indices(
        n_a + n_b,
        [&](long i) {
            const bool is_a = i < n_a;
            const ExperimentSpec& spec = is_a ? a : b;
            const long r = is_a ? i : i - n_a;
            SimulationConfig cfg = spec.base_config;
            cfg.seed = mix_key(cfg.seed, static_cast<std::uint64_t>(r));
            ReplicaResult res = run_one_replica(
                cfg, f, spec.m_star.empty() ? nullptr : &spec.m_star, spec.burn_in_fraction,
                probes, nullptr);
            if (!res.completed)
                throw BlowUpError(res.blow_up_step);
            (is_a ? rep_a : rep_b)[static_cast<std::size_t>(r)] = std::move(res);
        },
        n_threads);

    const WeightedEmpiricalMeasure reference = thin_measure(rep_a[0].window_measure, 256);

    ComparisonReport report;
    const auto build_curve = [&](const ExperimentSpec& spec,
                                 const std::vector<ReplicaResult>& rep) {
        VariantCurve curve;
        curve.name = spec.name;
        curve.variant = spec.base_config.variant;
        curve.times = probes;
        curve_against_reference(rep, reference, probes.size(), curve.mean_w2_sq,
                                curve.stderr_w2_sq, curve.n_replicas);
        curve.fit = fit_curve(curve.times, curve.mean_w2_sq, spec.base_config.dim);
        return curve;
    };
    report.a = build_curve(a, rep_a);
    report.b = build_curve(b, rep_b);
    report.terminal_w2 = w2_exact(thin_measure(pool_window_measures(rep_a), 256),
                                  thin_measure(pool_window_measures(rep_b), 256));
    report.reference_note =
        "reference measure: spec A replica 0 occupation window (burn-in fraction " +
        fmt_double(a.burn_in_fraction) + "), thinned to 256 atoms";
    return report;
}

namespace {

ordered_json curve_to_json(const VariantCurve& c) {
    ordered_json j;
    j["name"] = c.name;
    j["variant"] = to_string(c.variant);
    j["times"] = c.times;
    j["mean_w2_sq"] = c.mean_w2_sq;
    j["stderr_w2_sq"] = c.stderr_w2_sq;
    j["n_replicas"] = c.n_replicas;
    ordered_json fit;
    fit["fitted_exponent"] = c.fit.fitted_exponent;
    fit["fit_r2"] = c.fit.fit_r2;
    fit["theory_exponent"] = c.fit.theory_exponent;
    fit["reference_exponent"] = c.fit.reference_exponent;
    j["fit"] = fit;
    return j;
}

}  // namespace

std::string ComparisonReport::to_json_string() const {
    ordered_json j;
    j["a"] = curve_to_json(a);
    j["b"] = curve_to_json(b);
    j["terminal_w2"] = terminal_w2;
    j["reference_note"] = reference_note;
    return j.dump(2) + "\n";
}

std::string ComparisonReport::curves_to_csv() const {
    std::ostringstream out;
    out << "name,variant,t,mean_w2_sq,stderr_w2_sq,n_replicas\n";
    for (const VariantCurve* c : {&a, &b})
        for (std::size_t i = 0; i < c->times.size(); ++i)
            out << csv_field(c->name) << ',' << to_string(c->variant) << ','
                << fmt_double(c->times[i]) << ',' << fmt_double(c->mean_w2_sq[i]) << ','
                << fmt_double(c->stderr_w2_sq[i]) << ',' << c->n_replicas << "\n";
    return out.str();
}

ValidationReport validate_config(const ExperimentSpec& spec, std::optional<double> l_m,
                                 std::optional<double> c_1) {
    ValidationReport report;
    try {
        spec.validate();
    } catch (const std::exception& e) {
        report.errors.emplace_back(e.what());
        return report;
    }
    const SimulationConfig& cfg = spec.base_config;
    report.lambda_regime_ok = cfg.lambda_regime_ok();
    if (!report.lambda_regime_ok)
        report.warnings.emplace_back("lambda <= 8 sigma^2: outside the contraction regime");
    if (cfg.variant != Variant::StandardCBO_N && cfg.kappa > 0.1)
        report.warnings.emplace_back("kappa > 0.1: the rescaling is not small");
    if (cfg.lambda * cfg.dt >= 0.5)
        report.warnings.emplace_back("lambda*dt >= 0.5: explicit Euler step may be unstable");

    double used_l_m, used_c_1;
    if (l_m.has_value() && c_1.has_value()) {
        used_l_m = *l_m;
        used_c_1 = *c_1;
        report.bounds_estimated = false;
        report.bounds_estimate_stable = true;
    } else if (std::isfinite(cfg.alpha)) {
        const Objective f = spec.make_objective_instance();
        const double R = std::max(1.0, 10.0 * initial_second_moment(cfg));
        const LmC1Estimate est =
            estimate_lm_c1(f, cfg.alpha, R, 300, mix_key(cfg.seed, 0xE57u));
        used_l_m = l_m.value_or(est.l_m_hat);
        used_c_1 = c_1.value_or(est.c_1_hat);
        report.bounds_estimated = true;
        report.bounds_estimate_stable = est.stable;
    } else {
        used_l_m = l_m.value_or(1.0);
        used_c_1 = c_1.value_or(1.0);
        report.bounds_estimated = false;
        report.bounds_estimate_stable = false;
    }
    report.constants = dissipativity_constants(cfg.lambda, cfg.sigma,
                                               cfg.variant == Variant::StandardCBO_N ? 0.0
                                                                                     : cfg.kappa,
                                               cfg.alpha, cfg.dim, used_l_m, used_c_1, 1.0);
    return report;
}

std::string ValidationReport::to_json_string() const {
    ordered_json j;
    j["errors"] = errors;
    j["warnings"] = warnings;
    j["lambda_gt_8sigma_sq"] = lambda_regime_ok;
    if (constants.has_value()) {
        j["constants"] = constants_to_json(*constants);
        j["bounds_estimated"] = bounds_estimated;
        j["bounds_estimate_stable"] = bounds_estimate_stable;
    }
    return j.dump(2) + "\n";
}

std::string catalog_json() {
    ordered_json j;
    ordered_json objectives = ordered_json::array();
    for (const Objective& f : benchmark_catalog(2)) {
        ordered_json o;
        o["name"] = f.name;
        o["has_growth_metadata"] = f.growth.has_value();
        objectives.push_back(o);
    }
    j["objectives"] = objectives;
    j["variants"] = {to_string(Variant::StandardCBO_N),
                     to_string(Variant::RescaledCBO_N),
                     to_string(Variant::MeanFieldWeighted_N),
                     to_string(Variant::SelfInteracting),
                     to_string(Variant::SelfInteractingWeighted),
                     to_string(Variant::MarkovianReference),
                     to_string(Variant::MultiSelfInteracting)};
    j["weight_flows"] = {to_string(WeightFlowKind::DiracAtOne),
                         to_string(WeightFlowKind::Lebesgue),
                         to_string(WeightFlowKind::SampledDelay)};
    return j.dump(2) + "\n";
}

}  // namespace cbo
