#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cbo/dynamics.hpp"
#include "cbo/metrics.hpp"
#include "cbo/objective.hpp"

namespace cbo {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// One swept parameter: the config field name and the values to visit. Multiple
/// entries form a cartesian product of sweep points.
struct SweepEntry {
    std::string parameter;
    std::vector<double> values;
};

/// Full experiment description. JSON round-trips with strict unknown-key
/// rejection; every omitted field is defaulted and echoed back on
/// serialization so manifests carry the complete resolved configuration.
struct ExperimentSpec {
    std::string name = "experiment";
    std::string objective_name = "quadratic";
    State objective_shift;  // quadratic only; empty = unshifted
    SimulationConfig base_config;
    int replicas = 1;
    std::vector<double> time_probe_grid;  // empty: log grid, 16 points, 10*dt .. t_final
    std::vector<SweepEntry> sweep;
    std::string outputs_dir = "out";
    double burn_in_fraction = 0.5;  // for the occupation-window summary measure
    State m_star;                   // MarkovianReference only

    static ExperimentSpec from_json_file(const std::string& path);
    static ExperimentSpec from_json_string(const std::string& text);
    std::string to_json_string() const;

    void validate() const;  // throws invalid_argument naming the failing field
    std::vector<double> resolved_probe_grid() const;
    Objective make_objective_instance() const;
};

struct ReplicaAbort {
    int sweep_point = 0;
    int replica = 0;
    long step = 0;
};

/// Record of one run_experiment invocation: resolved spec, per-replica seeds,
/// regime diagnostics, and abort diagnostics. Re-running the embedded spec
/// reproduces every trajectory file byte for byte.
struct RunManifest {
    std::string version = kLibraryVersion;
    ExperimentSpec spec;                               // fully resolved
    std::vector<std::vector<std::uint64_t>> replica_seeds;  // [sweep point][replica]
    std::vector<ReplicaAbort> aborts;
    bool lambda_regime_ok = false;  // lambda > 8 sigma^2
    DissipativityConstants constants;  // with estimated consensus-map bounds
    bool bounds_estimate_stable = false;
    double bounds_R = 0.0;  // sampling radius^2 used for the bound estimates
    double wall_seconds = 0.0;

    std::string to_json_string() const;
    static RunManifest from_json_file(const std::string& path);  // spec + seeds only
};

struct PointSummary {
    std::vector<std::pair<std::string, double>> parameters;  // sweep assignment
    std::vector<std::uint64_t> replica_seeds;
    std::vector<State> final_consensus;       // per replica (empty if aborted)
    std::vector<State> final_state_mean;      // per replica
    State replica_mean_terminal_state;        // over completed replicas
    double fixed_point_residual = 0.0;        // |mean(mu) - kappa m_alpha(mu)| on pooled window
    LaplaceReport laplace;
    std::vector<double> probe_times;
    std::vector<double> mean_w2_sq;    // vs the point's replica-0 window measure
    std::vector<double> stderr_w2_sq;
    int completed_replicas = 0;
};

struct ExperimentResult {
    RunManifest manifest;
    std::vector<PointSummary> points;
    std::string manifest_path;
    std::string summary_path;
};

/// Runs every (sweep point x replica), writing per-replica trajectory CSVs,
/// per-point decay CSVs, a summary JSON, and the manifest JSON under
/// outputs_dir/name/. Replica failures are recorded and do not abort siblings.
ExperimentResult run_experiment(const ExperimentSpec& spec, int n_threads = 0);

struct VariantCurve {
    std::string name;
    Variant variant = Variant::SelfInteracting;
    std::vector<double> times;
    std::vector<double> mean_w2_sq;
    std::vector<double> stderr_w2_sq;
    int n_replicas = 0;
    DecayFit fit;
};

struct ComparisonReport {
    VariantCurve a;
    VariantCurve b;
    double terminal_w2 = 0.0;  // between the two pooled occupation-window measures
    std::string reference_note;

    std::string to_json_string() const;
    std::string curves_to_csv() const;
};

/// Runs both specs (shared lambda/sigma/kappa/alpha/dim/objective required),
/// measures both decay curves against a common reference window measure built
/// from spec A's first replica, and the distance between the two pooled
/// occupation-window measures.
ComparisonReport compare_variants(const ExperimentSpec& a, const ExperimentSpec& b,
                                  int n_threads = 0);

struct ValidationReport {
    std::vector<std::string> errors;    // hard violations (CLI exit 1)
    std::vector<std::string> warnings;  // regime advisories
    bool lambda_regime_ok = false;
    std::optional<DissipativityConstants> constants;
    bool bounds_estimated = false;  // l_m / c_1 came from estimate_lm_c1
    bool bounds_estimate_stable = false;

    std::string to_json_string() const;
};

/// Report-only configuration checks: hard parameter violations become errors;
/// regime advisories (lambda <= 8 sigma^2, kappa > 0.1, lambda*dt >= 0.5)
/// become warnings. Dissipativity constants use the supplied consensus-map
/// bounds or, when absent, a quick empirical estimate.
ValidationReport validate_config(const ExperimentSpec& spec,
                                 std::optional<double> l_m = std::nullopt,
                                 std::optional<double> c_1 = std::nullopt);

/// Objective names, variant names, and weight-flow kinds as a JSON listing.
std::string catalog_json();

}  // namespace cbo
