#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"

#include "cbo/harness.hpp"

namespace {

// Command-line overrides applied on top of a loaded spec file.
struct Overrides {
    std::uint64_t seed = 0;
    int replicas = 0;
    std::string out;
    int threads = 0;
    bool has_seed = false;
    bool has_replicas = false;
    bool has_out = false;
};

void apply(const Overrides& o, cbo::ExperimentSpec& spec) {
    if (o.has_seed) spec.base_config.seed = o.seed;
    if (o.has_replicas) spec.replicas = o.replicas;
    if (o.has_out) spec.outputs_dir = o.out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << text;
}

int run_cmd(const std::string& spec_path, const Overrides& o) {
    cbo::ExperimentSpec spec = cbo::ExperimentSpec::from_json_file(spec_path);
    apply(o, spec);
    const cbo::ExperimentResult result = cbo::run_experiment(spec, o.threads);
    std::cout << "manifest: " << result.manifest_path << "\n"
              << "summary: " << result.summary_path << "\n";
    if (!result.manifest.aborts.empty()) {
        std::cerr << result.manifest.aborts.size()
                  << " replica(s) aborted on non-finite states; see the manifest\n";
        return 2;
    }
    return 0;
}

int compare_cmd(const std::string& path_a, const std::string& path_b, const Overrides& o) {
    cbo::ExperimentSpec a = cbo::ExperimentSpec::from_json_file(path_a);
    cbo::ExperimentSpec b = cbo::ExperimentSpec::from_json_file(path_b);
    apply(o, a);
    apply(o, b);
    const cbo::ComparisonReport report = cbo::compare_variants(a, b, o.threads);
    const std::filesystem::path dir = o.has_out ? o.out : a.outputs_dir;
    std::filesystem::create_directories(dir);
    write_file(dir / "comparison.json", report.to_json_string());
    write_file(dir / "comparison.csv", report.curves_to_csv());
    std::cout << "comparison: " << (dir / "comparison.json").string() << "\n"
              << "curves: " << (dir / "comparison.csv").string() << "\n"
              << "terminal_w2: " << report.terminal_w2 << "\n";
    return 0;
}

int validate_cmd(const std::string& spec_path, const Overrides& o) {
    cbo::ExperimentSpec spec = cbo::ExperimentSpec::from_json_file(spec_path);
    apply(o, spec);
    const cbo::ValidationReport report = cbo::validate_config(spec);
    std::cout << report.to_json_string();
    return report.errors.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"consensus-based optimization experiment harness"};
    app.require_subcommand(1);
    app.fallthrough();

    Overrides o;
    auto* seed_opt = app.add_option("--seed", o.seed, "override the base seed");
    auto* replicas_opt =
        app.add_option("--replicas", o.replicas, "override the replica count")
            ->check(CLI::PositiveNumber);
    auto* out_opt = app.add_option("--out", o.out, "override the output directory");
    app.add_option("--threads", o.threads, "worker threads (0 = all hardware threads)");

    std::string spec_path;
    std::string path_a;
    std::string path_b;
    CLI::App* run_sub = app.add_subcommand("run", "execute an experiment spec");
    run_sub->add_option("spec", spec_path, "experiment spec (JSON)")->required();
    CLI::App* compare_sub =
        app.add_subcommand("compare", "run two specs against a shared reference measure");
    compare_sub->add_option("spec_a", path_a, "first spec (JSON)")->required();
    compare_sub->add_option("spec_b", path_b, "second spec (JSON)")->required();
    CLI::App* validate_sub =
        app.add_subcommand("validate", "check a spec and report regime diagnostics");
    validate_sub->add_option("spec", spec_path, "experiment spec (JSON)")->required();
    CLI::App* catalog_sub =
        app.add_subcommand("catalog", "list objectives, variants, and weight flows");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    o.has_seed = seed_opt->count() > 0;
    o.has_replicas = replicas_opt->count() > 0;
    o.has_out = out_opt->count() > 0;

    try {
        if (run_sub->parsed()) return run_cmd(spec_path, o);
        if (compare_sub->parsed()) return compare_cmd(path_a, path_b, o);
        if (validate_sub->parsed()) return validate_cmd(spec_path, o);
        if (catalog_sub->parsed()) {
            std::cout << cbo::catalog_json();
            return 0;
        }
    } catch (const cbo::BlowUpError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
