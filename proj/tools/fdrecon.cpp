#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fdrecon/bench.hpp"
#include "fdrecon/csv_io.hpp"
#include "fdrecon/envelope.hpp"
#include "fdrecon/errors.hpp"
#include "fdrecon/manifest.hpp"
#include "fdrecon/reconstruct.hpp"
#include "fdrecon/simgen.hpp"
#include "fdrecon/svg_plot.hpp"

namespace {

using namespace fdrecon;

int exit_code(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::Input: return 3;
        case ErrorCategory::Config: return 4;
        case ErrorCategory::Numerical: return 5;
        case ErrorCategory::Io: return 6;
        case ErrorCategory::Structural:
        case ErrorCategory::Domain: return 1;
    }
    return 1;
}

int default_workers() {
    if (const char* env = std::getenv("FDRECON_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 0) return static_cast<int>(v);
        std::cerr << "warning: ignoring malformed FDRECON_WORKERS='" << env << "'\n";
    }
    return 0;
}

void apply_workers(int workers) {
#ifdef _OPENMP
    if (workers > 0) omp_set_num_threads(workers);
#else
    (void)workers;
#endif
}

std::vector<double> parse_double_list(const std::string& csv, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ConfigError(flag + ": bad number '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError(flag + ": empty list");
    return out;
}

std::string fmt(double v) { return format_value(v); }

struct SimulateArgs {
    std::size_t n = 100;
    std::size_t grid_points = 100;
    GPParams gp;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::string out;
};

int run_simulate(const SimulateArgs& a) {
    const Grid grid = Grid::uniform(a.grid_points);
    const GpSample gs = gp_sample(a.n, grid, a.gp, a.seed, a.stream);
    write_sample_csv_file(a.out, gs.sample);

    RunManifest man;
    man.subcommand = "simulate";
    man.seed = a.seed;
    man.set("n", std::to_string(a.n));
    man.set("grid_points", std::to_string(a.grid_points));
    man.set("alpha", fmt(a.gp.alpha));
    man.set("beta", fmt(a.gp.beta));
    man.set("sigma", fmt(a.gp.sigma));
    man.set("ell", fmt(a.gp.ell));
    man.set("jitter", fmt(a.gp.jitter));
    man.set("stream", std::to_string(a.stream));
    man.outputs.push_back(a.out);
    man.write(a.out + ".manifest.json");
    return 0;
}

struct CorruptArgs {
    std::string in, out;
    std::string mechanism = "points";
    MissingSpec spec;
    std::uint64_t stream = 0;
};

int run_corrupt(const CorruptArgs& a) {
    MissingSpec spec = a.spec;
    spec.mechanism = missing_mechanism_from_string(a.mechanism);
    const FunctionalSample sample = read_sample_csv_file(a.in);
    const FunctionalSample corrupted = apply_missing(sample, spec, a.stream);
    write_sample_csv_file(a.out, corrupted);

    RunManifest man;
    man.subcommand = "corrupt";
    man.seed = spec.seed;
    man.set("mechanism", to_string(spec.mechanism));
    man.set("c", fmt(spec.c_percent));
    man.set("p", fmt(spec.p_percent));
    man.set("m", std::to_string(spec.m));
    man.set("stream", std::to_string(a.stream));
    man.add_input(a.in);
    man.outputs.push_back(a.out);
    man.write(a.out + ".manifest.json");
    return 0;
}

struct DepthArgs {
    std::string in, out;
    std::string kind = "mbd2";
};

int run_depth(const DepthArgs& a) {
    const DepthKind kind = depth_kind_from_string(a.kind);
    const FunctionalSample sample = read_sample_csv_file(a.in);
    const std::vector<double> depths = poifd_all(sample, kind);

    std::ofstream out(a.out);
    if (!out) throw IoError("cannot open for writing: " + a.out);
    out << "index,depth,observed_measure\n";
    for (std::size_t i = 0; i < sample.size(); ++i)
        out << i << ',' << fmt(depths[i]) << ','
            << fmt(measure(sample.curve(i).mask(), sample.grid())) << '\n';
    out.flush();
    if (!out) throw IoError("write failed: " + a.out);

    RunManifest man;
    man.subcommand = "depth";
    man.set("depth_kind", to_string(kind));
    man.add_input(a.in);
    man.outputs.push_back(a.out);
    man.write(a.out + ".manifest.json");
    return 0;
}

struct EnvelopeArgs {
    std::string in, out;
    std::size_t focal = 0;
    std::string kind = "mbd2";
    bool coverage_fallback = false;
    bool rms_distance = false;
};

int run_envelope(const EnvelopeArgs& a) {
    const DepthKind kind = depth_kind_from_string(a.kind);
    const FunctionalSample sample = read_sample_csv_file(a.in);
    if (a.focal >= sample.size())
        throw ConfigError("focal index " + std::to_string(a.focal) + " out of range (n=" +
                          std::to_string(sample.size()) + ")");
    EnvelopeConfig config;
    config.coverage_fallback = a.coverage_fallback;
    config.norm = a.rms_distance ? DistanceNorm::Rms : DistanceNorm::MeanL2;
    const Envelope env = build_envelope(sample, a.focal, kind, config);

    std::ofstream out(a.out);
    if (!out) throw IoError("cannot open for writing: " + a.out);
    out << "focal,member,distance,distance_defined,reason\n";
    for (const EnvelopeMember& m : env.members)
        out << env.focal << ',' << m.index << ',' << fmt(m.distance) << ','
            << (m.distance_defined ? 1 : 0) << ',' << to_string(m.reason) << '\n';
    out.flush();
    if (!out) throw IoError("write failed: " + a.out);

    std::cout << "members=" << env.members.size() << " final_depth=" << fmt(env.final_depth)
              << " enveloped_measure=" << fmt(env.enveloped_measure)
              << " iterations=" << env.trace.size() << "\n";

    RunManifest man;
    man.subcommand = "envelope";
    man.set("focal", std::to_string(a.focal));
    man.set("depth_kind", to_string(kind));
    man.set("coverage_fallback", a.coverage_fallback ? "1" : "0");
    man.set("rms_distance", a.rms_distance ? "1" : "0");
    man.add_input(a.in);
    man.outputs.push_back(a.out);
    man.write(a.out + ".manifest.json");
    return 0;
}

struct ReconstructArgs {
    std::string in, out;
    std::string report;
    std::string kind = "mbd2";
    std::optional<double> theta;
    std::string theta_grid;
    bool fallback_mean = false;
    bool coverage_fallback = false;
    bool rms_distance = false;
    int workers = 0;
    std::string plot;
    std::string truth;
};

int run_reconstruct(const ReconstructArgs& a) {
    apply_workers(a.workers);
    ReconstructConfig config;
    config.kind = depth_kind_from_string(a.kind);
    config.envelope.coverage_fallback = a.coverage_fallback;
    config.envelope.norm = a.rms_distance ? DistanceNorm::Rms : DistanceNorm::MeanL2;
    if (a.theta) config.fixed_theta = *a.theta;
    if (!a.theta_grid.empty()) config.theta_grid = parse_double_list(a.theta_grid, "--theta-grid");
    config.fallback_mean = a.fallback_mean;

    const FunctionalSample sample = read_sample_csv_file(a.in);
    const SampleReconstruction recon = reconstruct_sample(sample, config);
    if (recon.results.empty()) std::cerr << "warning: no missing data\n";
    write_sample_csv_file(a.out, recon.completed);

    const std::string report_path = a.report.empty() ? a.out + ".report.jsonl" : a.report;
    std::ofstream rep(report_path);
    if (!rep) throw IoError("cannot open for writing: " + report_path);
    for (const ReconstructionResult& r : recon.results) {
        nlohmann::ordered_json j;
        j["curve"] = r.focal;
        j["status"] = r.status;
        j["theta"] = r.theta;
        j["delta"] = r.delta;
        j["coverage_fraction"] = r.coverage_fraction;
        j["final_depth"] = r.envelope.final_depth;
        j["enveloped_measure"] = r.envelope.enveloped_measure;
        j["iterations"] = r.envelope.trace.size();
        nlohmann::ordered_json members = nlohmann::ordered_json::array();
        for (const EnvelopeMember& m : r.envelope.members)
            members.push_back({{"index", m.index},
                               {"distance", m.distance},
                               {"distance_defined", m.distance_defined},
                               {"reason", to_string(m.reason)}});
        j["envelope"] = members;
        rep << j.dump() << '\n';
    }
    rep.flush();
    if (!rep) throw IoError("write failed: " + report_path);

    std::optional<FunctionalSample> truth;
    if (!a.truth.empty()) truth = read_sample_csv_file(a.truth);
    if (!a.plot.empty())
        write_plot_svg_file(a.plot, sample, recon.results, truth ? &*truth : nullptr);

    RunManifest man;
    man.subcommand = "reconstruct";
    man.set("depth_kind", to_string(config.kind));
    if (config.fixed_theta)
        man.set("theta", fmt(*config.fixed_theta));
    else {
        std::string grid_str;
        for (double v : config.theta_grid) {
            if (!grid_str.empty()) grid_str += ',';
            grid_str += fmt(v);
        }
        man.set("theta_grid", grid_str);
        man.set("tuned_theta", fmt(recon.theta));
    }
    man.set("fallback_mean", a.fallback_mean ? "1" : "0");
    man.set("coverage_fallback", a.coverage_fallback ? "1" : "0");
    man.set("rms_distance", a.rms_distance ? "1" : "0");
    man.set("workers", std::to_string(a.workers));
    man.add_input(a.in);
    if (!a.truth.empty()) man.add_input(a.truth);
    man.outputs.push_back(a.out);
    man.outputs.push_back(report_path);
    if (!a.plot.empty()) man.outputs.push_back(a.plot);
    man.write(a.out + ".manifest.json");
    return 0;
}

struct BenchArgs {
    std::string config_path;
    std::string out_dir = ".";
    int workers = -1;  // -1: keep config value
    std::optional<std::uint64_t> seed;
};

int run_bench(const BenchArgs& a) {
    BenchConfig config = parse_bench_config_file(a.config_path);
    if (a.workers >= 0) config.workers = a.workers;
    if (a.seed) config.seed = *a.seed;

    // Create the output directory before the (potentially long) run so a
    // bad path fails fast instead of after the benchmark completes.
    std::error_code ec;
    std::filesystem::create_directories(a.out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + a.out_dir + " (" + ec.message() + ")");

    const BenchResult result = run_benchmark(config);

    const std::string results_path = a.out_dir + "/results.csv";
    const std::string reps_path = a.out_dir + "/replicates.csv";
    const std::string table_path = a.out_dir + "/table.txt";
    {
        std::ofstream out(results_path);
        if (!out) throw IoError("cannot open for writing: " + results_path);
        write_results_csv(out, result);
    }
    {
        std::ofstream out(reps_path);
        if (!out) throw IoError("cannot open for writing: " + reps_path);
        write_replicates_csv(out, result);
    }
    const std::string table = format_table(result);
    {
        std::ofstream out(table_path);
        if (!out) throw IoError("cannot open for writing: " + table_path);
        out << table;
    }
    std::cout << table;
    std::cerr << "elapsed_seconds=" << result.total_seconds << "\n";

    RunManifest man;
    man.subcommand = "bench";
    man.seed = config.seed;
    man.set("n", std::to_string(config.n));
    man.set("grid_points", std::to_string(config.grid_points));
    man.set("replicates", std::to_string(config.replicates));
    man.set("mechanism", to_string(config.mechanism));
    man.set("depth_kind", to_string(config.kind));
    man.set("workers", std::to_string(config.workers));
    man.add_input(a.config_path);
    man.outputs = {results_path, reps_path, table_path};
    man.write(a.out_dir + "/manifest.json");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"depth-based reconstruction of partially observed curves"};
    app.require_subcommand(1);
    const int env_workers = default_workers();

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "draw a Gaussian-process sample to a wide CSV");
    c_sim->add_option("--n", sim.n, "number of curves")->check(CLI::PositiveNumber);
    c_sim->add_option("--grid-points", sim.grid_points, "grid size")->check(CLI::Range(2u, 100000u));
    c_sim->add_option("--alpha", sim.gp.alpha, "noise kernel scale");
    c_sim->add_option("--beta", sim.gp.beta, "noise kernel decay");
    c_sim->add_option("--sigma", sim.gp.sigma, "mean kernel scale");
    c_sim->add_option("--ell", sim.gp.ell, "mean kernel length-scale");
    c_sim->add_option("--jitter", sim.gp.jitter, "base diagonal jitter");
    c_sim->add_option("--seed", sim.seed, "master seed");
    c_sim->add_option("--stream", sim.stream, "RNG substream");
    c_sim->add_option("--out", sim.out, "output CSV path")->required();

    CorruptArgs cor;
    auto* c_cor = app.add_subcommand("corrupt", "apply a missing-data mechanism to a full sample");
    c_cor->add_option("--in", cor.in, "input CSV")->required();
    c_cor->add_option("--out", cor.out, "output CSV")->required();
    c_cor->add_option("--mechanism", cor.mechanism, "points or intervals");
    c_cor->add_option("--c", cor.spec.c_percent, "% of curves left fully observed");
    c_cor->add_option("--p", cor.spec.p_percent, "observed % per corrupted curve");
    c_cor->add_option("--m", cor.spec.m, "interval count (intervals mechanism)");
    c_cor->add_option("--seed", cor.spec.seed, "master seed");
    c_cor->add_option("--stream", cor.stream, "RNG substream");

    DepthArgs dep;
    auto* c_dep = app.add_subcommand("depth", "per-curve partially observed integrated depth");
    c_dep->add_option("--in", dep.in, "input CSV")->required();
    c_dep->add_option("--out", dep.out, "output CSV (index,depth,observed_measure)")->required();
    c_dep->add_option("--depth-kind", dep.kind, "fm or mbd2");

    EnvelopeArgs env;
    auto* c_env = app.add_subcommand("envelope", "envelope provenance report for one curve");
    c_env->add_option("--in", env.in, "input CSV")->required();
    c_env->add_option("--out", env.out, "member CSV")->required();
    c_env->add_option("--focal", env.focal, "focal curve index")->required();
    c_env->add_option("--depth-kind", env.kind, "fm or mbd2");
    c_env->add_flag("--coverage-fallback", env.coverage_fallback,
                    "sweep undefined-distance candidates last");
    c_env->add_flag("--rms-distance", env.rms_distance, "use the RMS distance variant");

    ReconstructArgs rec;
    auto* c_rec = app.add_subcommand("reconstruct", "fill missing segments of every curve");
    c_rec->add_option("--in", rec.in, "input CSV")->required();
    c_rec->add_option("--out", rec.out, "completed CSV")->required();
    c_rec->add_option("--report", rec.report, "JSON-lines per-curve report path");
    c_rec->add_option("--depth-kind", rec.kind, "fm or mbd2");
    double theta_val = 0.0;
    auto* theta_opt = c_rec->add_option("--theta", theta_val, "fixed weight temperature");
    c_rec->add_option("--theta-grid", rec.theta_grid, "comma list of candidate thetas");
    c_rec->add_flag("--fallback-mean", rec.fallback_mean,
                    "fill uncoverable points with the sample pointwise mean");
    c_rec->add_flag("--coverage-fallback", rec.coverage_fallback,
                    "sweep undefined-distance candidates last");
    c_rec->add_flag("--rms-distance", rec.rms_distance, "use the RMS distance variant");
    c_rec->add_option("--workers", rec.workers, "parallel worker count (0 = runtime default)")
        ->default_val(env_workers);
    c_rec->add_option("--plot", rec.plot, "write an SVG of reconstructions");
    c_rec->add_option("--truth", rec.truth, "fully observed CSV for the plot's true curves");

    BenchArgs ben;
    auto* c_ben = app.add_subcommand("bench", "Monte-Carlo benchmark from a config file");
    c_ben->add_option("--config", ben.config_path, "key=value config file")->required();
    c_ben->add_option("--out-dir", ben.out_dir, "output directory (created if missing)");
    c_ben->add_option("--workers", ben.workers, "override config worker count");
    std::uint64_t bench_seed = 0;
    auto* seed_opt = c_ben->add_option("--seed", bench_seed, "override config seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*c_sim) return run_simulate(sim);
        if (*c_cor) return run_corrupt(cor);
        if (*c_dep) return run_depth(dep);
        if (*c_env) return run_envelope(env);
        if (*c_rec) {
            if (theta_opt->count() > 0) rec.theta = theta_val;
            return run_reconstruct(rec);
        }
        if (*c_ben) {
            if (seed_opt->count() > 0) ben.seed = bench_seed;
            return run_bench(ben);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
