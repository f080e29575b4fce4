#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fdrecon/reconstruct.hpp"
#include "fdrecon/simgen.hpp"

namespace fdrecon {

struct BenchConfig {
    std::size_t n = 200;
    std::size_t grid_points = 100;
    std::size_t replicates = 100;
    GPParams gp;
    MissingMechanism mechanism = MissingMechanism::RandomPoints;
    std::vector<double> c_values{0.0};
    std::vector<double> p_values{25.0, 50.0, 75.0};
    std::vector<std::size_t> m_values{1};
    DepthKind kind = DepthKind::MBD2;
    std::vector<double> theta_grid = default_theta_grid();
    std::optional<double> fixed_theta;
    std::uint64_t seed = 0;
    int workers = 0;             // 0 keeps the runtime default
    bool fix_mean = false;       // share one mean path across replicates
    bool per_curve_mse = false;  // average per-curve MSEs instead of pooling points
    bool fallback_mean = false;
    bool coverage_fallback = false;
    bool rms_distance = false;

    void validate() const;
};

/// Flat key=value config with # comments; unknown keys are rejected.
BenchConfig parse_bench_config(std::istream& in, const std::string& source_name = "<config>");
BenchConfig parse_bench_config_file(const std::string& path);

struct ReplicateOutcome {
    std::size_t replicate = 0;
    std::optional<double> mse;   // empty when the replicate failed or filled nothing
    double mean_coverage = 0.0;  // over incomplete curves
    double theta = 0.0;
    std::string status;          // "ok" or the failure reason
    double seconds = 0.0;        // timing; kept out of the deterministic outputs
};

struct CellResult {
    double c = 0.0;
    double p = 0.0;
    std::size_t m = 1;
    std::vector<ReplicateOutcome> replicates;
    std::optional<double> median_mse;
    double mean_coverage = 0.0;
    std::size_t failed = 0;
    bool flagged = false;  // more than 10% of replicates failed
    double seconds = 0.0;
};

struct BenchResult {
    BenchConfig config;
    std::vector<CellResult> cells;
    double total_seconds = 0.0;
};

/// Quadrature-weighted mean squared error over the filled missing points of
/// all incomplete curves, against the fully observed original. Per-curve
/// mode averages per-curve MSEs instead of pooling the points. Empty when
/// nothing was filled.
std::optional<double> mse_missing(const FunctionalSample& original,
                                  const SampleReconstruction& recon, bool per_curve = false);

/// Exact sample median (midpoint of the two central order statistics for
/// even sizes). Throws on empty input.
double exact_median(std::vector<double> values);

/// generate -> corrupt -> reconstruct -> score over every (c, p, m) cell and
/// replicate. Replicates use substreams 2r (generation) and 2r+1
/// (corruption) of the master seed, shared across cells, and are written to
/// preallocated slots, so results never depend on the worker count.
BenchResult run_benchmark(const BenchConfig& config);

/// One row per cell; "NA" for undefined medians; bit-stable.
void write_results_csv(std::ostream& out, const BenchResult& result);
/// One row per replicate.
void write_replicates_csv(std::ostream& out, const BenchResult& result);
/// Text table: method-variant rows, one column per (c, p) cell.
std::string format_table(const BenchResult& result);

}  // namespace fdrecon
