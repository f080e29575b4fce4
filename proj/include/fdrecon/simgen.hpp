#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fdrecon/rng.hpp"
#include "fdrecon/sample.hpp"

namespace fdrecon {

struct GPParams {
    double alpha = 1.0;   // noise kernel scale: alpha * exp(-beta*|s-t|)
    double beta = 2.0;    // noise kernel decay rate
    double sigma = 3.0;   // mean kernel scale: sigma * exp(-2*sin^2(pi*|s-t|)/ell^2)
    double ell = 0.5;     // mean kernel length-scale
    double jitter = 0.0;  // extra diagonal regularizer applied before escalation

    void validate() const;
};

/// Dense row-major covariance matrices for the two kernels.
std::vector<double> exp_cov(const Grid& grid, double alpha, double beta);
std::vector<double> periodic_cov(const Grid& grid, double sigma, double ell);

/// Plain lower-triangular Cholesky factor of a row-major SPD matrix.
std::vector<double> cholesky_lower(const std::vector<double>& k, std::size_t n);

/// Cholesky with diagonal jitter escalation: base jitter first, then
/// 1e-10 * max diagonal growing tenfold up to 1e-6 * max diagonal, after
/// which the factorization error is raised.
std::vector<double> cholesky_with_jitter(std::vector<double> k, std::size_t n,
                                         double base_jitter = 0.0);

struct GpSample {
    FunctionalSample sample;
    std::vector<double> mean_path;
};

/// n curves X_i = mu + eps_i on the grid: one mean path mu from the periodic
/// kernel, then independent exponential-kernel noise paths, all from the
/// (seed, stream) counter RNG. Fully observed.
GpSample gp_sample(std::size_t n, const Grid& grid, const GPParams& params, std::uint64_t seed,
                   std::uint64_t stream = 0);

/// A mean path alone (for pinning mu across replicates).
std::vector<double> gp_mean_path(const Grid& grid, const GPParams& params, std::uint64_t seed,
                                 std::uint64_t stream = 0);

/// As gp_sample but with a caller-supplied mean path; only noise is drawn.
GpSample gp_sample_with_mean(std::size_t n, const Grid& grid, const GPParams& params,
                             std::vector<double> mean_path, std::uint64_t seed,
                             std::uint64_t stream = 0);

enum class MissingMechanism { RandomPoints, RandomIntervals };

const char* to_string(MissingMechanism mechanism);
MissingMechanism missing_mechanism_from_string(const std::string& name);

struct MissingSpec {
    MissingMechanism mechanism = MissingMechanism::RandomPoints;
    double c_percent = 0.0;   // share of curves left fully observed
    double p_percent = 50.0;  // observed share per corrupted curve
    std::size_t m = 1;        // interval count (RandomIntervals)
    std::uint64_t seed = 0;

    void validate() const;
};

/// Corrupted curves keep a uniform subset of round(p% * T) grid points.
FunctionalSample apply_random_points(const FunctionalSample& sample, const MissingSpec& spec,
                                     std::uint64_t stream = 0);

/// Corrupted curves keep m separated index intervals whose point budget
/// round(p% * (T-1)) makes the observed measure match p% of the domain to
/// within one grid spacing; gap lengths are a uniform integer composition.
FunctionalSample apply_random_intervals(const FunctionalSample& sample, const MissingSpec& spec,
                                        std::uint64_t stream = 0);

FunctionalSample apply_missing(const FunctionalSample& sample, const MissingSpec& spec,
                               std::uint64_t stream = 0);

}  // namespace fdrecon
