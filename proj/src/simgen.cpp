#include "fdrecon/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "fdrecon/errors.hpp"

namespace fdrecon {

void GPParams::validate() const {
    if (alpha < 0.0) throw ConfigError("alpha must be >= 0");
    if (beta <= 0.0) throw ConfigError("beta must be > 0");
    if (sigma < 0.0) throw ConfigError("sigma must be >= 0");
    if (ell <= 0.0) throw ConfigError("ell must be > 0");
    if (jitter < 0.0) throw ConfigError("jitter must be >= 0");
}

void MissingSpec::validate() const {
    if (c_percent < 0.0 || c_percent > 100.0) throw ConfigError("c must be in [0, 100]");
    if (p_percent <= 0.0 || p_percent > 100.0) throw ConfigError("p must be in (0, 100]");
    if (m < 1) throw ConfigError("m must be >= 1");
}

const char* to_string(MissingMechanism mechanism) {
    return mechanism == MissingMechanism::RandomPoints ? "points" : "intervals";
}

MissingMechanism missing_mechanism_from_string(const std::string& name) {
    if (name == "points" || name == "random_points") return MissingMechanism::RandomPoints;
    if (name == "intervals" || name == "random_intervals") return MissingMechanism::RandomIntervals;
    throw ConfigError("unknown missing mechanism: '" + name + "' (expected points or intervals)");
}

std::vector<double> exp_cov(const Grid& grid, double alpha, double beta) {
    const std::size_t n = grid.size();
    std::vector<double> k(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            k[i * n + j] = alpha * std::exp(-beta * std::abs(grid.point(i) - grid.point(j)));
    return k;
}

std::vector<double> periodic_cov(const Grid& grid, double sigma, double ell) {
    const std::size_t n = grid.size();
    std::vector<double> k(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double s = std::sin(std::numbers::pi * std::abs(grid.point(i) - grid.point(j)));
            k[i * n + j] = sigma * std::exp(-2.0 * s * s / (ell * ell));
        }
    }
    return k;
}

std::vector<double> cholesky_lower(const std::vector<double>& k, std::size_t n) {
    if (k.size() != n * n) throw StructuralError("cholesky_lower: matrix size mismatch");
    std::vector<double> l(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double d = k[j * n + j];
        for (std::size_t c = 0; c < j; ++c) d -= l[j * n + c] * l[j * n + c];
        if (d <= 0.0 || !std::isfinite(d))
            throw NumericalError("matrix not positive definite at pivot " + std::to_string(j));
        l[j * n + j] = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = k[i * n + j];
            for (std::size_t c = 0; c < j; ++c) s -= l[i * n + c] * l[j * n + c];
            l[i * n + j] = s / l[j * n + j];
        }
    }
    return l;
}

std::vector<double> cholesky_with_jitter(std::vector<double> k, std::size_t n,
                                         double base_jitter) {
    double maxdiag = 0.0;
    for (std::size_t i = 0; i < n; ++i) maxdiag = std::max(maxdiag, k[i * n + i]);

    std::vector<double> jitters{base_jitter};
    for (double scale = 1e-10; scale <= 1e-6 * 1.0000001; scale *= 10.0)
        jitters.push_back(scale * maxdiag);

    std::string last_error;
    for (double j : jitters) {
        std::vector<double> kj = k;
        if (j > 0.0)
            for (std::size_t i = 0; i < n; ++i) kj[i * n + i] += j;
        try {
            return cholesky_lower(kj, n);
        } catch (const NumericalError& e) {
            last_error = e.what();
        }
    }
    throw NumericalError("factorization failed after jitter escalation: " + last_error);
}

namespace {

// Lower-triangular matrix-vector product: out = L z.
std::vector<double> lower_apply(const std::vector<double>& l, std::size_t n,
                                const std::vector<double>& z) {
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c <= i; ++c) s += l[i * n + c] * z[c];
        out[i] = s;
    }
    return out;
}

std::vector<double> draw_gaussians(CounterRng& rng, std::size_t n) {
    std::vector<double> z(n);
    for (double& v : z) v = rng.next_gaussian();
    return z;
}

/// k distinct values uniformly from {0, ..., n-1}, returned ascending.
std::vector<std::size_t> sample_indices(CounterRng& rng, std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t r =
            j + static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(n - j)));
        std::swap(idx[j], idx[r]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

void require_fully_observed(const FunctionalSample& sample, const char* op) {
    for (std::size_t i = 0; i < sample.size(); ++i)
        if (!sample.curve(i).complete())
            throw StructuralError(std::string(op) + ": input sample must be fully observed");
}

std::size_t corrupted_count(const MissingSpec& spec, std::size_t n) {
    const auto complete =
        static_cast<std::size_t>(std::llround(spec.c_percent / 100.0 * static_cast<double>(n)));
    return n - std::min(complete, n);
}

FunctionalSample mask_curves(const FunctionalSample& sample,
                             const std::vector<std::size_t>& corrupted,
                             const std::vector<ObservationMask>& masks) {
    std::vector<PartialCurve> curves;
    curves.reserve(sample.size());
    std::size_t next = 0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (next < corrupted.size() && corrupted[next] == i) {
            curves.emplace_back(sample.curve(i).values(), masks[next]);
            ++next;
        } else {
            curves.push_back(sample.curve(i));
        }
    }
    return FunctionalSample(sample.grid(), std::move(curves));
}

}  // namespace

std::vector<double> gp_mean_path(const Grid& grid, const GPParams& params, std::uint64_t seed,
                                 std::uint64_t stream) {
    params.validate();
    const std::size_t T = grid.size();
    if (params.sigma == 0.0) return std::vector<double>(T, 0.0);
    const std::vector<double> l =
        cholesky_with_jitter(periodic_cov(grid, params.sigma, params.ell), T, params.jitter);
    CounterRng rng(seed, stream);
    return lower_apply(l, T, draw_gaussians(rng, T));
}

GpSample gp_sample_with_mean(std::size_t n, const Grid& grid, const GPParams& params,
                             std::vector<double> mean_path, std::uint64_t seed,
                             std::uint64_t stream) {
    params.validate();
    if (n < 1) throw ConfigError("sample size must be >= 1");
    const std::size_t T = grid.size();
    if (mean_path.size() != T) throw StructuralError("mean path length differs from grid");

    std::vector<double> l_eps;
    if (params.alpha > 0.0)
        l_eps = cholesky_with_jitter(exp_cov(grid, params.alpha, params.beta), T, params.jitter);

    CounterRng rng(seed, stream);
    std::vector<PartialCurve> curves;
    curves.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> values = mean_path;
        if (params.alpha > 0.0) {
            const std::vector<double> eps = lower_apply(l_eps, T, draw_gaussians(rng, T));
            for (std::size_t t = 0; t < T; ++t) values[t] += eps[t];
        }
        curves.emplace_back(std::move(values), ObservationMask(T, true));
    }
    return GpSample{FunctionalSample(grid, std::move(curves)), std::move(mean_path)};
}

GpSample gp_sample(std::size_t n, const Grid& grid, const GPParams& params, std::uint64_t seed,
                   std::uint64_t stream) {
    params.validate();
    if (n < 1) throw ConfigError("sample size must be >= 1");
    const std::size_t T = grid.size();

    std::vector<double> l_mu;
    if (params.sigma > 0.0)
        l_mu = cholesky_with_jitter(periodic_cov(grid, params.sigma, params.ell), T, params.jitter);
    std::vector<double> l_eps;
    if (params.alpha > 0.0)
        l_eps = cholesky_with_jitter(exp_cov(grid, params.alpha, params.beta), T, params.jitter);

    CounterRng rng(seed, stream);
    std::vector<double> mu(T, 0.0);
    if (params.sigma > 0.0) mu = lower_apply(l_mu, T, draw_gaussians(rng, T));

    std::vector<PartialCurve> curves;
    curves.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> values = mu;
        if (params.alpha > 0.0) {
            const std::vector<double> eps = lower_apply(l_eps, T, draw_gaussians(rng, T));
            for (std::size_t t = 0; t < T; ++t) values[t] += eps[t];
        }
        curves.emplace_back(std::move(values), ObservationMask(T, true));
    }
    return GpSample{FunctionalSample(grid, std::move(curves)), std::move(mu)};
}

FunctionalSample apply_random_points(const FunctionalSample& sample, const MissingSpec& spec,
                                     std::uint64_t stream) {
    spec.validate();
    require_fully_observed(sample, "apply_random_points");
    const std::size_t T = sample.grid().size();
    const auto keep =
        static_cast<std::size_t>(std::llround(spec.p_percent / 100.0 * static_cast<double>(T)));
    if (keep < 2)
        throw ConfigError("random points: p=" + std::to_string(spec.p_percent) + "% of " +
                          std::to_string(T) + " grid points keeps fewer than 2");

    CounterRng rng(spec.seed, stream);
    const std::vector<std::size_t> corrupted =
        sample_indices(rng, sample.size(), corrupted_count(spec, sample.size()));
    std::vector<ObservationMask> masks;
    masks.reserve(corrupted.size());
    for (std::size_t c = 0; c < corrupted.size(); ++c) {
        ObservationMask mask(T);
        for (std::size_t t : sample_indices(rng, T, std::min(keep, T))) mask.set(t, true);
        masks.push_back(std::move(mask));
    }
    return mask_curves(sample, corrupted, masks);
}

FunctionalSample apply_random_intervals(const FunctionalSample& sample, const MissingSpec& spec,
                                        std::uint64_t stream) {
    spec.validate();
    require_fully_observed(sample, "apply_random_intervals");
    if (spec.p_percent == 100.0) return sample;

    const std::size_t T = sample.grid().size();
    const std::size_t spacings = T - 1;
    const auto n_pts = static_cast<std::size_t>(
        std::llround(spec.p_percent / 100.0 * static_cast<double>(spacings)));
    const std::size_t m = spec.m;
    if (n_pts < 2 * m)
        throw ConfigError("random intervals: point budget " + std::to_string(n_pts) +
                          " cannot fill " + std::to_string(m) + " intervals of >= 2 points");
    const std::size_t covered_spacings = n_pts - m;
    if (spacings < covered_spacings + 2 * (m - 1))
        throw ConfigError("random intervals: no room for " + std::to_string(m) +
                          " separated intervals at p=" + std::to_string(spec.p_percent));
    const std::size_t slack = spacings - covered_spacings - 2 * (m - 1);

    // Interval point counts, as equal as possible.
    std::vector<std::size_t> pts(m, n_pts / m);
    for (std::size_t j = 0; j < n_pts % m; ++j) ++pts[j];

    CounterRng rng(spec.seed, stream);
    const std::vector<std::size_t> corrupted =
        sample_indices(rng, sample.size(), corrupted_count(spec, sample.size()));
    std::vector<ObservationMask> masks;
    masks.reserve(corrupted.size());
    for (std::size_t c = 0; c < corrupted.size(); ++c) {
        // Uniform weak composition of the slack over m+1 gap slots via the
        // stars-and-bars bijection with an m-subset of {0, ..., slack+m-1}.
        std::vector<std::size_t> extra(m + 1, 0);
        const std::vector<std::size_t> bars = sample_indices(rng, slack + m, m);
        extra[0] = bars[0];
        for (std::size_t j = 1; j < m; ++j) extra[j] = bars[j] - bars[j - 1] - 1;
        extra[m] = (slack + m - 1) - bars[m - 1];

        ObservationMask mask(T);
        std::size_t pos = extra[0];
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t k = 0; k < pts[j]; ++k) mask.set(pos + k, true);
            if (j + 1 < m) pos += (pts[j] - 1) + extra[j + 1] + 2;
        }
        masks.push_back(std::move(mask));
    }
    return mask_curves(sample, corrupted, masks);
}

FunctionalSample apply_missing(const FunctionalSample& sample, const MissingSpec& spec,
                               std::uint64_t stream) {
    return spec.mechanism == MissingMechanism::RandomPoints
               ? apply_random_points(sample, spec, stream)
               : apply_random_intervals(sample, spec, stream);
}

}  // namespace fdrecon
