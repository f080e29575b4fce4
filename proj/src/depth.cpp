#include "fdrecon/depth.hpp"

#include <algorithm>
#include <cmath>

#include "fdrecon/errors.hpp"

namespace fdrecon {

std::string to_string(DepthKind kind) {
    return kind == DepthKind::FM ? "fm" : "mbd2";
}

DepthKind depth_kind_from_string(const std::string& name) {
    if (name == "fm" || name == "FM") return DepthKind::FM;
    if (name == "mbd2" || name == "MBD2") return DepthKind::MBD2;
    throw ConfigError("unknown depth kind: '" + name + "' (expected fm or mbd2)");
}

PointwiseCounts pointwise_counts(const FunctionalSample& sample, std::size_t t, double x) {
    const std::vector<double>& vals = sample.sorted_values_at(t);
    if (vals.empty())
        throw EmptySectionError("no curve observed at grid point " + std::to_string(t));
    PointwiseCounts c;
    auto lo = std::lower_bound(vals.begin(), vals.end(), x);
    auto hi = std::upper_bound(lo, vals.end(), x);
    c.below = static_cast<std::size_t>(lo - vals.begin());
    c.tied = static_cast<std::size_t>(hi - lo);
    c.total = vals.size();
    return c;
}

double univariate_depth(DepthKind kind, const PointwiseCounts& c) {
    if (kind == DepthKind::FM) {
        const double f = static_cast<double>(c.below + c.tied) / static_cast<double>(c.total);
        return 1.0 - std::abs(0.5 - f);
    }
    // MBD2: count pairs {j,k} with min(X_j, X_k) <= x <= max(X_j, X_k).
    if (c.total == 1) return 1.0;
    const double below = static_cast<double>(c.below);
    const double tied = static_cast<double>(c.tied);
    const double above = static_cast<double>(c.total - c.below - c.tied);
    const double in_band = below * above + tied * (below + above) + tied * (tied - 1.0) / 2.0;
    const double pairs = static_cast<double>(c.total) * (static_cast<double>(c.total) - 1.0) / 2.0;
    return in_band / pairs;
}

namespace detail {

double poifd_from_counts(const Grid& grid, const ObservationMask& obs,
                         const std::vector<PointwiseCounts>& counts, DepthKind kind) {
    double num = 0.0;
    double den = 0.0;
    bool any = false;
    for (std::size_t t = 0; t < grid.size(); ++t) {
        if (!obs[t]) continue;
        any = true;
        const double qw = static_cast<double>(counts[t].total) * grid.weight(t);
        num += univariate_depth(kind, counts[t]) * qw;
        den += qw;
    }
    if (!any) throw EmptyCurveError("focal curve has an empty observed set");
    return num / den;
}

}  // namespace detail

double poifd(const FunctionalSample& sample, std::size_t i, DepthKind kind) {
    const PartialCurve& focal = sample.curve(i);
    std::vector<PointwiseCounts> counts(sample.grid().size());
    for (std::size_t t = 0; t < sample.grid().size(); ++t)
        if (focal.observed(t)) counts[t] = pointwise_counts(sample, t, focal.value(t));
    return detail::poifd_from_counts(sample.grid(), focal.mask(), counts, kind);
}

double poifd_subset(const FunctionalSample& sample, std::size_t i,
                    const std::vector<std::size_t>& J, DepthKind kind) {
    if (J.empty()) return 0.0;
    for (std::size_t j : J)
        if (j == i) throw StructuralError("poifd_subset: focal index inside subset");
    const PartialCurve& focal = sample.curve(i);
    const std::size_t T = sample.grid().size();
    std::vector<PointwiseCounts> counts(T);
    for (std::size_t t = 0; t < T; ++t) {
        if (!focal.observed(t)) continue;
        const double x = focal.value(t);
        PointwiseCounts c;
        c.tied = 1;  // the focal curve itself
        c.total = 1;
        for (std::size_t j : J) {
            if (!sample.curve(j).observed(t)) continue;
            const double v = sample.curve(j).value(t);
            if (v < x)
                ++c.below;
            else if (v == x)
                ++c.tied;
            ++c.total;
        }
        counts[t] = c;
    }
    return detail::poifd_from_counts(sample.grid(), focal.mask(), counts, kind);
}

double ifd(const FunctionalSample& sample, std::size_t i, DepthKind kind) {
    for (std::size_t j = 0; j < sample.size(); ++j)
        if (!sample.curve(j).complete())
            throw StructuralError("ifd requires a fully observed sample");
    return poifd(sample, i, kind);
}

std::vector<double> poifd_all(const FunctionalSample& sample, DepthKind kind) {
    std::vector<double> out(sample.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(sample.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = poifd(sample, static_cast<std::size_t>(i), kind);
    return out;
}

}  // namespace fdrecon
