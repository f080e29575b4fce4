#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fdrecon/sample.hpp"

namespace fdrecon {

enum class DepthKind {
    FM,    // Fraiman-Muniz: 1 - |1/2 - F(x)|
    MBD2,  // modified band depth, bands formed by curve pairs
};

std::string to_string(DepthKind kind);
DepthKind depth_kind_from_string(const std::string& name);

struct PointwiseCounts {
    std::size_t below = 0;  // values strictly less than x
    std::size_t tied = 0;   // values equal to x
    std::size_t total = 0;  // q(t)
};

/// Counts of {X_j(t): j observed at t} relative to x. q(t) = 0 is an error.
PointwiseCounts pointwise_counts(const FunctionalSample& sample, std::size_t t, double x);

/// Depth of a value within one grid-point section.
/// FM: 1 - |1/2 - F(x)| with F(x) = (below + tied) / total.
/// MBD2: share of curve pairs whose band [min,max] contains x; a section of
/// size 1 has depth 1 by convention.
double univariate_depth(DepthKind kind, const PointwiseCounts& c);

namespace detail {

/// q-weighted quadrature ratio of univariate depths over the observed set.
/// counts[t] is consulted only where obs is true. Every POIFD path routes
/// through this accumulator so direct and incremental computations agree
/// bit-for-bit.
double poifd_from_counts(const Grid& grid, const ObservationMask& obs,
                         const std::vector<PointwiseCounts>& counts, DepthKind kind);

}  // namespace detail

/// Partially observed integrated functional depth of curve i within the
/// whole sample, integrating over O_i with q(t) weights.
double poifd(const FunctionalSample& sample, std::size_t i, DepthKind kind);

/// POIFD of curve i within the sub-sample J ∪ {i}; 0 when J is empty.
/// Requires i ∉ J.
double poifd_subset(const FunctionalSample& sample, std::size_t i,
                    const std::vector<std::size_t>& J, DepthKind kind);

/// Integrated functional depth for fully observed samples (unit domain
/// weight). Equals poifd on the same input; kept as a cross-check.
double ifd(const FunctionalSample& sample, std::size_t i, DepthKind kind);

/// POIFD of every curve; parallel over curves.
std::vector<double> poifd_all(const FunctionalSample& sample, DepthKind kind);

}  // namespace fdrecon
