#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "fdrecon/grid.hpp"

namespace fdrecon {

/// Boolean observation set over a grid; true marks an observed point.
class ObservationMask {
public:
    ObservationMask() = default;
    explicit ObservationMask(std::size_t n, bool value = false)
        : bits_(n, value ? 1 : 0) {}
    explicit ObservationMask(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}

    std::size_t size() const { return bits_.size(); }
    bool operator[](std::size_t k) const { return bits_[k] != 0; }
    void set(std::size_t k, bool v) { bits_[k] = v ? 1 : 0; }

    std::size_t count() const;
    bool all() const;
    bool none() const { return count() == 0; }

    bool operator==(const ObservationMask& other) const = default;

private:
    std::vector<std::uint8_t> bits_;
};

double measure(const ObservationMask& mask, const Grid& grid);
ObservationMask overlap_mask(const ObservationMask& a, const ObservationMask& b);
ObservationMask union_mask(const ObservationMask& a, const ObservationMask& b);
ObservationMask complement_mask(const ObservationMask& a);

/// One curve on the shared grid: values where observed, NaN elsewhere.
class PartialCurve {
public:
    /// Mask inferred from the values: finite = observed.
    explicit PartialCurve(std::vector<double> values);
    /// Values are forced to NaN where the mask is false; a non-finite value
    /// at an observed point is an invariant violation.
    PartialCurve(std::vector<double> values, ObservationMask mask);

    std::size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    const ObservationMask& mask() const { return mask_; }
    double value(std::size_t k) const { return values_[k]; }
    bool observed(std::size_t k) const { return mask_[k]; }
    bool complete() const { return mask_.all(); }

private:
    std::vector<double> values_;
    ObservationMask mask_;
};

/// n partial curves on one grid with the pointwise availability index
/// J(t), the count q(t), and per-point sorted value sections. Immutable
/// after construction; safe to share across threads.
class FunctionalSample {
public:
    FunctionalSample(Grid grid, std::vector<PartialCurve> curves);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return curves_.size(); }
    const PartialCurve& curve(std::size_t i) const { return curves_[i]; }
    const std::vector<PartialCurve>& curves() const { return curves_; }

    /// Indices of curves observed at grid point t, ascending.
    const std::vector<std::size_t>& available_at(std::size_t t) const { return avail_[t]; }
    /// q(t) = |J(t)|.
    std::size_t avail_count(std::size_t t) const { return avail_[t].size(); }
    /// Values {X_j(t): j in J(t)} sorted ascending.
    const std::vector<double>& sorted_values_at(std::size_t t) const { return sorted_[t]; }

private:
    Grid grid_;
    std::vector<PartialCurve> curves_;
    std::vector<std::vector<std::size_t>> avail_;
    std::vector<std::vector<double>> sorted_;
};

enum class DistanceNorm {
    MeanL2,  // sqrt(integral) / measure, as defined
    Rms,     // sqrt(integral / measure), opt-in variant
};

/// Distance between the observed parts of curves i and j: the root of the
/// squared-difference integral over the overlap, divided by the overlap
/// measure. Undefined (nullopt) when the overlap holds fewer than 2 grid
/// points.
std::optional<double> mean_l2_distance(const FunctionalSample& sample, std::size_t i,
                                       std::size_t j,
                                       DistanceNorm norm = DistanceNorm::MeanL2);

struct SampleReport {
    std::vector<double> observed_measure;     // per curve
    std::size_t min_avail_count = 0;          // min over t of q(t)
    std::vector<std::size_t> complete_curves; // fully observed curve indices
    std::vector<std::size_t> empty_curves;    // curves with empty observed set
    std::vector<std::size_t> coverage_gaps;   // grid indices with q(t) = 0
    bool ok() const { return empty_curves.empty() && coverage_gaps.empty(); }
};

SampleReport validate_sample(const FunctionalSample& sample);

}  // namespace fdrecon
