#include "fdrecon/sample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fdrecon/errors.hpp"

namespace fdrecon {

std::size_t ObservationMask::count() const {
    std::size_t c = 0;
    for (std::uint8_t b : bits_) c += b;
    return c;
}

bool ObservationMask::all() const {
    for (std::uint8_t b : bits_)
        if (!b) return false;
    return !bits_.empty();
}

double measure(const ObservationMask& mask, const Grid& grid) {
    if (mask.size() != grid.size())
        throw StructuralError("measure: mask/grid size mismatch");
    double m = 0.0;
    for (std::size_t k = 0; k < mask.size(); ++k)
        if (mask[k]) m += grid.weight(k);
    return m;
}

ObservationMask overlap_mask(const ObservationMask& a, const ObservationMask& b) {
    if (a.size() != b.size())
        throw StructuralError("overlap_mask: size mismatch");
    ObservationMask out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out.set(k, a[k] && b[k]);
    return out;
}

ObservationMask union_mask(const ObservationMask& a, const ObservationMask& b) {
    if (a.size() != b.size())
        throw StructuralError("union_mask: size mismatch");
    ObservationMask out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out.set(k, a[k] || b[k]);
    return out;
}

ObservationMask complement_mask(const ObservationMask& a) {
    ObservationMask out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out.set(k, !a[k]);
    return out;
}

PartialCurve::PartialCurve(std::vector<double> values) : values_(std::move(values)) {
    ObservationMask m(values_.size());
    for (std::size_t k = 0; k < values_.size(); ++k) m.set(k, std::isfinite(values_[k]));
    mask_ = std::move(m);
    for (std::size_t k = 0; k < values_.size(); ++k)
        if (!mask_[k]) values_[k] = std::numeric_limits<double>::quiet_NaN();
}

PartialCurve::PartialCurve(std::vector<double> values, ObservationMask mask)
    : values_(std::move(values)), mask_(std::move(mask)) {
    if (values_.size() != mask_.size())
        throw StructuralError("PartialCurve: value/mask size mismatch");
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (mask_[k]) {
            if (!std::isfinite(values_[k]))
                throw StructuralError("PartialCurve: non-finite value at observed point");
        } else {
            values_[k] = std::numeric_limits<double>::quiet_NaN();
        }
    }
}

FunctionalSample::FunctionalSample(Grid grid, std::vector<PartialCurve> curves)
    : grid_(std::move(grid)), curves_(std::move(curves)) {
    if (curves_.empty())
        throw StructuralError("FunctionalSample: needs at least one curve");
    const std::size_t T = grid_.size();
    for (const auto& c : curves_)
        if (c.size() != T)
            throw StructuralError("FunctionalSample: curve length differs from grid");
    avail_.resize(T);
    sorted_.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < curves_.size(); ++i) {
            if (curves_[i].observed(t)) {
                avail_[t].push_back(i);
                sorted_[t].push_back(curves_[i].value(t));
            }
        }
        std::sort(sorted_[t].begin(), sorted_[t].end());
    }
}

std::optional<double> mean_l2_distance(const FunctionalSample& sample, std::size_t i,
                                       std::size_t j, DistanceNorm norm) {
    const auto& a = sample.curve(i);
    const auto& b = sample.curve(j);
    const Grid& g = sample.grid();
    double integral = 0.0;
    double lambda = 0.0;
    std::size_t points = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (a.observed(k) && b.observed(k)) {
            const double d = a.value(k) - b.value(k);
            integral += d * d * g.weight(k);
            lambda += g.weight(k);
            ++points;
        }
    }
    if (points < 2) return std::nullopt;
    if (norm == DistanceNorm::Rms) return std::sqrt(integral / lambda);
    return std::sqrt(integral) / lambda;
}

SampleReport validate_sample(const FunctionalSample& sample) {
    SampleReport rep;
    const std::size_t T = sample.grid().size();
    rep.observed_measure.reserve(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const auto& c = sample.curve(i);
        rep.observed_measure.push_back(measure(c.mask(), sample.grid()));
        if (c.mask().none()) rep.empty_curves.push_back(i);
        if (c.complete()) rep.complete_curves.push_back(i);
    }
    rep.min_avail_count = sample.avail_count(0);
    for (std::size_t t = 0; t < T; ++t) {
        rep.min_avail_count = std::min(rep.min_avail_count, sample.avail_count(t));
        if (sample.avail_count(t) == 0) rep.coverage_gaps.push_back(t);
    }
    return rep;
}

}  // namespace fdrecon
