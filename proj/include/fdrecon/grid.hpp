#pragma once

#include <cstddef>
#include <vector>

namespace fdrecon {

/// Shared discretization of the unit domain with trapezoid quadrature
/// weights. Points are strictly increasing inside [0, 1]; weights are
/// positive and sum to the spanned length.
class Grid {
public:
    static Grid uniform(std::size_t n_points);
    static Grid from_points(std::vector<double> points);

    std::size_t size() const { return points_.size(); }
    double point(std::size_t k) const { return points_[k]; }
    double weight(std::size_t k) const { return weights_[k]; }
    const std::vector<double>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }
    double span() const { return points_.back() - points_.front(); }

    bool operator==(const Grid& other) const = default;

private:
    Grid(std::vector<double> points, std::vector<double> weights)
        : points_(std::move(points)), weights_(std::move(weights)) {}

    std::vector<double> points_;
    std::vector<double> weights_;
};

}  // namespace fdrecon
