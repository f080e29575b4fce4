#include "fdrecon/grid.hpp"

#include <string>

#include "fdrecon/errors.hpp"

namespace fdrecon {

Grid Grid::uniform(std::size_t n_points) {
    if (n_points < 2) throw StructuralError("grid needs at least 2 points");
    std::vector<double> pts(n_points);
    const double h = 1.0 / static_cast<double>(n_points - 1);
    for (std::size_t k = 0; k < n_points; ++k) pts[k] = static_cast<double>(k) * h;
    pts.back() = 1.0;
    return from_points(std::move(pts));
}

Grid Grid::from_points(std::vector<double> points) {
    const std::size_t n = points.size();
    if (n < 2) throw StructuralError("grid needs at least 2 points");
    if (points.front() < 0.0 || points.back() > 1.0)
        throw StructuralError("grid points must lie in [0, 1]");
    for (std::size_t k = 1; k < n; ++k)
        if (!(points[k] > points[k - 1]))
            throw StructuralError("grid points must be strictly increasing (index " +
                                  std::to_string(k) + ")");

    std::vector<double> w(n);
    w.front() = 0.5 * (points[1] - points[0]);
    w.back() = 0.5 * (points[n - 1] - points[n - 2]);
    for (std::size_t k = 1; k + 1 < n; ++k) w[k] = 0.5 * (points[k + 1] - points[k - 1]);
    return Grid(std::move(points), std::move(w));
}

}  // namespace fdrecon
