#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "fdrecon/errors.hpp"
#include "fdrecon/rng.hpp"
#include "fdrecon/sample.hpp"

using namespace fdrecon;

namespace {

const double kNan = std::numeric_limits<double>::quiet_NaN();

FunctionalSample random_sample(std::uint64_t seed, std::size_t n, std::size_t T) {
    CounterRng rng(seed);
    std::vector<PartialCurve> curves;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v(T);
        ObservationMask m(T);
        for (std::size_t t = 0; t < T; ++t) {
            v[t] = rng.next_gaussian();
            m.set(t, rng.next_unit() < 0.7);
        }
        curves.emplace_back(std::move(v), std::move(m));
    }
    return FunctionalSample(Grid::uniform(T), std::move(curves));
}

}  // namespace

TEST_CASE("uniform grid points and trapezoid weights") {
    const Grid g = Grid::uniform(5);
    REQUIRE(g.size() == 5);
    CHECK(g.point(0) == 0.0);
    CHECK(g.point(1) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g.point(4) == 1.0);
    CHECK(g.weight(0) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(g.weight(2) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g.weight(4) == doctest::Approx(0.125).epsilon(1e-15));
    double sum = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) sum += g.weight(k);
    CHECK(sum == doctest::Approx(g.span()).epsilon(1e-15));
}

TEST_CASE("grid construction rejects bad point sets") {
    CHECK_THROWS_AS(Grid::from_points({0.5}), StructuralError);
    CHECK_THROWS_AS(Grid::from_points({0.0, 1.2}), StructuralError);
    CHECK_THROWS_AS(Grid::from_points({-0.1, 0.5}), StructuralError);
    CHECK_THROWS_AS(Grid::from_points({0.0, 0.5, 0.5, 1.0}), StructuralError);
    CHECK_THROWS_AS(Grid::from_points({0.0, 0.6, 0.5}), StructuralError);
    const Grid g = Grid::from_points({0.1, 0.4, 0.9});
    CHECK(g.span() == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(g.weight(1) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("mask operations") {
    ObservationMask a(4), b(4);
    a.set(0, true);
    a.set(1, true);
    b.set(1, true);
    b.set(3, true);
    CHECK(a.count() == 2);
    CHECK_FALSE(a.all());
    CHECK_FALSE(a.none());
    const ObservationMask both = overlap_mask(a, b);
    CHECK(both.count() == 1);
    CHECK(both[1]);
    const ObservationMask either = union_mask(a, b);
    CHECK(either.count() == 3);
    const ObservationMask rest = complement_mask(a);
    CHECK(rest.count() == 2);
    CHECK(rest[2]);
    CHECK_THROWS_AS(overlap_mask(a, ObservationMask(5)), StructuralError);
}

TEST_CASE("measure sums quadrature weights over the mask") {
    const Grid g = Grid::uniform(5);
    ObservationMask full(5, true);
    CHECK(measure(full, g) == doctest::Approx(1.0).epsilon(1e-15));
    ObservationMask half(5);
    half.set(0, true);
    half.set(1, true);
    CHECK(measure(half, g) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK_THROWS_AS(measure(ObservationMask(4), g), StructuralError);
}

TEST_CASE("partial curve infers mask from NaN and enforces it") {
    PartialCurve c({1.0, kNan, 3.0});
    CHECK(c.observed(0));
    CHECK_FALSE(c.observed(1));
    CHECK(c.observed(2));
    CHECK_FALSE(c.complete());

    ObservationMask m(3);
    m.set(0, true);
    PartialCurve forced({1.0, 2.0, 3.0}, m);
    CHECK(std::isnan(forced.value(1)));
    CHECK(std::isnan(forced.value(2)));

    ObservationMask bad(2, true);
    CHECK_THROWS_AS(PartialCurve({1.0, kNan}, bad), StructuralError);
    CHECK_THROWS_AS(PartialCurve({1.0, 2.0, 3.0}, ObservationMask(2)), StructuralError);
}

TEST_CASE("sample availability index matches a brute-force recount") {
    const FunctionalSample s = random_sample(11, 7, 13);
    for (std::size_t t = 0; t < 13; ++t) {
        std::size_t count = 0;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s.curve(i).observed(t)) ++count;
        CHECK(s.avail_count(t) == count);
        CHECK(s.available_at(t).size() == count);
        const auto& sorted = s.sorted_values_at(t);
        REQUIRE(sorted.size() == count);
        for (std::size_t k = 1; k < sorted.size(); ++k) CHECK(sorted[k - 1] <= sorted[k]);
    }
    CHECK_THROWS_AS(FunctionalSample(Grid::uniform(4), {PartialCurve({1.0, 2.0, 3.0})}),
                    StructuralError);
}

TEST_CASE("distance of identical and shifted curves") {
    const Grid g = Grid::uniform(11);
    std::vector<double> zero(11, 0.0), shifted(11, 2.5);
    FunctionalSample s(g, {PartialCurve(zero), PartialCurve(shifted)});
    CHECK(*mean_l2_distance(s, 0, 0) == 0.0);
    // full overlap, measure 1: sqrt(c^2 * 1) / 1 = |c|
    CHECK(*mean_l2_distance(s, 0, 1) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(*mean_l2_distance(s, 1, 0) == *mean_l2_distance(s, 0, 1));
}

TEST_CASE("distance detects translation on a partial overlap") {
    const std::size_t T = 11;
    const Grid g = Grid::uniform(T);
    ObservationMask left(T), right(T);
    for (std::size_t t = 0; t <= 5; ++t) left.set(t, true);
    for (std::size_t t = 3; t < T; ++t) right.set(t, true);
    std::vector<double> zero(T, 0.0), shifted(T, 3.0);
    FunctionalSample s(g, {PartialCurve(zero, left), PartialCurve(shifted, right)});
    // overlap = {3,4,5}; lambda = 3h = 0.3
    const double lambda = 0.3;
    CHECK(*mean_l2_distance(s, 0, 1) == doctest::Approx(3.0 / std::sqrt(lambda)).epsilon(1e-12));
    CHECK(*mean_l2_distance(s, 0, 1, DistanceNorm::Rms) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("distance undefined below two overlap points") {
    const std::size_t T = 6;
    ObservationMask a(T), b(T);
    a.set(0, true);
    a.set(1, true);
    a.set(2, true);
    b.set(2, true);
    b.set(4, true);
    b.set(5, true);
    std::vector<double> v(T, 1.0);
    FunctionalSample s(Grid::uniform(T), {PartialCurve(v, a), PartialCurve(v, b)});
    CHECK_FALSE(mean_l2_distance(s, 0, 1).has_value());
}

TEST_CASE("overlap measure bounded by each mask measure") {
    const FunctionalSample s = random_sample(3, 6, 17);
    const Grid& g = s.grid();
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = 0; j < s.size(); ++j) {
            const double mo = measure(overlap_mask(s.curve(i).mask(), s.curve(j).mask()), g);
            CHECK(mo <= measure(s.curve(i).mask(), g) + 1e-15);
            CHECK(mo <= measure(s.curve(j).mask(), g) + 1e-15);
        }
    }
}

TEST_CASE("sample validation report") {
    const std::size_t T = 5;
    ObservationMask none(T), partial(T);
    partial.set(0, true);
    partial.set(1, true);
    std::vector<double> v(T, 1.0);
    FunctionalSample s(Grid::uniform(T),
                       {PartialCurve(v, ObservationMask(T, true)), PartialCurve(v, partial),
                        PartialCurve(v, none)});
    const SampleReport rep = validate_sample(s);
    CHECK_FALSE(rep.ok());
    REQUIRE(rep.empty_curves.size() == 1);
    CHECK(rep.empty_curves[0] == 2);
    REQUIRE(rep.complete_curves.size() == 1);
    CHECK(rep.complete_curves[0] == 0);
    // points 2,3,4 are observed only by curve 0 -> no gap; all covered
    CHECK(rep.coverage_gaps.empty());
    CHECK(rep.min_avail_count == 1);
    CHECK(rep.observed_measure[0] == doctest::Approx(1.0).epsilon(1e-15));
}
