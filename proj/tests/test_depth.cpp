#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fdrecon/depth.hpp"
#include "fdrecon/errors.hpp"
#include "fdrecon/rng.hpp"
#include "fdrecon/sample.hpp"
#include "reference/reference.hpp"

using namespace fdrecon;

namespace {

const double kNan = std::numeric_limits<double>::quiet_NaN();

/// Five fully observed constant curves at levels 1..5.
FunctionalSample constant_levels(std::size_t T = 9) {
    std::vector<PartialCurve> curves;
    for (int level = 1; level <= 5; ++level)
        curves.emplace_back(std::vector<double>(T, static_cast<double>(level)));
    return FunctionalSample(Grid::uniform(T), std::move(curves));
}

/// Random partial sample; every curve keeps at least two points and ties are
/// injected so the equal-value paths get exercised.
FunctionalSample random_instance(std::uint64_t seed, std::size_t n, std::size_t T) {
    CounterRng rng(seed);
    std::vector<std::vector<double>> vals(n, std::vector<double>(T, kNan));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < T; ++t) {
            if (rng.next_unit() < 0.3 && !(t == i % T || t == (i + 1) % T)) continue;
            if (i > 0 && rng.next_unit() < 0.2 && std::isfinite(vals[i - 1][t]))
                vals[i][t] = vals[i - 1][t];  // deliberate tie
            else
                vals[i][t] = rng.next_gaussian();
        }
    }
    std::vector<PartialCurve> curves;
    for (auto& v : vals) curves.emplace_back(std::move(v));
    return FunctionalSample(Grid::uniform(T), std::move(curves));
}

}  // namespace

TEST_CASE("pointwise counts split below, tied, above") {
    FunctionalSample s(Grid::uniform(2),
                       {PartialCurve({1.0, 2.0}), PartialCurve({2.0, 2.0}), PartialCurve({3.0, 2.0}),
                        PartialCurve({kNan, 5.0})});
    const PointwiseCounts a = pointwise_counts(s, 0, 2.0);
    CHECK(a.below == 1);
    CHECK(a.tied == 1);
    CHECK(a.total == 3);
    const PointwiseCounts b = pointwise_counts(s, 1, 2.0);
    CHECK(b.below == 0);
    CHECK(b.tied == 3);
    CHECK(b.total == 4);
    const PointwiseCounts c = pointwise_counts(s, 1, 4.0);
    CHECK(c.below == 3);
    CHECK(c.tied == 0);
    CHECK(c.total == 4);
}

TEST_CASE("empty grid point section is an error") {
    ObservationMask m(3);
    m.set(0, true);
    std::vector<double> v = {1.0, kNan, kNan};
    FunctionalSample s(Grid::uniform(3), {PartialCurve(v, m), PartialCurve(v, m)});
    CHECK_THROWS_AS(pointwise_counts(s, 1, 0.0), EmptySectionError);
}

TEST_CASE("univariate depth closed forms") {
    CHECK(univariate_depth(DepthKind::FM, {1, 1, 3}) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    CHECK(univariate_depth(DepthKind::FM, {0, 3, 3}) == 0.5);
    CHECK(univariate_depth(DepthKind::FM, {3, 0, 4}) == 0.75);
    // value 4 against {1,2,3,5}: pairs spanning it are (1,5),(2,5),(3,5)
    CHECK(univariate_depth(DepthKind::MBD2, {3, 0, 4}) == 0.5);
    // middle of five distinct values: 2*2 + 1*4 of 10 pairs
    CHECK(univariate_depth(DepthKind::MBD2, {2, 1, 5}) == doctest::Approx(0.8).epsilon(1e-15));
    // all equal: every pair is a degenerate band containing the value
    CHECK(univariate_depth(DepthKind::MBD2, {0, 3, 3}) == 1.0);
    CHECK(univariate_depth(DepthKind::MBD2, {0, 1, 1}) == 1.0);
}

TEST_CASE("univariate depth matches pair enumeration on random sections") {
    CounterRng rng(7);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t q = 1 + static_cast<std::size_t>(rng.next_below(10));
        std::vector<double> section(q);
        for (auto& v : section) v = std::floor(rng.next_gaussian() * 3.0);  // force ties
        const double x = std::floor(rng.next_gaussian() * 3.0);
        std::vector<double> sorted = section;
        std::sort(sorted.begin(), sorted.end());
        PointwiseCounts c;
        c.total = q;
        c.below = static_cast<std::size_t>(
            std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
        c.tied = static_cast<std::size_t>(
            std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin()) - c.below;
        for (DepthKind kind : {DepthKind::FM, DepthKind::MBD2})
            CHECK(univariate_depth(kind, c) ==
                  reference::univariate_depth_brute(kind, section, x));
    }
}

TEST_CASE("constant curves rank by centrality") {
    const FunctionalSample s = constant_levels();
    CHECK(poifd(s, 2, DepthKind::MBD2) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(poifd(s, 0, DepthKind::MBD2) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(poifd(s, 4, DepthKind::MBD2) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(poifd(s, 2, DepthKind::FM) == doctest::Approx(0.9).epsilon(1e-15));

    // depth order under the at-or-below convention for five levels
    const std::vector<double> fm_expected = {0.7, 0.9, 0.9, 0.7, 0.5};
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(poifd(s, i, DepthKind::FM) == doctest::Approx(fm_expected[i]).epsilon(1e-15));
}

TEST_CASE("restricting a constant focal curve leaves its depth unchanged") {
    const std::size_t T = 9;
    std::vector<PartialCurve> curves;
    for (int level = 1; level <= 5; ++level)
        curves.emplace_back(std::vector<double>(T, static_cast<double>(level)));
    ObservationMask half(T);
    for (std::size_t t = 0; t < T; t += 2) half.set(t, true);
    curves[2] = PartialCurve(std::vector<double>(T, 3.0), half);
    const FunctionalSample s(Grid::uniform(T), std::move(curves));
    CHECK(poifd(s, 2, DepthKind::MBD2) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(poifd(s, 2, DepthKind::FM) == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("five curves around zero have a unique band-depth maximizer") {
    const std::size_t T = 21;
    const Grid g = Grid::uniform(T);
    std::vector<PartialCurve> curves;
    for (int level = -2; level <= 2; ++level) {
        std::vector<double> v(T);
        for (std::size_t t = 0; t < T; ++t) v[t] = level * (1.0 + g.point(t) * g.point(t));
        curves.emplace_back(std::move(v));
    }
    const FunctionalSample s(g, std::move(curves));
    const std::vector<double> d = poifd_all(s, DepthKind::MBD2);
    for (std::size_t i = 0; i < 5; ++i)
        if (i != 2) CHECK(d[2] > d[i]);
    CHECK(d[0] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(d[1] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(d[2] == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("subset depth conventions") {
    const FunctionalSample s = constant_levels();
    CHECK(poifd_subset(s, 2, {}, DepthKind::MBD2) == 0.0);
    CHECK(poifd_subset(s, 2, {}, DepthKind::FM) == 0.0);
    CHECK_THROWS_AS(poifd_subset(s, 2, {2}, DepthKind::MBD2), StructuralError);

    // duplicate partner: the only band degenerates onto the focal curve
    FunctionalSample dup(Grid::uniform(4),
                         {PartialCurve(std::vector<double>(4, 1.5)),
                          PartialCurve(std::vector<double>(4, 1.5)),
                          PartialCurve(std::vector<double>(4, 9.0))});
    CHECK(poifd_subset(dup, 0, {1}, DepthKind::MBD2) == 1.0);
    CHECK(poifd_subset(dup, 0, {1}, DepthKind::FM) == 0.5);
}

TEST_CASE("subset depth equals the brute-force sub-sample depth") {
    CounterRng pick(21);
    for (std::uint64_t seed = 100; seed < 125; ++seed) {
        const FunctionalSample s = random_instance(seed, 7, 11);
        const std::size_t i = pick.next_below(7);
        std::vector<std::size_t> J;
        for (std::size_t j = 0; j < 7; ++j)
            if (j != i && pick.next_unit() < 0.6) J.push_back(j);
        if (J.empty()) J.push_back(i == 0 ? 1 : 0);
        for (DepthKind kind : {DepthKind::FM, DepthKind::MBD2})
            CHECK(poifd_subset(s, i, J, kind) == reference::poifd_subset_brute(s, i, J, kind));
    }
}

TEST_CASE("full-sample depth equals the brute-force oracle") {
    for (std::uint64_t seed = 200; seed < 225; ++seed) {
        const FunctionalSample s = random_instance(seed, 6, 13);
        for (DepthKind kind : {DepthKind::FM, DepthKind::MBD2}) {
            const std::vector<double> all = poifd_all(s, kind);
            for (std::size_t i = 0; i < s.size(); ++i) {
                const double d = poifd(s, i, kind);
                CHECK(d == reference::poifd_brute(s, i, kind));
                CHECK(d == all[i]);
                CHECK(d >= 0.0);
                CHECK(d <= 1.0);
            }
        }
    }
}

TEST_CASE("depth is invariant under a strictly increasing transform") {
    const FunctionalSample s = random_instance(42, 6, 13);
    std::vector<PartialCurve> cubed;
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::vector<double> v = s.curve(i).values();
        for (auto& x : v)
            if (std::isfinite(x)) x = x * x * x;
        cubed.emplace_back(std::move(v), s.curve(i).mask());
    }
    const FunctionalSample st(s.grid(), std::move(cubed));
    for (DepthKind kind : {DepthKind::FM, DepthKind::MBD2})
        for (std::size_t i = 0; i < s.size(); ++i)
            CHECK(poifd(s, i, kind) == poifd(st, i, kind));
}

TEST_CASE("fully observed depth agrees with the partial-data form") {
    CounterRng rng(5);
    const std::size_t n = 6, T = 9;
    std::vector<PartialCurve> curves;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v(T);
        for (auto& x : v) x = rng.next_gaussian();
        curves.emplace_back(std::move(v));
    }
    const FunctionalSample s(Grid::uniform(T), std::move(curves));
    for (DepthKind kind : {DepthKind::FM, DepthKind::MBD2})
        for (std::size_t i = 0; i < n; ++i) CHECK(ifd(s, i, kind) == poifd(s, i, kind));

    const FunctionalSample partial = random_instance(3, 4, 9);
    CHECK_THROWS_AS(ifd(partial, 0, DepthKind::FM), StructuralError);
}

TEST_CASE("empty focal curve is an error") {
    const std::size_t T = 5;
    std::vector<double> v(T, 1.0);
    FunctionalSample s(Grid::uniform(T),
                       {PartialCurve(v), PartialCurve(std::vector<double>(T, kNan))});
    CHECK_THROWS_AS(poifd(s, 1, DepthKind::FM), EmptyCurveError);
    CHECK_THROWS_AS(poifd_subset(s, 1, {0}, DepthKind::MBD2), EmptyCurveError);
}

TEST_CASE("depth kind names round trip") {
    CHECK(to_string(DepthKind::FM) == "fm");
    CHECK(to_string(DepthKind::MBD2) == "mbd2");
    CHECK(depth_kind_from_string("fm") == DepthKind::FM);
    CHECK(depth_kind_from_string("MBD2") == DepthKind::MBD2);
    CHECK_THROWS_AS(depth_kind_from_string("banana"), ConfigError);
}
