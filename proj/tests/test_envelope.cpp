#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fdrecon/depth.hpp"
#include "fdrecon/envelope.hpp"
#include "fdrecon/errors.hpp"
#include "fdrecon/rng.hpp"
#include "fdrecon/sample.hpp"

using namespace fdrecon;

namespace {

const double kNan = std::numeric_limits<double>::quiet_NaN();

FunctionalSample constants(std::vector<double> levels, std::size_t T = 9) {
    std::vector<PartialCurve> curves;
    for (double lv : levels) curves.emplace_back(std::vector<double>(T, lv));
    return FunctionalSample(Grid::uniform(T), std::move(curves));
}

FunctionalSample random_instance(std::uint64_t seed, std::size_t n, std::size_t T) {
    CounterRng rng(seed);
    std::vector<std::vector<double>> vals(n, std::vector<double>(T, kNan));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < T; ++t) {
            if (rng.next_unit() < 0.3 && !(t == i % T || t == (i + 3) % T)) continue;
            if (i > 0 && rng.next_unit() < 0.15 && std::isfinite(vals[i - 1][t]))
                vals[i][t] = vals[i - 1][t];
            else
                vals[i][t] = rng.next_gaussian();
        }
    }
    std::vector<PartialCurve> curves;
    for (auto& v : vals) curves.emplace_back(std::move(v));
    return FunctionalSample(Grid::uniform(T), std::move(curves));
}

void check_trace_contract(const FunctionalSample& s, const Envelope& env, DepthKind kind) {
    // members are exactly the accepted batches, in sweep order
    std::vector<std::size_t> replay;
    double depth_state = 0.0;
    for (const auto& iter : env.trace) {
        REQUIRE(!iter.batch.empty());
        CHECK(iter.depth_before == depth_state);
        CHECK(iter.batch.front().reason == AdmitReason::Seed);
        CHECK(iter.batch.front().measure_before == 0.0);
        for (std::size_t b = 1; b < iter.batch.size(); ++b) {
            const BatchMember& m = iter.batch[b];
            if (m.reason == AdmitReason::Envelopment)
                CHECK(m.measure_after > m.measure_before);
            else if (m.reason == AdmitReason::Coverage)
                CHECK(m.new_coverage_points >= 1);
            else
                FAIL("seed reason inside a batch tail");
        }
        CHECK(iter.accepted == (iter.depth_after >= iter.depth_before));
        if (iter.accepted) {
            depth_state = iter.depth_after;
            for (const auto& m : iter.batch) replay.push_back(m.index);
        }
    }
    CHECK(env.member_indices() == replay);
    for (std::size_t idx : replay) CHECK(idx != env.focal);

    if (!env.empty()) {
        const std::vector<std::size_t> J = env.member_indices();
        CHECK(env.final_depth == poifd_subset(s, env.focal, J, kind));
        CHECK(env.enveloped_measure == enveloped_measure(s, env.focal, J));
        CHECK(env.final_depth == depth_state);
    } else {
        CHECK(env.final_depth == 0.0);
        CHECK(env.enveloped_measure == 0.0);
    }
}

}  // namespace

TEST_CASE("bracketed measure of hand masks") {
    const std::size_t T = 5;
    const Grid g = Grid::uniform(T);
    std::vector<double> focal = {0.0, 0.0, 0.0, 0.0, 0.0};
    std::vector<double> below(T, -1.0), above(T, 1.0), off(T, 2.0);
    FunctionalSample s(g, {PartialCurve(focal), PartialCurve(below), PartialCurve(above),
                           PartialCurve(off)});
    CHECK(enveloped_measure(s, 0, {1, 2}) == measure(s.curve(0).mask(), g));
    CHECK(enveloped_measure(s, 0, {1}) == 0.0);        // one-sided band misses 0
    CHECK(enveloped_measure(s, 0, {3}) == 0.0);        // band [2,2] misses 0
    CHECK(enveloped_measure(s, 0, {2, 3}) == 0.0);     // band [1,2] misses 0
    CHECK(enveloped_measure(s, 0, {1, 3}) == measure(s.curve(0).mask(), g));
    CHECK_THROWS_AS(enveloped_measure(s, 0, {}), StructuralError);
}

TEST_CASE("bracketed measure skips points the set does not observe") {
    const std::size_t T = 6;
    const Grid g = Grid::uniform(T);
    ObservationMask right(T);
    for (std::size_t t = 3; t < T; ++t) right.set(t, true);
    std::vector<double> lo(T, -1.0), hi(T, 1.0);
    FunctionalSample s(g, {PartialCurve(std::vector<double>(T, 0.0)),
                           PartialCurve(lo, right), PartialCurve(hi, right)});
    CHECK(enveloped_measure(s, 0, {1, 2}) == doctest::Approx(measure(right, g)).epsilon(1e-15));
}

TEST_CASE("candidates sort by distance then index") {
    // levels: focal 0, then -1, +1, +10 -> distances 1, 1, 10
    const FunctionalSample s = constants({0.0, -1.0, 1.0, 10.0});
    CHECK(candidate_order(s, 0) == std::vector<std::size_t>{1, 2, 3});
    // focal last: same distances, order keeps ascending index on the tie
    const FunctionalSample r = constants({-1.0, 1.0, 10.0, 0.0});
    CHECK(candidate_order(r, 3) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("undefined-distance candidates are dropped or swept last") {
    const std::size_t T = 10;
    ObservationMask left(T), right(T);
    for (std::size_t t = 0; t < 5; ++t) left.set(t, true);
    for (std::size_t t = 5; t < T; ++t) right.set(t, true);
    std::vector<double> zeros(T, 0.0), halves(T, 0.5), ones(T, 1.0);
    FunctionalSample s(Grid::uniform(T),
                       {PartialCurve(zeros, left), PartialCurve(halves, left),
                        PartialCurve(ones, right)});
    CHECK(candidate_order(s, 0) == std::vector<std::size_t>{1});
    EnvelopeConfig fb;
    fb.coverage_fallback = true;
    CHECK(candidate_order(s, 0, fb) == std::vector<std::size_t>{1, 2});
}

TEST_CASE("no usable candidate raises") {
    const std::size_t T = 8;
    ObservationMask left(T), right(T);
    for (std::size_t t = 0; t < 4; ++t) left.set(t, true);
    for (std::size_t t = 4; t < T; ++t) right.set(t, true);
    std::vector<double> v(T, 1.0);
    FunctionalSample split(Grid::uniform(T), {PartialCurve(v, left), PartialCurve(v, right)});
    CHECK_THROWS_AS(candidate_order(split, 0), NoCandidatesError);
    CHECK_THROWS_AS(build_envelope(split, 0, DepthKind::MBD2), NoCandidatesError);
    EnvelopeConfig fb;
    fb.coverage_fallback = true;
    // the sentinel needs at least one finite distance to scale from
    CHECK_THROWS_AS(candidate_order(split, 0, fb), NoCandidatesError);

    FunctionalSample lonely(Grid::uniform(T), {PartialCurve(v)});
    CHECK_THROWS_AS(build_envelope(lonely, 0, DepthKind::FM), NoCandidatesError);
}

TEST_CASE("duplicate is kept and the far curve is left as the lone candidate") {
    const FunctionalSample s = constants({1.0, 1.0, 100.0});
    const Envelope env = build_envelope(s, 0, DepthKind::MBD2);
    CHECK(env.member_indices() == std::vector<std::size_t>{1});
    CHECK(env.final_depth == 1.0);
    CHECK(env.enveloped_measure == measure(s.curve(0).mask(), s.grid()));
    REQUIRE(env.trace.size() == 1);
    CHECK(env.trace[0].accepted);
    CHECK(env.trace[0].batch.size() == 1);
    check_trace_contract(s, env, DepthKind::MBD2);
}

TEST_CASE("flanking pair is admitted and the outlier is never reached") {
    const FunctionalSample s = constants({0.0, -1.0, 1.0, 10.0});
    const Envelope env = build_envelope(s, 0, DepthKind::MBD2);
    REQUIRE(env.members.size() == 2);
    CHECK(env.members[0].index == 1);
    CHECK(env.members[0].reason == AdmitReason::Seed);
    CHECK(env.members[0].distance == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(env.members[1].index == 2);
    CHECK(env.members[1].reason == AdmitReason::Envelopment);
    CHECK(env.final_depth == 1.0);
    REQUIRE(env.trace.size() == 1);
    REQUIRE(env.trace[0].batch.size() == 2);
    CHECK(env.trace[0].batch[1].measure_before == 0.0);
    CHECK(env.trace[0].batch[1].measure_after ==
          doctest::Approx(measure(s.curve(0).mask(), s.grid())).epsilon(1e-15));
    check_trace_contract(s, env, DepthKind::MBD2);
}

TEST_CASE("depth guard rejects a batch that dilutes the envelope") {
    const FunctionalSample s = constants({0.0, -1.0, 1.0, 10.0, 11.0});
    const Envelope env = build_envelope(s, 0, DepthKind::MBD2);
    CHECK(env.member_indices() == std::vector<std::size_t>{1, 2});
    CHECK(env.final_depth == 1.0);
    REQUIRE(env.trace.size() == 2);
    CHECK(env.trace[0].accepted);
    CHECK_FALSE(env.trace[1].accepted);
    REQUIRE(env.trace[1].batch.size() == 1);
    CHECK(env.trace[1].batch[0].index == 3);
    // {-1, 0, 1, 10}: 5 of 6 bands hold the focal curve
    CHECK(env.trace[1].depth_after == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    check_trace_contract(s, env, DepthKind::MBD2);
}

TEST_CASE("identical curves: batches shrink one by one, last is left over") {
    const FunctionalSample s = constants({2.0, 2.0, 2.0, 2.0, 2.0});
    for (DepthKind kind : {DepthKind::MBD2, DepthKind::FM}) {
        const Envelope env = build_envelope(s, 0, kind);
        CHECK(env.member_indices() == std::vector<std::size_t>{1, 2, 3});
        CHECK(env.trace.size() == 3);
        for (const auto& iter : env.trace) {
            CHECK(iter.accepted);
            CHECK(iter.batch.size() == 1);
        }
        CHECK(env.final_depth == (kind == DepthKind::MBD2 ? 1.0 : 0.5));
        check_trace_contract(s, env, kind);
    }
}

TEST_CASE("coverage admission under the fallback ordering") {
    const std::size_t T = 10;
    const Grid g = Grid::uniform(T);
    ObservationMask left(T), right(T);
    for (std::size_t t = 0; t < 5; ++t) left.set(t, true);
    for (std::size_t t = 5; t < T; ++t) right.set(t, true);
    std::vector<double> zeros(T, 0.0), shifted(T, 0.5), far_side(T, 7.0);
    FunctionalSample s(g, {PartialCurve(zeros, left), PartialCurve(shifted, left),
                           PartialCurve(far_side, right)});
    EnvelopeConfig fb;
    fb.coverage_fallback = true;
    const Envelope env = build_envelope(s, 0, DepthKind::MBD2, fb);
    REQUIRE(env.members.size() == 2);
    CHECK(env.members[0].index == 1);
    CHECK(env.members[0].reason == AdmitReason::Seed);
    CHECK(env.members[0].distance_defined);
    CHECK(env.members[1].index == 2);
    CHECK(env.members[1].reason == AdmitReason::Coverage);
    CHECK_FALSE(env.members[1].distance_defined);
    CHECK(env.members[1].distance == 2.0 * env.members[0].distance);
    REQUIRE(env.trace.size() == 1);
    CHECK(env.trace[0].batch[1].new_coverage_points == 5);
    check_trace_contract(s, env, DepthKind::MBD2);

    // without the fallback the off-domain curve is not even a candidate
    const Envelope plain = build_envelope(s, 0, DepthKind::MBD2);
    CHECK(plain.empty());  // single candidate is the lone leftover
}

TEST_CASE("two-curve sample yields a valid empty envelope") {
    const FunctionalSample s = constants({0.0, 1.0});
    const Envelope env = build_envelope(s, 0, DepthKind::MBD2);
    CHECK(env.empty());
    CHECK(env.final_depth == 0.0);
    CHECK(env.enveloped_measure == 0.0);
    CHECK(env.trace.empty());
}

TEST_CASE("random instances satisfy the trace contract and are deterministic") {
    for (std::uint64_t seed = 300; seed < 312; ++seed) {
        const FunctionalSample s = random_instance(seed, 8, 13);
        for (DepthKind kind : {DepthKind::FM, DepthKind::MBD2}) {
            for (std::size_t i : {std::size_t{0}, std::size_t{3}, std::size_t{7}}) {
                Envelope env;
                try {
                    env = build_envelope(s, i, kind);
                } catch (const NoCandidatesError&) {
                    continue;
                }
                check_trace_contract(s, env, kind);
                CHECK(env.focal == i);
                CHECK(env.trace.size() <= s.size() - 1);
                std::vector<std::size_t> J = env.member_indices();
                std::sort(J.begin(), J.end());
                CHECK(std::adjacent_find(J.begin(), J.end()) == J.end());

                const Envelope again = build_envelope(s, i, kind);
                REQUIRE(again.members.size() == env.members.size());
                for (std::size_t k = 0; k < env.members.size(); ++k) {
                    CHECK(again.members[k].index == env.members[k].index);
                    CHECK(again.members[k].distance == env.members[k].distance);
                }
                CHECK(again.final_depth == env.final_depth);
                CHECK(again.enveloped_measure == env.enveloped_measure);
            }
        }
    }
}
