#include "fdrecon/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fdrecon/errors.hpp"

namespace fdrecon {

const char* to_string(AdmitReason reason) {
    switch (reason) {
        case AdmitReason::Seed: return "seed";
        case AdmitReason::Envelopment: return "envelopment";
        case AdmitReason::Coverage: return "coverage";
    }
    return "?";
}

std::vector<std::size_t> Envelope::member_indices() const {
    std::vector<std::size_t> out;
    out.reserve(members.size());
    for (const auto& m : members) out.push_back(m.index);
    return out;
}

double enveloped_measure(const FunctionalSample& sample, std::size_t i,
                         const std::vector<std::size_t>& N) {
    if (N.empty()) throw StructuralError("enveloped_measure: empty curve set");
    const PartialCurve& focal = sample.curve(i);
    const Grid& g = sample.grid();
    double m = 0.0;
    for (std::size_t t = 0; t < g.size(); ++t) {
        if (!focal.observed(t)) continue;
        bool any = false;
        double mn = 0.0, mx = 0.0;
        for (std::size_t j : N) {
            if (!sample.curve(j).observed(t)) continue;
            const double v = sample.curve(j).value(t);
            if (!any) {
                any = true;
                mn = mx = v;
            } else {
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
        }
        const double x = focal.value(t);
        if (any && mn <= x && x <= mx) m += g.weight(t);
    }
    return m;
}

namespace {

struct Candidate {
    std::size_t index;
    double distance;  // sentinel when not defined
    bool defined;
};

std::vector<Candidate> ordered_candidates(const FunctionalSample& sample, std::size_t i,
                                          const EnvelopeConfig& config) {
    std::vector<Candidate> finite;
    std::vector<Candidate> undefined;
    for (std::size_t j = 0; j < sample.size(); ++j) {
        if (j == i) continue;
        if (auto d = mean_l2_distance(sample, i, j, config.norm))
            finite.push_back({j, *d, true});
        else
            undefined.push_back({j, 0.0, false});
    }
    if (finite.empty())
        throw NoCandidatesError("curve " + std::to_string(i) +
                                ": no candidate with a defined distance");
    std::sort(finite.begin(), finite.end(), [](const Candidate& a, const Candidate& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.index < b.index;
    });
    if (config.coverage_fallback && !undefined.empty()) {
        const double sentinel = 2.0 * finite.back().distance;
        for (auto& c : undefined) c.distance = sentinel;
        finite.insert(finite.end(), undefined.begin(), undefined.end());
    }
    return finite;
}

}  // namespace

std::vector<std::size_t> candidate_order(const FunctionalSample& sample, std::size_t i,
                                         const EnvelopeConfig& config) {
    std::vector<std::size_t> out;
    for (const Candidate& c : ordered_candidates(sample, i, config)) out.push_back(c.index);
    return out;
}

Envelope build_envelope(const FunctionalSample& sample, std::size_t i, DepthKind kind,
                        const EnvelopeConfig& config) {
    const std::vector<Candidate> cands = ordered_candidates(sample, i, config);
    const Grid& g = sample.grid();
    const PartialCurve& focal = sample.curve(i);
    const std::size_t T = g.size();

    // Dense views restricted to the focal observed points, for the sweeps.
    std::vector<std::size_t> obs_idx;
    for (std::size_t t = 0; t < T; ++t)
        if (focal.observed(t)) obs_idx.push_back(t);
    const std::size_t K = obs_idx.size();
    std::vector<double> x(K), w(K);
    for (std::size_t k = 0; k < K; ++k) {
        x[k] = focal.value(obs_idx[k]);
        w[k] = g.weight(obs_idx[k]);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> vals(cands.size(), std::vector<double>(K, nan));
    for (std::size_t r = 0; r < cands.size(); ++r) {
        const PartialCurve& c = sample.curve(cands[r].index);
        for (std::size_t k = 0; k < K; ++k)
            if (c.observed(obs_idx[k])) vals[r][k] = c.value(obs_idx[k]);
    }

    Envelope env;
    env.focal = i;

    // Accepted-state: pointwise counts of the sub-sample {members} ∪ {focal},
    // grown incrementally and fed to the same accumulator as poifd_subset.
    std::vector<PointwiseCounts> counts(T);
    for (std::size_t t : obs_idx) counts[t] = PointwiseCounts{0, 1, 1};
    double depth_accepted = 0.0;
    ObservationMask covered(T);

    std::vector<std::size_t> remaining(cands.size());
    for (std::size_t r = 0; r < cands.size(); ++r) remaining[r] = r;

    // Batch working state.
    std::vector<std::uint8_t> any_n(K);
    std::vector<double> min_n(K), max_n(K);

    const auto batch_measure_with = [&](const std::vector<double>& v) {
        double m = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            bool a = any_n[k] != 0;
            double mn = min_n[k], mx = max_n[k];
            if (!std::isnan(v[k])) {
                if (!a) {
                    a = true;
                    mn = mx = v[k];
                } else {
                    mn = std::min(mn, v[k]);
                    mx = std::max(mx, v[k]);
                }
            }
            if (a && mn <= x[k] && x[k] <= mx) m += w[k];
        }
        return m;
    };

    while (remaining.size() >= 2) {
        EnvelopeIteration iter;
        iter.depth_before = depth_accepted;

        // Seed the batch with the nearest remaining candidate.
        std::fill(any_n.begin(), any_n.end(), 0);
        const std::size_t seed_row = remaining[0];
        std::vector<std::size_t> batch_rows{seed_row};
        {
            const std::vector<double>& v = vals[seed_row];
            for (std::size_t k = 0; k < K; ++k) {
                if (!std::isnan(v[k])) {
                    any_n[k] = 1;
                    min_n[k] = max_n[k] = v[k];
                }
            }
        }
        double m_batch = 0.0;
        for (std::size_t k = 0; k < K; ++k)
            if (any_n[k] && min_n[k] <= x[k] && x[k] <= max_n[k]) m_batch += w[k];

        ObservationMask covered_sweep = covered;
        const auto coverage_gain = [&](std::size_t row) {
            const ObservationMask& mask = sample.curve(cands[row].index).mask();
            std::size_t pts = 0;
            for (std::size_t t = 0; t < T; ++t)
                if (mask[t] && !covered_sweep[t]) ++pts;
            return pts;
        };

        BatchMember seed_rec;
        seed_rec.index = cands[seed_row].index;
        seed_rec.distance = cands[seed_row].distance;
        seed_rec.distance_defined = cands[seed_row].defined;
        seed_rec.reason = AdmitReason::Seed;
        seed_rec.measure_before = 0.0;
        seed_rec.measure_after = m_batch;
        seed_rec.new_coverage_points = coverage_gain(seed_row);
        iter.batch.push_back(seed_rec);
        covered_sweep = union_mask(covered_sweep, sample.curve(cands[seed_row].index).mask());

        for (std::size_t pos = 1; pos < remaining.size(); ++pos) {
            const std::size_t row = remaining[pos];
            const std::vector<double>& v = vals[row];
            const double m_with = batch_measure_with(v);
            const bool envelops_more = m_with > m_batch;
            const std::size_t new_pts = envelops_more ? 0 : coverage_gain(row);
            if (!envelops_more && new_pts == 0) continue;

            BatchMember rec;
            rec.index = cands[row].index;
            rec.distance = cands[row].distance;
            rec.distance_defined = cands[row].defined;
            rec.reason = envelops_more ? AdmitReason::Envelopment : AdmitReason::Coverage;
            rec.measure_before = m_batch;
            rec.measure_after = m_with;
            rec.new_coverage_points = envelops_more ? coverage_gain(row) : new_pts;
            iter.batch.push_back(rec);

            for (std::size_t k = 0; k < K; ++k) {
                if (std::isnan(v[k])) continue;
                if (!any_n[k]) {
                    any_n[k] = 1;
                    min_n[k] = max_n[k] = v[k];
                } else {
                    min_n[k] = std::min(min_n[k], v[k]);
                    max_n[k] = std::max(max_n[k], v[k]);
                }
            }
            m_batch = m_with;
            covered_sweep = union_mask(covered_sweep, sample.curve(cands[row].index).mask());
            batch_rows.push_back(row);
        }

        // Depth guard: keep the batch only if the envelope depth does not drop.
        std::vector<PointwiseCounts> counts_batch = counts;
        for (std::size_t row : batch_rows) {
            const std::vector<double>& v = vals[row];
            for (std::size_t k = 0; k < K; ++k) {
                if (std::isnan(v[k])) continue;
                PointwiseCounts& c = counts_batch[obs_idx[k]];
                if (v[k] < x[k])
                    ++c.below;
                else if (v[k] == x[k])
                    ++c.tied;
                ++c.total;
            }
        }
        iter.depth_after = detail::poifd_from_counts(g, focal.mask(), counts_batch, kind);
        iter.accepted = iter.depth_after >= iter.depth_before;

        if (iter.accepted) {
            counts = std::move(counts_batch);
            depth_accepted = iter.depth_after;
            covered = covered_sweep;
            for (std::size_t b = 0; b < batch_rows.size(); ++b) {
                EnvelopeMember m;
                m.index = cands[batch_rows[b]].index;
                m.distance = cands[batch_rows[b]].distance;
                m.distance_defined = cands[batch_rows[b]].defined;
                m.reason = iter.batch[b].reason;
                env.members.push_back(m);
            }
        }
        env.trace.push_back(std::move(iter));

        std::vector<std::size_t> next;
        next.reserve(remaining.size() - batch_rows.size());
        for (std::size_t row : remaining)
            if (std::find(batch_rows.begin(), batch_rows.end(), row) == batch_rows.end())
                next.push_back(row);
        remaining = std::move(next);
    }

    if (!env.members.empty()) {
        env.final_depth = depth_accepted;
        env.enveloped_measure = enveloped_measure(sample, i, env.member_indices());
    }
    return env;
}

}  // namespace fdrecon
