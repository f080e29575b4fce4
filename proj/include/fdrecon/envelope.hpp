#pragma once

#include <cstddef>
#include <vector>

#include "fdrecon/depth.hpp"
#include "fdrecon/sample.hpp"

namespace fdrecon {

struct EnvelopeConfig {
    // Candidates whose distance to the focal curve is undefined (overlap of
    // fewer than 2 grid points) are dropped by default. When enabled they are
    // swept last with a sentinel distance of twice the largest finite
    // candidate distance, so the domain-coverage condition can still admit
    // them.
    bool coverage_fallback = false;
    DistanceNorm norm = DistanceNorm::MeanL2;
};

enum class AdmitReason { Seed, Envelopment, Coverage };

const char* to_string(AdmitReason reason);

struct EnvelopeMember {
    std::size_t index = 0;
    double distance = 0.0;        // value used for ordering and weights
    bool distance_defined = true; // false when distance is the fallback sentinel
    AdmitReason reason = AdmitReason::Seed;
};

/// One admission during a batch sweep, with the quantities the admission
/// test saw at that moment.
struct BatchMember {
    std::size_t index = 0;
    double distance = 0.0;
    bool distance_defined = true;
    AdmitReason reason = AdmitReason::Seed;
    double measure_before = 0.0;           // enveloped measure of N without this curve
    double measure_after = 0.0;            // with it
    std::size_t new_coverage_points = 0;   // grid points of O_j not covered before
};

struct EnvelopeIteration {
    std::vector<BatchMember> batch;
    double depth_before = 0.0;  // POIFD of the focal curve within accepted members
    double depth_after = 0.0;   // within accepted members plus this batch
    bool accepted = false;
};

struct Envelope {
    std::size_t focal = 0;
    std::vector<EnvelopeMember> members;  // admission order
    double final_depth = 0.0;             // 0 when empty
    double enveloped_measure = 0.0;       // 0 when empty
    std::vector<EnvelopeIteration> trace;

    bool empty() const { return members.empty(); }
    std::vector<std::size_t> member_indices() const;
};

/// Measure of the focal observed points bracketed by the pointwise min/max
/// over the curves of N observed there. N must be non-empty.
double enveloped_measure(const FunctionalSample& sample, std::size_t i,
                         const std::vector<std::size_t>& N);

/// Candidates j != i ordered nearest-to-farthest (ties by ascending index).
/// Undefined-distance curves are excluded unless coverage_fallback is set,
/// in which case they trail the order.
std::vector<std::size_t> candidate_order(const FunctionalSample& sample, std::size_t i,
                                         const EnvelopeConfig& config = {});

/// Iterative depth-guarded envelope construction: batches of candidates are
/// admitted by strict envelopment gain or new domain coverage, and each
/// batch is kept only if it does not decrease the focal curve's POIFD within
/// the envelope. A lone final candidate is never processed.
Envelope build_envelope(const FunctionalSample& sample, std::size_t i, DepthKind kind,
                        const EnvelopeConfig& config = {});

}  // namespace fdrecon
