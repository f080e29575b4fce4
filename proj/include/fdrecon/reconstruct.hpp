#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fdrecon/envelope.hpp"

namespace fdrecon {

std::vector<double> default_theta_grid();  // {0, 0.25, 0.5, 1, 2, 4, 8, 16, 32, 64}

struct ReconstructConfig {
    DepthKind kind = DepthKind::MBD2;
    EnvelopeConfig envelope;
    std::vector<double> theta_grid = default_theta_grid();
    std::optional<double> fixed_theta;  // skip tuning when set
    // Fill missing points where no envelope member is observed with the
    // pointwise mean over all curves available there (flagged as fallback).
    bool fallback_mean = false;
};

/// Minimum member distance, floored at 1e-12 so an exact-duplicate member
/// (distance 0) drives every positive-distance weight to 0 instead of
/// dividing by zero.
double envelope_delta(const Envelope& envelope);

/// Exponential-weight pointwise estimate on the target points: at each t the
/// weighted mean over envelope members observed there, w_j =
/// exp(-theta*d_j/delta), evaluated in ascending member index with the
/// largest weight factored out, and clamped to the member value range at t
/// so the convex-combination property survives rounding. NaN where no member
/// is observed.
std::vector<double> reconstruct_with_theta(const FunctionalSample& sample,
                                           const Envelope& envelope, double theta,
                                           const ObservationMask& target);

/// Points of the focal observed set where the estimator is computable:
/// union over members j of O_focal ∩ O_j. Empty mask for an empty envelope.
ObservationMask computable_obs_set(const FunctionalSample& sample, const Envelope& envelope);

struct ThetaScan {
    std::vector<double> thetas;     // ascending, deduplicated
    std::vector<double> objective;  // summed squared self-reconstruction distance
    std::size_t best_index = 0;
    double best_theta = 0.0;
};

/// Grid search for the weight temperature: each curve with a non-empty
/// envelope is re-estimated on the computable part of its own observed set,
/// scored with the squared mean-L2 distance to its actual values, and the
/// scores are summed. Ties pick the smallest theta.
ThetaScan tune_theta_scan(const FunctionalSample& sample, const std::vector<Envelope>& envelopes,
                          const std::vector<double>& theta_grid,
                          DistanceNorm norm = DistanceNorm::MeanL2);
double tune_theta(const FunctionalSample& sample, const std::vector<Envelope>& envelopes,
                  const std::vector<double>& theta_grid, DistanceNorm norm = DistanceNorm::MeanL2);

struct ReconstructionResult {
    std::size_t focal = 0;
    bool ok = false;
    std::string status;                  // "ok" or the per-curve failure message
    std::vector<double> filled_values;   // full grid; finite exactly on filled points
    ObservationMask filled_mask;         // filled missing points (incl. fallback)
    ObservationMask fallback_mask;       // subset of filled_mask filled by the sample mean
    ObservationMask computable_obs_mask; // computable part of the observed set
    double theta = 0.0;
    double delta = 0.0;
    double coverage_fraction = 0.0;      // envelope-computable missing measure / missing measure
    Envelope envelope;
};

struct SampleReconstruction {
    std::vector<ReconstructionResult> results;  // one per incomplete curve, sample order
    FunctionalSample completed;
    double theta = 0.0;
    bool tuned = false;  // true when theta came from the grid search
    ThetaScan scan;      // populated when tuned
};

/// Whole-sample pipeline: build an envelope for every incomplete curve, tune
/// one shared theta (unless fixed), fill each curve's missing points where
/// computable. Per-curve failures land in the curve's status; observed values
/// are never altered.
SampleReconstruction reconstruct_sample(const FunctionalSample& sample,
                                        const ReconstructConfig& config = {});

}  // namespace fdrecon
