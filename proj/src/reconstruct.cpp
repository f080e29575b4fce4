#include "fdrecon/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fdrecon/errors.hpp"

namespace fdrecon {

std::vector<double> default_theta_grid() {
    return {0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0};
}

double envelope_delta(const Envelope& envelope) {
    if (envelope.empty()) throw NoEnvelopeError("delta of an empty envelope");
    double d = std::numeric_limits<double>::infinity();
    for (const auto& m : envelope.members) d = std::min(d, m.distance);
    return std::max(d, 1e-12);
}

std::vector<double> reconstruct_with_theta(const FunctionalSample& sample,
                                           const Envelope& envelope, double theta,
                                           const ObservationMask& target) {
    if (envelope.empty())
        throw NoEnvelopeError("curve " + std::to_string(envelope.focal) +
                              ": reconstruction from an empty envelope");
    if (theta < 0.0) throw ConfigError("theta must be >= 0");
    const Grid& g = sample.grid();
    if (target.size() != g.size())
        throw StructuralError("reconstruct_with_theta: target mask/grid size mismatch");
    const double delta = envelope_delta(envelope);

    std::vector<EnvelopeMember> members = envelope.members;
    std::sort(members.begin(), members.end(),
              [](const EnvelopeMember& a, const EnvelopeMember& b) { return a.index < b.index; });

    std::vector<double> out(g.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t t = 0; t < g.size(); ++t) {
        if (!target[t]) continue;
        double dmin = std::numeric_limits<double>::infinity();
        for (const auto& m : members)
            if (sample.curve(m.index).observed(t)) dmin = std::min(dmin, m.distance);
        if (!std::isfinite(dmin)) continue;  // no member observed here
        double num = 0.0, den = 0.0;
        double vmin = std::numeric_limits<double>::infinity();
        double vmax = -std::numeric_limits<double>::infinity();
        for (const auto& m : members) {
            if (!sample.curve(m.index).observed(t)) continue;
            const double v = sample.curve(m.index).value(t);
            const double w = std::exp(-(theta * (m.distance - dmin)) / delta);
            num += w * v;
            den += w;
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
        out[t] = std::clamp(num / den, vmin, vmax);
    }
    return out;
}

ObservationMask computable_obs_set(const FunctionalSample& sample, const Envelope& envelope) {
    const PartialCurve& focal = sample.curve(envelope.focal);
    ObservationMask out(sample.grid().size());
    for (const auto& m : envelope.members) {
        const ObservationMask& other = sample.curve(m.index).mask();
        for (std::size_t t = 0; t < out.size(); ++t)
            if (focal.observed(t) && other[t]) out.set(t, true);
    }
    return out;
}

namespace {

std::vector<double> clean_theta_grid(const std::vector<double>& theta_grid) {
    if (theta_grid.empty()) throw ConfigError("theta grid is empty");
    std::vector<double> grid = theta_grid;
    for (double v : grid)
        if (!(v >= 0.0)) throw ConfigError("theta grid values must be >= 0");
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

/// Squared self-reconstruction distance of one curve at one theta, or 0 when
/// the computable observed part is too small to carry a distance.
double self_score(const FunctionalSample& sample, const Envelope& env,
                  const ObservationMask& obs_hat, double theta, DistanceNorm norm) {
    const std::vector<double> recon = reconstruct_with_theta(sample, env, theta, obs_hat);
    const PartialCurve& focal = sample.curve(env.focal);
    const Grid& g = sample.grid();
    double integral = 0.0, lambda = 0.0;
    std::size_t points = 0;
    for (std::size_t t = 0; t < g.size(); ++t) {
        if (!obs_hat[t]) continue;
        const double d = focal.value(t) - recon[t];
        integral += d * d * g.weight(t);
        lambda += g.weight(t);
        ++points;
    }
    if (points < 2) return 0.0;
    if (norm == DistanceNorm::Rms) return integral / lambda;
    return integral / (lambda * lambda);
}

}  // namespace

ThetaScan tune_theta_scan(const FunctionalSample& sample, const std::vector<Envelope>& envelopes,
                          const std::vector<double>& theta_grid, DistanceNorm norm) {
    ThetaScan scan;
    scan.thetas = clean_theta_grid(theta_grid);
    std::vector<const Envelope*> usable;
    for (const Envelope& e : envelopes)
        if (!e.empty()) usable.push_back(&e);
    if (usable.empty()) throw NoEnvelopeError("theta tuning: every envelope is empty");

    std::vector<ObservationMask> obs_hat;
    obs_hat.reserve(usable.size());
    for (const Envelope* e : usable) obs_hat.push_back(computable_obs_set(sample, *e));

    scan.objective.assign(scan.thetas.size(), 0.0);
    const std::ptrdiff_t nv = static_cast<std::ptrdiff_t>(scan.thetas.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < nv; ++k) {
        double obj = 0.0;
        for (std::size_t u = 0; u < usable.size(); ++u)
            obj += self_score(sample, *usable[u], obs_hat[u], scan.thetas[static_cast<std::size_t>(k)], norm);
        scan.objective[static_cast<std::size_t>(k)] = obj;
    }

    scan.best_index = 0;
    for (std::size_t k = 1; k < scan.thetas.size(); ++k)
        if (scan.objective[k] < scan.objective[scan.best_index]) scan.best_index = k;
    scan.best_theta = scan.thetas[scan.best_index];
    return scan;
}

double tune_theta(const FunctionalSample& sample, const std::vector<Envelope>& envelopes,
                  const std::vector<double>& theta_grid, DistanceNorm norm) {
    return tune_theta_scan(sample, envelopes, theta_grid, norm).best_theta;
}

SampleReconstruction reconstruct_sample(const FunctionalSample& sample,
                                        const ReconstructConfig& config) {
    const Grid& g = sample.grid();
    const std::size_t T = g.size();

    std::vector<std::size_t> incomplete;
    for (std::size_t i = 0; i < sample.size(); ++i)
        if (!sample.curve(i).complete()) incomplete.push_back(i);

    std::vector<ReconstructionResult> results(incomplete.size());
    const std::ptrdiff_t ni = static_cast<std::ptrdiff_t>(incomplete.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t s = 0; s < ni; ++s) {
        ReconstructionResult& r = results[static_cast<std::size_t>(s)];
        r.focal = incomplete[static_cast<std::size_t>(s)];
        try {
            r.envelope = build_envelope(sample, r.focal, config.kind, config.envelope);
            r.ok = true;
            r.status = r.envelope.empty() ? "empty envelope" : "ok";
        } catch (const Error& e) {
            r.ok = false;
            r.status = e.what();
        }
        r.filled_values.assign(T, std::numeric_limits<double>::quiet_NaN());
        r.filled_mask = ObservationMask(T);
        r.fallback_mask = ObservationMask(T);
        r.computable_obs_mask = ObservationMask(T);
    }

    double theta = 0.0;
    bool tuned = false;
    ThetaScan scan;
    if (config.fixed_theta) {
        if (*config.fixed_theta < 0.0) throw ConfigError("theta must be >= 0");
        theta = *config.fixed_theta;
    } else {
        std::vector<Envelope> usable;
        for (const auto& r : results)
            if (r.ok && !r.envelope.empty()) usable.push_back(r.envelope);
        if (!usable.empty()) {
            scan = tune_theta_scan(sample, usable, config.theta_grid, config.envelope.norm);
            theta = scan.best_theta;
            tuned = true;
        } else if (!config.theta_grid.empty()) {
            theta = clean_theta_grid(config.theta_grid).front();
        }
    }

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t s = 0; s < ni; ++s) {
        ReconstructionResult& r = results[static_cast<std::size_t>(s)];
        r.theta = theta;
        if (!r.ok || r.envelope.empty()) continue;
        r.delta = envelope_delta(r.envelope);
        r.computable_obs_mask = computable_obs_set(sample, r.envelope);
        const ObservationMask missing = complement_mask(sample.curve(r.focal).mask());
        r.filled_values = reconstruct_with_theta(sample, r.envelope, theta, missing);
        double filled_measure = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            if (std::isfinite(r.filled_values[t])) {
                r.filled_mask.set(t, true);
                filled_measure += g.weight(t);
            }
        }
        const double missing_measure = measure(missing, g);
        r.coverage_fraction = missing_measure > 0.0 ? filled_measure / missing_measure : 1.0;
        if (config.fallback_mean) {
            for (std::size_t t = 0; t < T; ++t) {
                if (!missing[t] || r.filled_mask[t] || sample.avail_count(t) == 0) continue;
                double sum = 0.0;
                for (std::size_t j : sample.available_at(t)) sum += sample.curve(j).value(t);
                r.filled_values[t] = sum / static_cast<double>(sample.avail_count(t));
                r.filled_mask.set(t, true);
                r.fallback_mask.set(t, true);
            }
        }
    }

    std::vector<PartialCurve> completed_curves;
    completed_curves.reserve(sample.size());
    std::vector<const ReconstructionResult*> by_curve(sample.size(), nullptr);
    for (const auto& r : results) by_curve[r.focal] = &r;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const ReconstructionResult* r = by_curve[i];
        if (!r || r->filled_mask.none()) {
            completed_curves.push_back(sample.curve(i));
            continue;
        }
        std::vector<double> values = sample.curve(i).values();
        for (std::size_t t = 0; t < T; ++t)
            if (r->filled_mask[t]) values[t] = r->filled_values[t];
        completed_curves.emplace_back(std::move(values));
    }

    SampleReconstruction out{std::move(results), FunctionalSample(g, std::move(completed_curves)),
                             theta, tuned, std::move(scan)};
    return out;
}

}  // namespace fdrecon
