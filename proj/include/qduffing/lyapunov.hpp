#pragma once

// Largest Lyapunov exponent by the reset-and-average (Benettin / Wolf) method,
// shared by all engines, and the dynamical complexity K = lambda + gamma.
//
// A fiducial trajectory and a perturbed copy, separated by delta0 in the
// (x, p) centroid plane, are evolved with the identical noise realization. At
// every reset boundary the log growth ln(d / delta0) is recorded and the
// perturbed trajectory is pulled back to distance delta0 along the current
// deviation. Rates are natural-log per unit time, so that K and gamma share
// units and K > gamma is exactly lambda > 0.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qduffing/engines.hpp"
#include "qduffing/error.hpp"
#include "qduffing/noise.hpp"
#include "qduffing/parallel.hpp"

namespace qduffing {

struct LyapunovProtocol {
    std::optional<double> delta0;  // unset: engine default
    int reset_periods = 1;
    int n_periods = 3000;
    int n_realizations = 8;
    int transient_periods = 100;

    void validate() const {
        if (delta0 && !(*delta0 > 0.0)) throw ConfigError("delta0 must be > 0");
        if (reset_periods < 1) throw ConfigError("reset interval must be a positive number of periods");
        if (n_periods <= transient_periods) throw ConfigError("n_periods must exceed transient_periods");
        if (n_periods % reset_periods != 0) throw ConfigError("reset interval must divide n_periods");
        if (n_realizations < 1) throw ConfigError("n_realizations must be >= 1");
        if (transient_periods < 0) throw ConfigError("transient_periods must be >= 0");
    }
};

struct LyapunovEstimate {
    double lambda = 0.0;
    double K = 0.0;
    double std_error = 0.0;
    long long resets = 0;
    long long rekicks = 0;
    // Metadata
    Model model = Model::classical;
    SystemParams params;
    LyapunovProtocol protocol;
    double delta0 = 0.0;
    double reset_interval = 0.0;
    std::uint64_t base_seed = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<double> per_realization;
};

inline double complexity(double lambda, double gamma) { return lambda + gamma; }

/// Seed stream tag for kick directions, kept apart from the dynamics noise.
inline constexpr std::uint64_t kKickStreamTag = 0x6b69636bull;

template <DynamicsEngine E>
double phase_distance(const E& engine, const typename E::State& a, const typename E::State& b) {
    const double ta = engine.time(a), tb = engine.time(b);
    if (std::abs(ta - tb) > 1e-9 * std::max(1.0, std::abs(ta)))
        throw Error("phase_distance: states at different times " + std::to_string(ta) + " and " + std::to_string(tb));
    const Centroid ca = engine.centroid(a), cb = engine.centroid(b);
    return std::hypot(ca.x - cb.x, ca.p - cb.p);
}

/// Displaces the state by delta0 in a uniformly random centroid direction.
template <DynamicsEngine E>
typename E::State perturb(const E& engine, const typename E::State& s, double delta0, NoiseStream& rng) {
    if (delta0 == 0.0) return s;
    const double theta = kTwoPi * rng.next_uniform_pair()[0];
    return engine.kicked(s, delta0 * std::cos(theta), delta0 * std::sin(theta));
}

struct RealizationResult {
    double lambda = 0.0;
    long long resets = 0;
    long long rekicks = 0;
};

template <DynamicsEngine E>
RealizationResult lyapunov_realization(const E& engine, const LyapunovProtocol& protocol, double delta0,
                                       std::uint64_t seed) {
    NoiseStream kick_rng(derive_seed(seed, kKickStreamTag));
    NoiseStream fid_noise(seed);
    NoiseStream per_noise = fid_noise.fork();

    auto fid = engine.initial_state();
    auto per = perturb(engine, fid, delta0, kick_rng);
    const double interval = protocol.reset_periods * engine.params().period();

    RealizationResult out;
    double sum = 0.0;
    long long counted = 0;
    for (int n = 0; n < protocol.n_periods; n += protocol.reset_periods) {
        for (int k = 0; k < protocol.reset_periods; ++k) {
            engine.advance_period(fid, fid_noise);
            engine.advance_period(per, per_noise);
        }
        const double d = phase_distance(engine, fid, per);
        if (d == 0.0) {
            per = perturb(engine, fid, delta0, kick_rng);
            ++out.rekicks;
            continue;
        }
        if (n + protocol.reset_periods > protocol.transient_periods) {
            sum += std::log(d / delta0);
            ++counted;
        }
        per = engine.rescaled(fid, per, delta0 / d);
        ++out.resets;
    }
    out.lambda = counted > 0 ? sum / (counted * interval) : 0.0;
    return out;
}

/// Mean and standard error over realizations. Realization r uses seed
/// derive_seed(base_seed, r) and may run on any worker.
template <DynamicsEngine E>
LyapunovEstimate lyapunov_estimate(const E& engine, const LyapunovProtocol& protocol, std::uint64_t base_seed,
                                   int workers = 1) {
    protocol.validate();
    LyapunovEstimate est;
    est.model = E::model;
    est.params = engine.params();
    est.protocol = protocol;
    est.delta0 = protocol.delta0.value_or(engine.default_delta0());
    est.reset_interval = protocol.reset_periods * engine.params().period();
    est.base_seed = base_seed;

    const auto n = static_cast<std::size_t>(protocol.n_realizations);
    est.seeds.resize(n);
    for (std::size_t r = 0; r < n; ++r) est.seeds[r] = derive_seed(base_seed, r);

    std::vector<RealizationResult> results(n);
    parallel_for(n, workers,
                 [&](std::size_t r) { results[r] = lyapunov_realization(engine, protocol, est.delta0, est.seeds[r]); });

    for (const auto& r : results) {
        est.per_realization.push_back(r.lambda);
        est.resets += r.resets;
        est.rekicks += r.rekicks;
    }
    const double mean = std::accumulate(est.per_realization.begin(), est.per_realization.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : est.per_realization) ss += (v - mean) * (v - mean);
    est.lambda = mean;
    est.std_error = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
    est.K = complexity(est.lambda, engine.params().gamma);
    return est;
}

/// Tangent-flow exponent for the classical engine over the same window the
/// resampling estimator averages; the independent check on that estimator.
inline double tangent_lyapunov(const ClassicalEngine& engine, const LyapunovProtocol& protocol) {
    return tangent_lyapunov_spectrum(engine.params(), engine.numerics().steps_per_period, engine.initial_state(),
                                     protocol.n_periods, protocol.transient_periods)
        .largest;
}

}  // namespace qduffing
