#pragma once

// Dimensionless parameters of the driven, damped double-well oscillator
//
//     x'' + 2 gamma x' + beta^2 x^3 - x = (g / beta) cos(omega t)
//
// beta plays the role of an effective Planck constant: beta^2 = hbar / (m l^2 w0)
// for a physical oscillator of mass m, length scale l and natural frequency w0.
// Only the dimensionless combination is modelled here.
//
// omega defaults to 1 so that the drive period is exactly 2 pi. This is an
// inference from the stroboscopic sampling times t = 2 n pi used for all
// Poincare sections and bifurcation diagrams; no other value is ever quoted.

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "qduffing/error.hpp"

namespace qduffing {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct SystemParams {
    double beta = 0.25;
    double gamma = 0.1;
    double g = 0.3;
    double omega = 1.0;

    double period() const { return kTwoPi / omega; }

    /// (g / beta) cos(omega t); exactly zero when the drive is off, even at beta = 0.
    double drive(double t) const {
        if (g == 0.0) return 0.0;
        return g / beta * std::cos(omega * t);
    }

    /// Throws ConfigError on any violated invariant. The stochastic engines pass
    /// require_dissipation: the undamped limit is singular for them.
    void validate(bool require_dissipation = false) const {
        auto fail = [](const std::string& msg) { throw ConfigError(msg); };
        if (!(beta > 0.0) || !std::isfinite(beta)) fail("beta must be > 0, got " + std::to_string(beta));
        if (!(omega > 0.0) || !std::isfinite(omega)) fail("omega must be > 0, got " + std::to_string(omega));
        if (!(g >= 0.0) || !std::isfinite(g)) fail("g must be >= 0, got " + std::to_string(g));
        if (!(gamma >= 0.0) || !std::isfinite(gamma)) fail("gamma must be >= 0, got " + std::to_string(gamma));
        if (require_dissipation && !(gamma > 0.0))
            fail("gamma must be > 0 for the semiclassical and quantum engines");
    }

    friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

struct NumericsConfig {
    int steps_per_period = 4096;       // RK4 substeps, classical engine
    int sde_steps_per_period = 16384;  // stochastic engines
    double basis_tail_tolerance = 1e-6;
    bool renormalize_each_step = true;

    void validate() const {
        if (steps_per_period < 64)
            throw ConfigError("steps_per_period must be >= 64, got " + std::to_string(steps_per_period));
        if (sde_steps_per_period < 1024)
            throw ConfigError("sde_steps_per_period must be >= 1024, got " +
                              std::to_string(sde_steps_per_period));
        if (!(basis_tail_tolerance > 0.0 && basis_tail_tolerance <= 1e-4))
            throw ConfigError("basis_tail_tolerance must lie in (0, 1e-4], got " +
                              std::to_string(basis_tail_tolerance));
    }

    friend bool operator==(const NumericsConfig&, const NumericsConfig&) = default;
};

/// Drive force sampled at every half step of a period split into `steps`
/// substeps: value(j) = f(j dt / 2), j = 0 .. 2 steps. The drive is periodic, so
/// one table serves every period of a trajectory started on the period grid.
class DriveTable {
public:
    DriveTable() = default;
    DriveTable(const SystemParams& params, int steps) : values_(static_cast<std::size_t>(2 * steps + 1)) {
        const double half = params.period() / (2.0 * steps);
        for (std::size_t j = 0; j < values_.size(); ++j) values_[j] = params.drive(static_cast<double>(j) * half);
    }
    int steps() const { return static_cast<int>(values_.size() / 2); }
    double operator[](std::size_t j) const { return values_[j]; }

private:
    std::vector<double> values_;
};

/// V(x) = beta^2 x^4 / 4 - x^2 / 2.
inline double potential_value(double x, const SystemParams& params) {
    const double b2 = params.beta * params.beta;
    const double x2 = x * x;
    return 0.25 * b2 * x2 * x2 - 0.5 * x2;
}

/// The two well bottoms, (-1/beta, +1/beta).
inline std::pair<double, double> well_minima(const SystemParams& params) {
    const double xm = 1.0 / params.beta;
    return {-xm, xm};
}

struct ScaledPoint {
    double x;
    double p;
    SystemParams params;
};

/// beta -> lambda * beta, (x, p) -> (x, p) / lambda. The equation of motion is
/// invariant under this map, so trajectories correspond one to one.
inline ScaledPoint rescale(double x, double p, const SystemParams& params, double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("rescale factor must be positive");
    SystemParams out = params;
    out.beta = params.beta * lambda;
    return {x / lambda, p / lambda, out};
}

}  // namespace qduffing
