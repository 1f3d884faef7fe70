#pragma once

// Time-resolved trajectory records for the `simulate` command.

#include <cstdint>
#include <string>
#include <vector>

#include "qduffing/engines.hpp"
#include "qduffing/noise.hpp"

namespace qduffing {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline std::vector<std::string> trajectory_columns(Model model) {
    switch (model) {
        case Model::classical: return {"t", "x", "p"};
        case Model::semiclassical: return {"t", "x", "p", "mu", "kappa", "r"};
        case Model::quantum: return {"t", "Q", "P", "sigma_QQ", "sigma_PP", "participation_ratio", "N"};
    }
    return {};
}

/// Integrates n_periods drive periods from the engine's default start and
/// records samples_per_period evenly spaced rows per period (plus t = 0).
inline Table simulate_trajectory(Model model, const SystemParams& params, const NumericsConfig& numerics,
                                 int n_periods, int samples_per_period, std::uint64_t seed) {
    if (n_periods < 1 || samples_per_period < 1) throw ConfigError("simulate: periods and samples must be >= 1");
    Table table{trajectory_columns(model), {}};
    const double period = params.period();
    NoiseStream noise(seed);

    auto check_divides = [&](int steps) {
        if (steps % samples_per_period != 0)
            throw ConfigError("samples_per_period (" + std::to_string(samples_per_period) +
                              ") must divide the steps per period (" + std::to_string(steps) + ")");
        return steps / samples_per_period;
    };

    switch (model) {
        case Model::classical: {
            const ClassicalEngine engine(params, numerics);
            const int steps = numerics.steps_per_period;
            const int stride = check_divides(steps);
            const double dt = period / steps;
            ClassicalState s = engine.initial_state();
            table.rows.push_back({s.t, s.x, s.p});
            for (long long k = 0; k < static_cast<long long>(n_periods) * steps; ++k) {
                s.t = static_cast<double>(k) * dt;
                s = step_deterministic(s, params, dt);
                s.t = static_cast<double>(k + 1) * dt;
                if ((k + 1) % stride == 0) table.rows.push_back({s.t, s.x, s.p});
            }
            break;
        }
        case Model::semiclassical: {
            const SemiclassicalEngine engine(params, numerics);
            const int steps = numerics.sde_steps_per_period;
            const int stride = check_divides(steps);
            const double dt = period / steps;
            SemiclassicalState s = engine.initial_state();
            table.rows.push_back({s.t, s.x, s.p, s.mu, s.kappa, s.r});
            for (long long k = 0; k < static_cast<long long>(n_periods) * steps; ++k) {
                s.t = static_cast<double>(k) * dt;
                s = step_sde(s, params, noise, dt);
                s.t = static_cast<double>(k + 1) * dt;
                if ((k + 1) % stride == 0) table.rows.push_back({s.t, s.x, s.p, s.mu, s.kappa, s.r});
            }
            break;
        }
        case Model::quantum: {
            const QuantumEngine engine(params, numerics);
            const int steps = numerics.sde_steps_per_period;
            const int stride = check_divides(steps);
            const double dt = period / steps;
            QsdTrajectory traj = engine.initial_state();
            auto record = [&] {
                const QuantumMoments m = traj.moments();
                table.rows.push_back({traj.state().t, m.q, m.p, m.sigma_qq, m.sigma_pp,
                                      participation_ratio(traj.state()),
                                      static_cast<double>(traj.state().dimension())});
            };
            record();
            for (long long k = 0; k < static_cast<long long>(n_periods) * steps; ++k) {
                traj.state().t = static_cast<double>(k) * dt;
                traj.step(dt, noise.next_increment(dt));
                traj.state().t = static_cast<double>(k + 1) * dt;
                if ((k + 1) % stride == 0) record();
            }
            break;
        }
    }
    return table;
}

}  // namespace qduffing
