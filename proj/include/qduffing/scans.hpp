#pragma once

// Stroboscopic analyses: Poincare sections, bifurcation diagrams over gamma and
// complexity (K vs gamma) sweeps. Every grid cell starts fresh from the default
// initial condition with its own derived seed, so cells are independent,
// individually re-runnable and safe to run in any order.

#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "qduffing/engines.hpp"
#include "qduffing/lyapunov.hpp"
#include "qduffing/noise.hpp"
#include "qduffing/parallel.hpp"

namespace qduffing {

struct StroboscopicPoint {
    long long n;  // period index; sampled at t = n T
    double x;
    double p;
};

struct PoincareSection {
    std::vector<StroboscopicPoint> points;
    SystemParams params;
    Model model = Model::classical;
    std::uint64_t seed = 0;
};

template <DynamicsEngine E>
PoincareSection poincare_section(const E& engine, int n_periods, int discard, std::uint64_t seed) {
    if (n_periods <= discard || discard < 0) throw ConfigError("poincare: n_periods must exceed discard >= 0");
    PoincareSection out;
    out.params = engine.params();
    out.model = E::model;
    out.seed = seed;
    out.points.reserve(static_cast<std::size_t>(n_periods - discard));
    NoiseStream noise(seed);
    auto s = engine.initial_state();
    for (int n = 1; n <= n_periods; ++n) {
        engine.advance_period(s, noise);
        if (n > discard) {
            const Centroid c = engine.centroid(s);
            out.points.push_back({n, c.x, c.p});
        }
    }
    return out;
}

inline PoincareSection poincare_section(Model model, const SystemParams& params, const NumericsConfig& numerics,
                                        int n_periods, int discard, std::uint64_t seed) {
    return with_engine(model, params, numerics,
                       [&](const auto& e) { return poincare_section(e, n_periods, discard, seed); });
}

/// gamma_min + i * gamma_step for i = 0 .. round((max - min) / step).
inline std::vector<double> gamma_grid(double gamma_min, double gamma_max, double gamma_step) {
    if (!(gamma_step > 0.0) || !(gamma_max >= gamma_min) || !(gamma_min >= 0.0))
        throw ConfigError("gamma grid requires 0 <= gamma_min <= gamma_max and gamma_step > 0");
    const auto count = static_cast<long long>(std::floor((gamma_max - gamma_min) / gamma_step + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long long i = 0; i < count; ++i) out.push_back(gamma_min + static_cast<double>(i) * gamma_step);
    return out;
}

struct BifurcationCell {
    double gamma;
    std::uint64_t seed;
    std::vector<double> x;  // stroboscopic x for periods discard+1 .. periods
    std::string error;      // empty on success

    bool ok() const { return error.empty(); }
};

struct BifurcationScan {
    Model model = Model::classical;
    SystemParams params_template;
    NumericsConfig numerics;
    int periods = 200;
    int discard = 10;
    std::uint64_t seed = 0;
    std::vector<BifurcationCell> cells;
};

inline BifurcationScan bifurcation_scan(Model model, const SystemParams& params_template,
                                        const NumericsConfig& numerics, double gamma_min, double gamma_max,
                                        double gamma_step, int periods = 200, int discard = 10,
                                        std::uint64_t seed = 0, int workers = 1) {
    BifurcationScan scan{model, params_template, numerics, periods, discard, seed, {}};
    const std::vector<double> gammas = gamma_grid(gamma_min, gamma_max, gamma_step);
    scan.cells.resize(gammas.size());
    parallel_for(gammas.size(), workers, [&](std::size_t i) {
        BifurcationCell& cell = scan.cells[i];
        cell.gamma = gammas[i];
        cell.seed = derive_seed(seed, i);
        SystemParams params = params_template;
        params.gamma = gammas[i];
        try {
            const PoincareSection sec = poincare_section(model, params, numerics, periods, discard, cell.seed);
            cell.x.reserve(sec.points.size());
            for (const auto& pt : sec.points) cell.x.push_back(pt.x);
        } catch (const Error& e) {
            cell.x.clear();
            cell.error = e.what();
        }
    });
    return scan;
}

/// One curve of a complexity map: an engine at a fixed beta.
struct SweepCurve {
    Model model = Model::classical;
    double beta = 0.25;
};

struct ComplexityCell {
    SweepCurve curve;
    double gamma = 0.0;
    std::size_t curve_index = 0;
    std::size_t gamma_index = 0;
    std::uint64_t seed = 0;
    std::optional<LyapunovEstimate> estimate;
    std::string error;

    bool ok() const { return estimate.has_value(); }
};

struct ComplexityMap {
    std::vector<SweepCurve> curves;
    std::vector<double> gammas;
    LyapunovProtocol protocol;
    std::uint64_t base_seed = 0;
    std::vector<ComplexityCell> cells;  // curve-major grid order
};

/// Smallest beta the quantum engine accepts in sweeps unless explicitly allowed.
inline constexpr double kQuantumSweepMinBeta = 0.1;

inline std::uint64_t sweep_cell_seed(std::uint64_t base_seed, std::size_t curve_index, std::size_t gamma_index) {
    return derive_seed(derive_seed(base_seed, curve_index), gamma_index);
}

/// Runs a single sweep cell; k_vs_gamma_sweep is exactly this over the grid.
inline ComplexityCell run_sweep_cell(const SweepCurve& curve, std::size_t curve_index, double gamma,
                                     std::size_t gamma_index, const SystemParams& params_template,
                                     const NumericsConfig& numerics, const LyapunovProtocol& protocol,
                                     std::uint64_t base_seed) {
    ComplexityCell cell;
    cell.curve = curve;
    cell.gamma = gamma;
    cell.curve_index = curve_index;
    cell.gamma_index = gamma_index;
    cell.seed = sweep_cell_seed(base_seed, curve_index, gamma_index);
    SystemParams params = params_template;
    params.beta = curve.beta;
    params.gamma = gamma;
    try {
        cell.estimate = with_engine(curve.model, params, numerics,
                                    [&](const auto& e) { return lyapunov_estimate(e, protocol, cell.seed, 1); });
    } catch (const Error& e) {
        cell.error = e.what();
    }
    return cell;
}

/// Called once per finished cell, possibly from several threads at once (the
/// callback is serialised by the sweep).
using SweepProgress = std::function<void(const ComplexityCell&)>;

inline ComplexityMap k_vs_gamma_sweep(const std::vector<SweepCurve>& curves, const std::vector<double>& gammas,
                                      const SystemParams& params_template, const NumericsConfig& numerics,
                                      const LyapunovProtocol& protocol, std::uint64_t base_seed, int workers = 1,
                                      bool allow_small_beta_quantum = false, const SweepProgress& progress = {}) {
    protocol.validate();
    for (const SweepCurve& c : curves)
        if (c.model == Model::quantum && c.beta < kQuantumSweepMinBeta && !allow_small_beta_quantum)
            throw ConfigError("quantum sweep curves need beta >= 0.1 (got " + std::to_string(c.beta) +
                              "); use the semiclassical engine or allow small beta explicitly");
    ComplexityMap map{curves, gammas, protocol, base_seed, {}};
    map.cells.resize(curves.size() * gammas.size());
    std::mutex progress_mutex;
    parallel_for(map.cells.size(), workers, [&](std::size_t idx) {
        const std::size_t ci = idx / gammas.size(), gi = idx % gammas.size();
        map.cells[idx] =
            run_sweep_cell(curves[ci], ci, gammas[gi], gi, params_template, numerics, protocol, base_seed);
        if (progress) {
            std::lock_guard lock(progress_mutex);
            progress(map.cells[idx]);
        }
    });
    return map;
}

}  // namespace qduffing
