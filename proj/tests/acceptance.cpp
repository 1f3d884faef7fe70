// Acceptance runner: `qduffing_acceptance <n>` checks one criterion,
// `qduffing_acceptance all` checks every one. Each check prints a single
// PASS/FAIL line with the measured values.
#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "qduffing/cli.hpp"

using namespace qduffing;
namespace fs = std::filesystem;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

SystemParams params_at(double beta, double gamma) {
    SystemParams p;
    p.beta = beta;
    p.gamma = gamma;
    return p;
}

LyapunovProtocol protocol(int periods, int realizations, int transient = 100) {
    LyapunovProtocol pr;
    pr.n_periods = periods;
    pr.n_realizations = realizations;
    pr.transient_periods = transient;
    return pr;
}

std::size_t count_clusters(const std::vector<double>& xs, double radius) {
    std::vector<double> reps;
    for (double x : xs)
        if (std::none_of(reps.begin(), reps.end(), [&](double r) { return std::abs(r - x) < radius; }))
            reps.push_back(x);
    return reps.size();
}

// 1. Edges of the classical chaotic band.
Outcome chaos_boundaries() {
    const int workers = resolve_workers(0);
    const std::vector<double> gammas = gamma_grid(0.01, 0.30, 0.001);
    const SystemParams tmpl = params_at(0.25, 0.1);
    const NumericsConfig numerics;
    const ComplexityMap map =
        k_vs_gamma_sweep({{Model::classical, 0.25}}, gammas, tmpl, numerics, protocol(400, 1), 1, workers);
    // Weak damping relaxes slowly (time scale 1/Gamma), hence the long discard.
    const BifurcationScan bif =
        bifurcation_scan(Model::classical, tmpl, numerics, 0.01, 0.30, 0.001, 400, 200, 0, workers);

    double onset = NAN, end = NAN, lambda_window = NAN;
    for (const auto& c : map.cells) {
        if (!c.ok()) return {false, "sweep cell failed at gamma=" + format_number(c.gamma) + ": " + c.error};
        if (c.estimate->lambda > 0.0) {
            if (std::isnan(onset)) onset = c.gamma;
            end = c.gamma;
        }
        if (c.gamma_index == 100) lambda_window = c.estimate->lambda;
    }
    // Independent reading from the bifurcation diagram: a cell is irregular when
    // its 200 stroboscopic samples do not collapse onto a few points.
    double bif_onset = NAN, bif_end = NAN;
    std::size_t window_clusters = 0;
    for (std::size_t i = 0; i < bif.cells.size(); ++i) {
        const std::size_t k = count_clusters(bif.cells[i].x, 1e-3);
        if (k > 16) {
            if (std::isnan(bif_onset)) bif_onset = bif.cells[i].gamma;
            bif_end = bif.cells[i].gamma;
        }
        if (i == 100) window_clusters = k;
    }
    const bool pass = std::abs(onset - 0.070) <= 0.010 + 1e-9 && std::abs(end - 0.210) <= 0.010 + 1e-9 &&
                      lambda_window < 0.0 && std::abs(bif_onset - 0.070) <= 0.010 + 1e-9 &&
                      std::abs(bif_end - 0.210) <= 0.010 + 1e-9 && window_clusters <= 8;
    return {pass, fmt::format("lambda: Gamma1={:.3f} Gamma2={:.3f} lambda(0.110)={:.4f}; bifurcation: Gamma1={:.3f} Gamma2={:.3f} "
                              "clusters(0.110)={}",
                              onset, end, lambda_window, bif_onset, bif_end, window_clusters)};
}

// 2. Complexity baseline.
Outcome complexity_baseline() {
    const NumericsConfig numerics;
    const auto est = [&](double gamma) {
        return lyapunov_estimate(ClassicalEngine(params_at(0.25, gamma), numerics), protocol(1000, 1), 1);
    };
    const LyapunovEstimate a = est(0.05), b = est(0.25), c = est(0.13);
    const bool pass = std::abs(a.K) <= 0.02 && std::abs(b.K) <= 0.02 && c.lambda > 0.0 && c.K > 0.13;
    return {pass, fmt::format("K(0.05)={:.4f} K(0.25)={:.4f} lambda(0.13)={:.4f} K(0.13)={:.4f}", a.K, b.K, c.lambda,
                              c.K)};
}

// 3. Resampled separation vs tangent flow. The step-halving figure on the
// chaotic attractor is reported alongside; at this run length it is dominated
// by the finite-time fluctuation of lambda, so it does not gate the result.
Outcome oracle_equivalence() {
    bool pass = true;
    std::string detail;
    const LyapunovProtocol pr = protocol(1000, 1);
    for (double gamma : {0.05, 0.13, 0.25}) {
        const ClassicalEngine e(params_at(0.25, gamma), NumericsConfig{});
        const double resampled = lyapunov_estimate(e, pr, 1).lambda;
        const double tangent = tangent_lyapunov(e, pr);
        const double tol = std::max(0.05 * std::abs(tangent), 0.005);
        pass = pass && std::abs(resampled - tangent) <= tol;
        detail += fmt::format("gamma={} resampled={:.4f} tangent={:.4f}; ", gamma, resampled, tangent);
    }
    NumericsConfig fine;
    fine.steps_per_period = 2 * NumericsConfig{}.steps_per_period;
    const LyapunovProtocol long_run = protocol(20000, 1);
    const double coarse_t = tangent_lyapunov(ClassicalEngine(params_at(0.25, 0.13), NumericsConfig{}), long_run);
    const double fine_t = tangent_lyapunov(ClassicalEngine(params_at(0.25, 0.13), fine), long_run);
    detail += fmt::format("step halving at 0.13 over 20000 periods: {:.5f} vs {:.5f} (rel {:.2e}, not gated)",
                          coarse_t, fine_t, std::abs(fine_t - coarse_t) / std::abs(fine_t));
    return {pass, detail};
}

// 4. beta -> L beta, x -> x / L.
Outcome scale_invariance() {
    const SystemParams base = params_at(0.25, 0.13);
    double worst = 0.0;
    for (double lambda : {0.1, 10.0}) {
        const ScaledPoint sp = rescale(4.0, 0.0, base, lambda);
        ClassicalState a = default_classical_start(base);
        ClassicalState b{sp.x, sp.p, 0.0};
        const DriveTable da(base, 4096), db(sp.params, 4096);
        for (int n = 0; n < 10; ++n) {
            advance_period(a, base, da);
            advance_period(b, sp.params, db);
            worst = std::max(worst, std::abs(lambda * b.x - a.x) / std::max(1.0, std::abs(a.x)));
            worst = std::max(worst, std::abs(lambda * b.p - a.p) / std::max(1.0, std::abs(a.p)));
        }
    }
    // Rounding differences decorrelate the chaotic runs after a few dozen
    // periods, so the exponents are compared as long-time averages.
    const LyapunovProtocol pr = protocol(20000, 1);
    const double ref = lyapunov_estimate(ClassicalEngine(base, NumericsConfig{}), pr, 1).lambda;
    double worst_lambda = 0.0;
    std::string lambdas;
    for (double lambda : {0.1, 10.0}) {
        const ScaledPoint sp = rescale(4.0, 0.0, base, lambda);
        const double l =
            lyapunov_estimate(ClassicalEngine(sp.params, NumericsConfig{}, ClassicalState{sp.x, sp.p, 0.0}), pr, 1)
                .lambda;
        worst_lambda = std::max(worst_lambda, std::abs(l - ref));
        lambdas += fmt::format(" {:.5f}", l);
    }
    return {worst <= 1e-8 && worst_lambda <= 0.005,
            fmt::format("max trajectory deviation {:.2e}; lambda ref {:.5f} scaled{} (max diff {:.2e})", worst, ref,
                        lambdas, worst_lambda)};
}

// 5. R^2 - mu kappa over 100 time units at beta = Gamma = 0.
Outcome semiclassical_conservation() {
    SystemParams p;
    p.beta = 0.0;
    p.gamma = 0.0;
    p.g = 0.0;
    SemiclassicalState s;
    s.x = 1.0;
    NoiseStream ns(1);
    const double dt = kTwoPi / NumericsConfig{}.sde_steps_per_period;
    auto invariant = [](const SemiclassicalState& v) { return v.r * v.r - v.mu * v.kappa; };
    const double inv0 = invariant(s);
    double worst = 0.0, first_breach = NAN;
    try {
        for (long k = 1; k * dt <= 100.0; ++k) {
            s = step_sde(s, p, ns, dt);
            const double rel = std::abs(invariant(s) - inv0) / std::abs(inv0);
            if (!std::isfinite(rel)) {
                worst = INFINITY;
                break;
            }
            worst = std::max(worst, rel);
            if (rel >= 1e-6 && std::isnan(first_breach)) first_breach = k * dt;
        }
    } catch (const TrajectoryEscaped& e) {
        return {false, fmt::format("trajectory escaped at t={:.2f}; max relative drift before that {:.2e} (first "
                                   "exceeds 1e-6 at t={:.2f})",
                                   e.time(), worst, first_breach)};
    }
    return {worst < 1e-6,
            fmt::format("max relative drift {:.2e}, first exceeds 1e-6 at t={:.2f}; spreads grow like e^(2t) "
                        "(mu(100)={:.3e}), so double rounding alone exceeds the bound",
                        worst, first_breach, s.mu)};
}

// 6. Semiclassical reduces to classical at tiny beta.
Outcome semiclassical_reduction() {
    const SystemParams p = params_at(1e-5, 0.13);
    const LyapunovProtocol pr = protocol(1000, 8);
    const int workers = resolve_workers(0);
    const LyapunovEstimate sc = lyapunov_estimate(SemiclassicalEngine(p, NumericsConfig{}), pr, 1, workers);
    const LyapunovEstimate cl = lyapunov_estimate(ClassicalEngine(p, NumericsConfig{}), pr, 1, workers);
    const double rel = std::abs(sc.lambda - cl.lambda) / std::abs(cl.lambda);
    return {rel <= 0.10, fmt::format("semiclassical {:.4f} +- {:.4f}, classical {:.4f} (rel diff {:.3f})", sc.lambda,
                                     sc.std_error, cl.lambda, rel)};
}

Mat dense(const BandedMatrix& m) {
    const int n = m.size();
    Mat out(n, n);
    const auto d = m.to_dense();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = d[static_cast<std::size_t>(i) * n + j];
    return out;
}

Mat lowering(int n) {
    Mat a = Mat::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(double(k));
    return a;
}

Vec coherent_reference(int n, double x, double p) {
    const Complex alpha = Complex(x, p) / std::sqrt(2.0);
    Vec v(n);
    Complex term = std::exp(-0.5 * std::norm(alpha));
    for (int k = 0; k < n; ++k) {
        v(k) = term;
        term *= alpha / std::sqrt(double(k + 1));
    }
    return v / v.norm();
}

// 7. Operator algebra.
Outcome operator_algebra() {
    const int n = 40;
    const OperatorSet ops = build_operators(n);
    const Mat a = lowering(n);
    const Complex i(0, 1);
    double ladder = (dense(ops.a) - a).cwiseAbs().maxCoeff();
    const Mat q = dense(ops.q), p = dense(ops.p);
    const Mat c = q * p - p * q;
    const double comm = (c.topLeftCorner(n - 1, n - 1) - i * Mat::Identity(n - 1, n - 1)).cwiseAbs().maxCoeff();
    const Vec ground = Vec::Unit(n, 0);
    const double dark = (dense(ops.l) * ground).norm();

    double coh = 0.0;
    for (auto [x, pp] : {std::pair{0.0, 0.0}, {1.5, -0.5}, {-2.0, 2.5}}) {
        const QuantumState s = coherent_state(n, x, pp);
        Vec v(n);
        for (int k = 0; k < n; ++k) v(k) = s.amplitudes[k];
        coh = std::max(coh, (v - coherent_reference(n, x, pp)).norm());
        coh = std::max(coh, std::abs(expectation(s, ops.q) - x));
        coh = std::max(coh, std::abs(expectation(s, ops.p) - pp));
        const QuantumMoments m = quantum_moments(s, ops);
        coh = std::max({coh, std::abs(m.sigma_qq - 0.5), std::abs(m.sigma_pp - 0.5)});
    }
    return {ladder == 0.0 && comm <= 1e-12 && coh <= 1e-9 && dark == 0.0,
            fmt::format("ladder max err {:.1e}, interior [Q,P]-i {:.1e}, coherent max err {:.1e}, |L|0>| {:.1e}",
                        ladder, comm, coh, dark)};
}

// 8. QSD ensemble mean vs direct density-matrix integration.
Outcome qsd_vs_master_equation() {
    const int n = 16;
    SystemParams params = params_at(1.0, 0.3);
    const NumericsConfig numerics;
    const int steps = numerics.sde_steps_per_period;
    const double period = params.period();
    const double dt = period / steps;
    const int checkpoints = 8;
    const int stride = 2 * steps / checkpoints;
    const int trajectories = 200;

    // Oracle built from the plain ladder matrix.
    const Complex i(0, 1);
    const Mat a = lowering(n), ad = a.adjoint();
    const Mat q = (a + ad) / std::sqrt(2.0), pm = i * (ad - a) / std::sqrt(2.0);
    const Mat h0 = 0.5 * pm * pm + 0.25 * params.beta * params.beta * q * q * q * q - 0.5 * q * q +
                   0.5 * params.gamma * (q * pm + pm * q);
    const Mat l = std::sqrt(params.gamma) * (q + i * pm);
    const Mat ldl = l.adjoint() * l;
    auto rhs = [&](const Mat& rho, double t) -> Mat {
        const Mat h = h0 - params.drive(t) * q;
        return -i * (h * rho - rho * h) + l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
    };
    const Vec psi0 = coherent_reference(n, 1.0 / params.beta, 0.0);
    Mat rho = psi0 * psi0.adjoint();
    std::vector<double> oracle;
    const double h_oracle = period / 4096;
    const int oracle_stride = 2 * 4096 / checkpoints;
    for (int k = 0; k < 2 * 4096; ++k) {
        const double t = k * h_oracle;
        const Mat k1 = rhs(rho, t);
        const Mat k2 = rhs(rho + 0.5 * h_oracle * k1, t + 0.5 * h_oracle);
        const Mat k3 = rhs(rho + 0.5 * h_oracle * k2, t + 0.5 * h_oracle);
        const Mat k4 = rhs(rho + h_oracle * k3, t + h_oracle);
        rho += h_oracle / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if ((k + 1) % oracle_stride == 0) oracle.push_back((q * rho).trace().real());
    }

    // QSD ensemble in the same fixed basis.
    const auto ops = std::make_shared<const OperatorSet>(build_operators(n));
    std::vector<std::vector<double>> samples(trajectories, std::vector<double>(checkpoints));
    parallel_for(trajectories, resolve_workers(0), [&](std::size_t r) {
        QsdIntegrator integ(ops, params);
        QuantumState s = coherent_state(n, 1.0 / params.beta, 0.0);
        NoiseStream ns(derive_seed(2024, r));
        for (int k = 0; k < 2 * steps; ++k) {
            s.t = k * dt;
            integ.step(s, dt, ns.next_increment(dt));
            if ((k + 1) % stride == 0) samples[r][(k + 1) / stride - 1] = expectation(s, ops->q);
        }
    });

    bool pass = true;
    double worst = 0.0;
    std::string detail;
    for (int c = 0; c < checkpoints; ++c) {
        double mean = 0.0, sq = 0.0;
        for (const auto& row : samples) mean += row[c];
        mean /= trajectories;
        for (const auto& row : samples) sq += (row[c] - mean) * (row[c] - mean);
        const double se = std::sqrt(sq / (trajectories - 1) / trajectories);
        const double z = std::abs(mean - oracle[c]) / se;
        worst = std::max(worst, z);
        pass = pass && z <= 3.0;
        detail += fmt::format(" {:.3f}/{:.3f}", mean, oracle[c]);
    }
    return {pass, fmt::format("max |mean - oracle| / SE = {:.2f}; <Q> ensemble/oracle:{}", worst, detail)};
}

// 9. Participation ratio vs beta.
Outcome occupancy_trend() {
    std::vector<double> averages;
    for (double beta : {1.0, 0.5, 0.205}) {
        const QuantumEngine e(params_at(beta, 0.3), NumericsConfig{});
        QsdTrajectory s = e.initial_state();
        NoiseStream ns(derive_seed(9, static_cast<std::uint64_t>(beta * 1000)));
        double acc = 0.0;
        const int transient = 10, periods = 40;
        for (int k = 0; k < periods; ++k) {
            e.advance_period(s, ns);
            if (k >= transient) acc += participation_ratio(s.state());
        }
        averages.push_back(acc / (periods - transient));
    }
    const bool pass = averages[0] < 10.0 && averages[0] < averages[1] && averages[1] < averages[2];
    return {pass, fmt::format("mean participation ratio beta=1: {:.2f}, beta=0.5: {:.2f}, beta=0.205: {:.2f}",
                              averages[0], averages[1], averages[2])};
}

// 10. Quantum chaos where the classical orbit is regular.
Outcome anomalous_quantum_chaos() {
    const int workers = resolve_workers(0);
    const LyapunovEstimate qu =
        lyapunov_estimate(QuantumEngine(params_at(0.205, 0.11), NumericsConfig{}), protocol(500, 4), 1, workers);
    const LyapunovEstimate cl =
        lyapunov_estimate(ClassicalEngine(params_at(0.205, 0.11), NumericsConfig{}), protocol(1000, 1), 1);
    std::string per;
    for (double v : qu.per_realization) per += fmt::format(" {:.4f}", v);
    const bool pass = qu.lambda > 3.0 * qu.std_error && qu.lambda > 0.0 && cl.lambda < 0.0;
    return {pass, fmt::format("quantum lambda {:.4f} +- {:.4f} (realizations:{}), classical lambda {:.4f}", qu.lambda,
                              qu.std_error, per, cl.lambda)};
}

// 11. Semiclassical sign change at Gamma = 0.05.
Outcome semiclassical_sign_change() {
    const int workers = resolve_workers(0);
    const LyapunovProtocol pr = protocol(1000, 8);
    const LyapunovEstimate lo =
        lyapunov_estimate(SemiclassicalEngine(params_at(0.02, 0.05), NumericsConfig{}), pr, 1, workers);
    const LyapunovEstimate hi =
        lyapunov_estimate(SemiclassicalEngine(params_at(0.15, 0.05), NumericsConfig{}), pr, 1, workers);
    return {lo.lambda < 0.0 && hi.lambda > 0.0,
            fmt::format("lambda(beta=0.02) {:.4f} +- {:.4f}, lambda(beta=0.15) {:.4f} +- {:.4f}", lo.lambda,
                        lo.std_error, hi.lambda, hi.std_error)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string strip_comments(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line))
        if (line.empty() || line[0] != '#') out += line + '\n';
    return out;
}

// 12. Byte-identical outputs, thread independence, re-runnable cells.
Outcome determinism() {
    const fs::path dir = fs::temp_directory_path() / fmt::format("qduffing_acceptance_{}", ::getpid());
    fs::create_directories(dir);
    auto run = [&](std::vector<std::string> args, const std::string& out) {
        args.push_back("-o");
        args.push_back((dir / out).string());
        std::ostringstream err;
        if (run_cli(args, err) != 0) throw std::runtime_error("cli failed: " + err.str());
        return slurp(dir / out);
    };
    std::vector<std::string> failures;
    const std::vector<std::vector<std::string>> single = {
        {"simulate", "-m", "classical", "--periods", "5"},
        {"simulate", "-m", "semiclassical", "--periods", "3", "--seed", "5"},
        {"simulate", "-m", "quantum", "--beta", "0.5", "--gamma", "0.3", "--periods", "2", "--seed", "5"},
        {"poincare", "-m", "semiclassical", "--periods", "30", "--seed", "3"},
        {"lyapunov", "-m", "semiclassical", "--periods", "60", "--transient", "10", "--realizations", "3"},
    };
    for (std::size_t k = 0; k < single.size(); ++k)
        if (run(single[k], fmt::format("a{}.csv", k)) != run(single[k], fmt::format("b{}.csv", k)))
            failures.push_back("repeat " + single[k][0] + " " + single[k][2]);

    const std::vector<std::string> sweep = {"sweep",       "--curve",       "classical:0.25", "--curve",
                                            "semiclassical:0.2", "--gamma-min", "0.1",         "--gamma-max",
                                            "0.13",        "--periods",     "40",             "--transient",
                                            "10",          "--realizations", "2",             "--seed",
                                            "17"};
    auto with_threads = [&](const char* t) {
        auto args = sweep;
        args.insert(args.end(), {"--threads", t});
        return args;
    };
    const std::string s1 = run(with_threads("1"), "s1.csv");
    const std::string s8 = run(with_threads("8"), "s8.csv");
    if (s1 != s8) failures.push_back("sweep threads 1 vs 8");
    const std::string b1 = run({"bifurcation", "-m", "semiclassical", "--gamma-min", "0.1", "--gamma-max", "0.12",
                                "--gamma-step", "0.01", "--periods", "20", "--threads", "1"},
                               "bf1.csv");
    const std::string b8 = run({"bifurcation", "-m", "semiclassical", "--gamma-min", "0.1", "--gamma-max", "0.12",
                                "--gamma-step", "0.01", "--periods", "20", "--threads", "8"},
                               "bf8.csv");
    if (b1 != b8) failures.push_back("bifurcation threads 1 vs 8");

    std::vector<std::string> rows;
    {
        std::istringstream in(strip_comments(s1));
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) rows.push_back(line);
    }
    for (std::size_t cell = 0; cell < rows.size(); ++cell) {
        auto args = with_threads("1");
        args.insert(args.end(), {"--cell", std::to_string(cell)});
        std::istringstream in(strip_comments(run(args, fmt::format("cell{}.csv", cell))));
        std::string header, row;
        std::getline(in, header);
        std::getline(in, row);
        if (row != rows[cell]) failures.push_back(fmt::format("cell {} rerun", cell));
    }
    fs::remove_all(dir);
    std::string detail = fmt::format("{} repeat checks, 2 thread checks, {} cell reruns", single.size(), rows.size());
    for (const auto& f : failures) detail += "; mismatch: " + f;
    return {failures.empty(), detail};
}

struct Criterion {
    const char* name;
    std::function<Outcome()> check;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all = {
        {"classical chaos boundaries", chaos_boundaries},
        {"classical complexity baseline", complexity_baseline},
        {"resampling vs tangent exponent", oracle_equivalence},
        {"scale invariance", scale_invariance},
        {"semiclassical constant of motion", semiclassical_conservation},
        {"semiclassical to classical reduction", semiclassical_reduction},
        {"quantum operator algebra", operator_algebra},
        {"QSD ensemble vs master equation", qsd_vs_master_equation},
        {"Hilbert-space occupancy trend", occupancy_trend},
        {"quantum chaos in classical regular window", anomalous_quantum_chaos},
        {"semiclassical sign change at Gamma=0.05", semiclassical_sign_change},
        {"determinism", determinism},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::size_t> selected;
    const std::string which = argc > 1 ? argv[1] : "all";
    if (which == "all") {
        for (std::size_t k = 1; k <= criteria().size(); ++k) selected.push_back(k);
    } else {
        const std::size_t k = std::strtoul(which.c_str(), nullptr, 10);
        if (k < 1 || k > criteria().size()) {
            std::cerr << "usage: qduffing_acceptance [all|1.." << criteria().size() << "]\n";
            return 2;
        }
        selected.push_back(k);
    }
    bool ok = true;
    for (std::size_t k : selected) {
        const Criterion& c = criteria()[k - 1];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.check();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << fmt::format("{} [{:02}] {}: {} ({:.0f}s)", out.pass ? "PASS" : "FAIL", k, c.name, out.detail,
                                 secs)
                  << std::endl;
        ok = ok && out.pass;
    }
    return ok ? 0 : 1;
}
