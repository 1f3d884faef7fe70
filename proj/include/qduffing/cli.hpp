#pragma once

// Command-line front end: configuration parsing (flags plus an optional
// key=value file) and dispatch to the analyses with CSV/SVG output.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "qduffing/engines.hpp"
#include "qduffing/error.hpp"
#include "qduffing/lyapunov.hpp"
#include "qduffing/output.hpp"
#include "qduffing/parallel.hpp"
#include "qduffing/scans.hpp"
#include "qduffing/trajectory.hpp"

namespace qduffing {

/// Thrown by parse_config for --help; what() is the help text.
class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Command { simulate, bifurcation, poincare, lyapunov, sweep };

inline std::string_view to_string(Command c) {
    switch (c) {
        case Command::simulate: return "simulate";
        case Command::bifurcation: return "bifurcation";
        case Command::poincare: return "poincare";
        case Command::lyapunov: return "lyapunov";
        case Command::sweep: return "sweep";
    }
    return "?";
}

struct RunConfig {
    Command command = Command::simulate;
    Model model = Model::classical;
    SystemParams params;
    NumericsConfig numerics;
    LyapunovProtocol protocol;
    std::uint64_t seed = 0;
    std::string output = "-";
    std::optional<std::string> svg;
    int workers = 1;

    int periods = 0;  // simulate / bifurcation / poincare
    int discard = 10;
    int samples_per_period = 16;
    double gamma_min = 0.01;
    double gamma_max = 0.30;
    double gamma_step = 0.001;

    std::vector<SweepCurve> curves;
    std::optional<std::string> log_path;
    std::optional<std::size_t> cell;
    bool allow_small_beta_quantum = false;
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("invalid value for " + key + ": '" + text + "'");
    return v;
}

inline long long parse_integer(const std::string& key, const std::string& text) {
    long long v = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("invalid value for " + key + ": '" + text + "'");
    return v;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline SweepCurve parse_curve(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("curve must be model:beta, got '" + text + "'");
    return {parse_model(text.substr(0, colon)), parse_double("--curve", text.substr(colon + 1))};
}

}  // namespace detail

inline const std::vector<std::string>& config_file_keys() {
    static const std::vector<std::string> keys = {"beta", "gamma", "g", "omega", "steps_per_period",
                                                  "sde_steps_per_period", "basis_tail_tolerance", "seed"};
    return keys;
}

/// Reads `key = value` lines; '#' starts a comment. Unknown keys are errors.
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(fmt::format("config line {}: expected key=value, got '{}'", lineno, line));
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        const auto& keys = config_file_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ConfigError(fmt::format("config line {}: unknown key '{}'", lineno, key));
        out[key] = value;
    }
    return out;
}

/// Parses CLI tokens (without the program name). Flags override values from
/// --config. The returned config has been validated.
inline RunConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"Driven dissipative Duffing oscillator: classical, semiclassical and quantum trajectories"};
    app.require_subcommand(1);
    app.name("qduffing");
    app.set_help_all_flag("--help-all", "help for every subcommand");

    RunConfig cfg;
    std::string model_name, config_path, svg_path, log_path;
    double beta = 0, gamma = 0, g = 0, omega = 0, tail = 0, delta0 = 0;
    int steps = 0, sde_steps = 0, threads = 0, periods = 0, realizations = 0, transient = 0, reset = 1;
    long long seed = 0;
    std::size_t cell = 0;
    std::vector<std::string> curve_texts;
    bool full = false;

    // Config-file keys and the flags that override them.
    const std::map<std::string, std::string> flags = {
        {"beta", "--beta"},
        {"gamma", "--gamma"},
        {"g", "--g"},
        {"omega", "--omega"},
        {"steps_per_period", "--steps-per-period"},
        {"sde_steps_per_period", "--sde-steps-per-period"},
        {"basis_tail_tolerance", "--tail-tolerance"},
        {"seed", "--seed"},
    };
    auto add_common = [&](CLI::App* sub, bool with_model) {
        if (with_model)
            sub->add_option("-m,--model", model_name, "classical, semiclassical or quantum")->required();
        sub->add_option("--config", config_path, "key=value file; flags take precedence");
        sub->add_option("--beta", beta, "effective Planck constant (default 0.25)");
        sub->add_option("--gamma", gamma, "damping rate (default 0.1)");
        sub->add_option("--g", g, "drive amplitude (default 0.3)");
        sub->add_option("--omega", omega, "drive frequency (default 1)");
        sub->add_option("--steps-per-period", steps, "RK4 steps per period (4096)");
        sub->add_option("--sde-steps-per-period", sde_steps, "SDE steps per period (16384)");
        sub->add_option("--tail-tolerance", tail, "basis growth threshold on tail mass (1e-6)");
        sub->add_option("--seed", seed, "base seed (0)");
        sub->add_option("-o,--output", cfg.output, "CSV path, '-' for stdout");
        sub->add_option("--svg", svg_path, "also write an SVG scatter plot");
        sub->add_option("--threads", threads, "worker budget (QDUFFING_THREADS, else all cores)");
    };
    auto add_protocol = [&](CLI::App* sub) {
        sub->add_option("--realizations", realizations, "noise realizations (8; 1 for classical)");
        sub->add_option("--transient", transient, "transient periods discarded (100)");
        sub->add_option("--reset", reset, "reset interval in periods (1)");
        sub->add_option("--delta0", delta0, "initial separation (1e-6/beta; 1e-4 quantum)");
        sub->add_flag("--full", full, "3000 periods for quantum runs too");
    };

    auto* sim = app.add_subcommand("simulate", "time-resolved trajectory");
    add_common(sim, true);
    sim->add_option("--periods", periods, "drive periods (10)");
    sim->add_option("--samples", cfg.samples_per_period, "rows per period (16)");

    auto* bif = app.add_subcommand("bifurcation", "stroboscopic x over a gamma grid");
    add_common(bif, true);
    bif->add_option("--periods", periods, "periods per gamma (200)");
    bif->add_option("--discard", cfg.discard, "transient periods (10)");
    bif->add_option("--gamma-min", cfg.gamma_min, "(0.01)");
    bif->add_option("--gamma-max", cfg.gamma_max, "(0.30)");
    bif->add_option("--gamma-step", cfg.gamma_step, "(0.001)");

    auto* poi = app.add_subcommand("poincare", "stroboscopic section (x, p)");
    add_common(poi, true);
    poi->add_option("--periods", periods, "periods (1000)");
    poi->add_option("--discard", cfg.discard, "transient periods (10)");

    auto* lya = app.add_subcommand("lyapunov", "largest Lyapunov exponent and complexity");
    add_common(lya, true);
    lya->add_option("--periods", periods, "periods (3000; 500 quantum)");
    add_protocol(lya);

    auto* swp = app.add_subcommand("sweep", "complexity K over gamma for several curves");
    add_common(swp, false);
    swp->add_option("--curve", curve_texts, "model:beta, repeatable")->required();
    swp->add_option("--periods", periods, "periods per cell (3000; 500 with quantum curves)");
    add_protocol(swp);
    swp->add_option("--gamma-min", cfg.gamma_min, "(0.01)");
    swp->add_option("--gamma-max", cfg.gamma_max, "(0.30)");
    swp->add_option("--gamma-step", cfg.gamma_step, "(0.01)");
    swp->add_option("--log", log_path, "JSON-lines status log (default: OUTPUT.log.jsonl)");
    swp->add_option("--cell", cell, "run a single grid cell (curve-major flat index)");
    swp->add_flag("--allow-small-beta-quantum", cfg.allow_small_beta_quantum, "permit quantum curves below beta 0.1");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() != 0) throw ConfigError(e.what());
        std::ostringstream out, err;
        app.exit(e, out, err);
        throw HelpRequested(out.str());
    }

    CLI::App* chosen = app.get_subcommands().front();
    auto given = [chosen](const std::string& flag) {
        const CLI::Option* o = chosen->get_option_no_throw(flag);
        return o != nullptr && o->count() > 0;
    };
    const std::string name = chosen->get_name();
    if (name == "simulate") cfg.command = Command::simulate;
    else if (name == "bifurcation") cfg.command = Command::bifurcation;
    else if (name == "poincare") cfg.command = Command::poincare;
    else if (name == "lyapunov") cfg.command = Command::lyapunov;
    else cfg.command = Command::sweep;

    if (cfg.command != Command::sweep) cfg.model = parse_model(model_name);

    // Layering: defaults, then the config file, then explicit flags.
    std::map<std::string, std::string> file;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        file = parse_config_text(buf.str());
    }
    auto pick_double = [&](const std::string& key, double flag_value, double& target) {
        if (given(flags.at(key))) target = flag_value;
        else if (auto it = file.find(key); it != file.end()) target = detail::parse_double(key, it->second);
    };
    auto pick_int = [&](const std::string& key, long long flag_value, auto& target) {
        using T = std::remove_reference_t<decltype(target)>;
        long long v;
        if (given(flags.at(key))) v = flag_value;
        else if (auto it = file.find(key); it != file.end()) v = detail::parse_integer(key, it->second);
        else return;
        if constexpr (std::is_unsigned_v<T>) {
            if (v < 0) throw ConfigError(key + " must be >= 0");
        }
        target = static_cast<T>(v);
    };
    pick_double("beta", beta, cfg.params.beta);
    pick_double("gamma", gamma, cfg.params.gamma);
    pick_double("g", g, cfg.params.g);
    pick_double("omega", omega, cfg.params.omega);
    pick_int("steps_per_period", steps, cfg.numerics.steps_per_period);
    pick_int("sde_steps_per_period", sde_steps, cfg.numerics.sde_steps_per_period);
    pick_double("basis_tail_tolerance", tail, cfg.numerics.basis_tail_tolerance);
    pick_int("seed", seed, cfg.seed);

    cfg.workers = resolve_workers(threads);
    if (!svg_path.empty()) cfg.svg = svg_path;
    if (!log_path.empty()) cfg.log_path = log_path;
    if (given("--cell")) cfg.cell = cell;
    for (const auto& c : curve_texts) cfg.curves.push_back(detail::parse_curve(c));

    const bool periods_given = given("--periods");
    switch (cfg.command) {
        case Command::simulate: cfg.periods = periods_given ? periods : 10; break;
        case Command::bifurcation: cfg.periods = periods_given ? periods : 200; break;
        case Command::poincare: cfg.periods = periods_given ? periods : 1000; break;
        case Command::lyapunov:
        case Command::sweep: {
            bool any_quantum = cfg.command == Command::lyapunov ? cfg.model == Model::quantum : false;
            bool all_classical = cfg.command == Command::lyapunov ? cfg.model == Model::classical : true;
            for (const auto& c : cfg.curves) {
                any_quantum = any_quantum || c.model == Model::quantum;
                all_classical = all_classical && c.model == Model::classical;
            }
            cfg.protocol.n_periods = periods_given ? periods : (any_quantum && !full ? 500 : 3000);
            // Without noise every realization follows the same attractor; one suffices.
            cfg.protocol.n_realizations =
                given("--realizations") ? realizations : (all_classical ? 1 : 8);
            if (given("--transient")) cfg.protocol.transient_periods = transient;
            cfg.protocol.reset_periods = reset;
            if (given("--delta0")) cfg.protocol.delta0 = delta0;
            break;
        }
    }
    if (cfg.command == Command::sweep && !given("--gamma-step")) cfg.gamma_step = 0.01;

    // Validation.
    const bool stochastic = cfg.command != Command::sweep && cfg.model != Model::classical;
    cfg.params.validate(stochastic);
    cfg.numerics.validate();
    if (cfg.periods < 0) throw ConfigError("--periods must be positive");
    if (cfg.command == Command::simulate) {
        if (cfg.periods < 1) throw ConfigError("--periods must be >= 1");
        if (cfg.samples_per_period < 1) throw ConfigError("--samples must be >= 1");
    }
    if (cfg.command == Command::bifurcation || cfg.command == Command::poincare) {
        if (cfg.discard < 0 || cfg.periods <= cfg.discard) throw ConfigError("--periods must exceed --discard >= 0");
    }
    if (cfg.command == Command::bifurcation || cfg.command == Command::sweep)
        (void)gamma_grid(cfg.gamma_min, cfg.gamma_max, cfg.gamma_step);
    if (cfg.command == Command::lyapunov || cfg.command == Command::sweep) cfg.protocol.validate();
    if (cfg.command == Command::lyapunov && cfg.svg) throw ConfigError("--svg is not available for lyapunov");
    if (cfg.command == Command::sweep) {
        for (const auto& c : cfg.curves) {
            if (!(c.beta > 0.0)) throw ConfigError("curve beta must be > 0");
            if (c.model != Model::classical && !(cfg.params.gamma >= 0.0))
                throw ConfigError("gamma must be >= 0");
        }
        if (cfg.gamma_min <= 0.0 &&
            std::any_of(cfg.curves.begin(), cfg.curves.end(), [](auto& c) { return c.model != Model::classical; }))
            throw ConfigError("stochastic curves need gamma_min > 0");
        const std::size_t total = cfg.curves.size() * gamma_grid(cfg.gamma_min, cfg.gamma_max, cfg.gamma_step).size();
        if (cfg.cell && *cfg.cell >= total)
            throw ConfigError(fmt::format("--cell {} out of range (grid has {} cells)", *cfg.cell, total));
    }
    return cfg;
}

/// Header block: everything needed to regenerate the file.
inline Metadata describe(const RunConfig& cfg) {
    Metadata m;
    m.emplace_back("qduffing_version", kVersion);
    m.emplace_back("command", std::string(to_string(cfg.command)));
    if (cfg.command != Command::sweep) m.emplace_back("model", std::string(to_string(cfg.model)));
    if (cfg.command != Command::sweep) m.emplace_back("beta", format_number(cfg.params.beta));
    if (cfg.command != Command::bifurcation && cfg.command != Command::sweep)
        m.emplace_back("gamma", format_number(cfg.params.gamma));
    m.emplace_back("g", format_number(cfg.params.g));
    m.emplace_back("omega", format_number(cfg.params.omega));
    m.emplace_back("steps_per_period", std::to_string(cfg.numerics.steps_per_period));
    m.emplace_back("sde_steps_per_period", std::to_string(cfg.numerics.sde_steps_per_period));
    m.emplace_back("basis_tail_tolerance", format_number(cfg.numerics.basis_tail_tolerance));
    m.emplace_back("seed", std::to_string(cfg.seed));
    switch (cfg.command) {
        case Command::simulate:
            m.emplace_back("periods", std::to_string(cfg.periods));
            m.emplace_back("samples_per_period", std::to_string(cfg.samples_per_period));
            if (cfg.model == Model::classical) {
                m.emplace_back("scheme", "rk4");
                m.emplace_back("dt", format_number(cfg.params.period() / cfg.numerics.steps_per_period));
            } else {
                m.emplace_back("scheme", cfg.model == Model::semiclassical ? "stochastic-heun"
                                                                           : "rk4-drift+euler-maruyama-noise");
                m.emplace_back("dt", format_number(cfg.params.period() / cfg.numerics.sde_steps_per_period));
            }
            break;
        case Command::bifurcation:
            m.emplace_back("gamma_min", format_number(cfg.gamma_min));
            m.emplace_back("gamma_max", format_number(cfg.gamma_max));
            m.emplace_back("gamma_step", format_number(cfg.gamma_step));
            [[fallthrough]];
        case Command::poincare:
            m.emplace_back("periods", std::to_string(cfg.periods));
            m.emplace_back("discard", std::to_string(cfg.discard));
            break;
        case Command::sweep: {
            std::string curves;
            for (const auto& c : cfg.curves)
                curves += (curves.empty() ? "" : " ") + std::string(to_string(c.model)) + ":" + format_number(c.beta);
            m.emplace_back("curves", curves);
            m.emplace_back("gamma_min", format_number(cfg.gamma_min));
            m.emplace_back("gamma_max", format_number(cfg.gamma_max));
            m.emplace_back("gamma_step", format_number(cfg.gamma_step));
            if (cfg.cell) m.emplace_back("cell", std::to_string(*cfg.cell));
            [[fallthrough]];
        }
        case Command::lyapunov:
            m.emplace_back("n_periods", std::to_string(cfg.protocol.n_periods));
            m.emplace_back("n_realizations", std::to_string(cfg.protocol.n_realizations));
            m.emplace_back("transient_periods", std::to_string(cfg.protocol.transient_periods));
            m.emplace_back("reset_periods", std::to_string(cfg.protocol.reset_periods));
            m.emplace_back("delta0", cfg.protocol.delta0 ? format_number(*cfg.protocol.delta0) : "engine-default");
            break;
    }
    return m;
}

namespace detail {

/// Writes to the named file, or stdout for "-".
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path == "-") {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream f = open_output(path);
    fn(f);
}

inline void write_svg_file(const std::string& path, const SvgPlot& plot) {
    with_output(path, [&](std::ostream& os) { write_svg(os, plot); });
}

inline std::string plot_title(const RunConfig& cfg) {
    return fmt::format("{} {}, beta={}, gamma={}, g={}", to_string(cfg.model), to_string(cfg.command),
                       format_number(cfg.params.beta), format_number(cfg.params.gamma), format_number(cfg.params.g));
}

inline void run_simulate(const RunConfig& cfg) {
    const Table table =
        simulate_trajectory(cfg.model, cfg.params, cfg.numerics, cfg.periods, cfg.samples_per_period, cfg.seed);
    with_output(cfg.output, [&](std::ostream& os) { write_table(os, describe(cfg), table); });
    if (cfg.svg) {
        SvgSeries s{"trajectory", {}, {}};
        for (const auto& r : table.rows) {
            s.x.push_back(r[1]);
            s.y.push_back(r[2]);
        }
        write_svg_file(*cfg.svg, {plot_title(cfg), table.columns[1], table.columns[2], {s}});
    }
}

inline void run_bifurcation(const RunConfig& cfg) {
    const BifurcationScan scan = bifurcation_scan(cfg.model, cfg.params, cfg.numerics, cfg.gamma_min, cfg.gamma_max,
                                                  cfg.gamma_step, cfg.periods, cfg.discard, cfg.seed, cfg.workers);
    Metadata meta = describe(cfg);
    for (std::size_t i = 0; i < scan.cells.size(); ++i)
        if (!scan.cells[i].ok())
            meta.emplace_back(fmt::format("failed_cell_{}", i),
                              fmt::format("gamma={} {}", format_number(scan.cells[i].gamma), scan.cells[i].error));
    with_output(cfg.output, [&](std::ostream& os) {
        CsvWriter w(os);
        w.header(meta);
        w.columns({"gamma", "period_index", "x"});
        for (const auto& cell : scan.cells)
            for (std::size_t k = 0; k < cell.x.size(); ++k)
                w.row({CsvCell(cell.gamma), CsvCell(static_cast<long long>(cfg.discard + 1 + k)), CsvCell(cell.x[k])});
    });
    if (cfg.svg) {
        SvgSeries s{"x", {}, {}};
        for (const auto& cell : scan.cells)
            for (double x : cell.x) {
                s.x.push_back(cell.gamma);
                s.y.push_back(x);
            }
        SvgPlot plot{fmt::format("{} bifurcation diagram, beta={}, g={}", to_string(cfg.model),
                                 format_number(cfg.params.beta), format_number(cfg.params.g)),
                     "gamma", "x(t = 2 pi n / omega)", {s}};
        plot.point_radius = 0.6;
        write_svg_file(*cfg.svg, plot);
    }
    for (const auto& cell : scan.cells)
        if (!cell.ok())
            std::cerr << nlohmann::json{{"event", "cell_failed"}, {"gamma", cell.gamma}, {"error", cell.error}}.dump()
                      << '\n';
}

inline void run_poincare(const RunConfig& cfg) {
    const PoincareSection sec =
        poincare_section(cfg.model, cfg.params, cfg.numerics, cfg.periods, cfg.discard, cfg.seed);
    with_output(cfg.output, [&](std::ostream& os) {
        CsvWriter w(os);
        w.header(describe(cfg));
        w.columns({"n", "x", "p"});
        for (const auto& pt : sec.points) w.row({CsvCell(pt.n), CsvCell(pt.x), CsvCell(pt.p)});
    });
    if (cfg.svg) {
        SvgSeries s{"section", {}, {}};
        for (const auto& pt : sec.points) {
            s.x.push_back(pt.x);
            s.y.push_back(pt.p);
        }
        write_svg_file(*cfg.svg, {plot_title(cfg), "x", "p", {s}});
    }
}

inline const std::vector<std::string>& lyapunov_columns() {
    static const std::vector<std::string> cols = {"model",   "beta",      "gamma",          "g",      "omega",
                                                  "lambda",  "K",         "stderr",         "n_periods",
                                                  "n_realizations", "delta0", "reset_interval", "base_seed"};
    return cols;
}

inline void run_lyapunov(const RunConfig& cfg) {
    const LyapunovEstimate est = with_engine(cfg.model, cfg.params, cfg.numerics, [&](const auto& e) {
        return lyapunov_estimate(e, cfg.protocol, cfg.seed, cfg.workers);
    });
    Metadata meta = describe(cfg);
    std::string seeds, lambdas;
    for (std::size_t r = 0; r < est.seeds.size(); ++r) {
        seeds += (r ? " " : "") + std::to_string(est.seeds[r]);
        lambdas += (r ? " " : "") + format_number(est.per_realization[r]);
    }
    meta.emplace_back("realization_seeds", seeds);
    meta.emplace_back("realization_lambda", lambdas);
    meta.emplace_back("resets", std::to_string(est.resets));
    meta.emplace_back("rekicks", std::to_string(est.rekicks));
    with_output(cfg.output, [&](std::ostream& os) {
        CsvWriter w(os);
        w.header(meta);
        w.columns(lyapunov_columns());
        w.row({CsvCell(std::string(to_string(est.model))), CsvCell(est.params.beta), CsvCell(est.params.gamma),
               CsvCell(est.params.g), CsvCell(est.params.omega), CsvCell(est.lambda), CsvCell(est.K),
               CsvCell(est.std_error), CsvCell(est.protocol.n_periods), CsvCell(est.protocol.n_realizations),
               CsvCell(est.delta0), CsvCell(est.reset_interval), CsvCell(static_cast<unsigned long long>(est.base_seed))});
    });
}

inline std::vector<CsvCell> kmap_row(const ComplexityCell& c) {
    if (c.ok()) {
        const auto& e = *c.estimate;
        return {CsvCell(std::string(to_string(c.curve.model))), CsvCell(c.curve.beta), CsvCell(c.gamma),
                CsvCell(e.lambda), CsvCell(e.K), CsvCell(e.std_error), CsvCell(static_cast<unsigned long long>(c.seed)),
                CsvCell("ok")};
    }
    return {CsvCell(std::string(to_string(c.curve.model))), CsvCell(c.curve.beta), CsvCell(c.gamma), CsvCell(""),
            CsvCell(""), CsvCell(""), CsvCell(static_cast<unsigned long long>(c.seed)), CsvCell("failed")};
}

inline nlohmann::json cell_status(const ComplexityCell& c) {
    nlohmann::json j{{"event", "cell"},          {"curve_index", c.curve_index}, {"gamma_index", c.gamma_index},
                     {"model", to_string(c.curve.model)}, {"beta", c.curve.beta}, {"gamma", c.gamma},
                     {"seed", c.seed},           {"status", c.ok() ? "ok" : "failed"}};
    if (c.ok()) {
        j["lambda"] = c.estimate->lambda;
        j["K"] = c.estimate->K;
        j["stderr"] = c.estimate->std_error;
    } else {
        j["error"] = c.error;
    }
    return j;
}

inline void run_sweep(const RunConfig& cfg) {
    const std::vector<double> gammas = gamma_grid(cfg.gamma_min, cfg.gamma_max, cfg.gamma_step);
    std::optional<std::ofstream> log;
    if (cfg.log_path) log = open_output(*cfg.log_path);
    else if (cfg.output != "-") log = open_output(cfg.output + ".log.jsonl");
    auto emit = [&](const nlohmann::json& j) {
        if (log) *log << j.dump() << '\n' << std::flush;
    };

    std::vector<ComplexityCell> cells;
    if (cfg.cell) {
        const std::size_t ci = *cfg.cell / gammas.size(), gi = *cfg.cell % gammas.size();
        if (cfg.curves[ci].model == Model::quantum && cfg.curves[ci].beta < kQuantumSweepMinBeta &&
            !cfg.allow_small_beta_quantum)
            throw ConfigError("quantum sweep curves need beta >= 0.1; use --allow-small-beta-quantum");
        cells.push_back(
            run_sweep_cell(cfg.curves[ci], ci, gammas[gi], gi, cfg.params, cfg.numerics, cfg.protocol, cfg.seed));
        emit(cell_status(cells.back()));
    } else {
        emit({{"event", "start"}, {"cells", cfg.curves.size() * gammas.size()}, {"workers", cfg.workers}});
        ComplexityMap map = k_vs_gamma_sweep(cfg.curves, gammas, cfg.params, cfg.numerics, cfg.protocol, cfg.seed,
                                             cfg.workers, cfg.allow_small_beta_quantum,
                                             [&](const ComplexityCell& c) { emit(cell_status(c)); });
        cells = std::move(map.cells);
    }
    std::size_t failed = 0;
    for (const auto& c : cells) failed += c.ok() ? 0 : 1;
    emit({{"event", "done"}, {"cells", cells.size()}, {"failed", failed}});

    with_output(cfg.output, [&](std::ostream& os) {
        CsvWriter w(os);
        w.header(describe(cfg));
        w.columns({"model", "beta", "gamma", "lambda", "K", "stderr", "seed", "status"});
        for (const auto& c : cells) w.row(kmap_row(c));
    });
    if (cfg.svg) {
        SvgPlot plot{"complexity K = lambda + gamma", "gamma", "K", {}};
        plot.point_radius = 2.5;
        for (std::size_t ci = 0; ci < cfg.curves.size(); ++ci) {
            SvgSeries s{fmt::format("{} beta={}", to_string(cfg.curves[ci].model), format_number(cfg.curves[ci].beta)),
                        {}, {}};
            for (const auto& c : cells)
                if (c.curve_index == ci && c.ok()) {
                    s.x.push_back(c.gamma);
                    s.y.push_back(c.estimate->K);
                }
            plot.series.push_back(std::move(s));
        }
        SvgSeries diag{"K = gamma", gammas, gammas};
        plot.series.push_back(std::move(diag));
        write_svg_file(*cfg.svg, plot);
    }
}

}  // namespace detail

/// Executes a validated config. Errors propagate as exceptions; see run_cli
/// for the exit-status mapping.
inline void run(const RunConfig& cfg) {
    switch (cfg.command) {
        case Command::simulate: detail::run_simulate(cfg); break;
        case Command::bifurcation: detail::run_bifurcation(cfg); break;
        case Command::poincare: detail::run_poincare(cfg); break;
        case Command::lyapunov: detail::run_lyapunov(cfg); break;
        case Command::sweep: detail::run_sweep(cfg); break;
    }
}

/// Exit status: 0 success, 1 runtime failure, 2 configuration error. Failures
/// are reported as one JSON object on `err`.
inline int run_cli(const std::vector<std::string>& args, std::ostream& err = std::cerr) {
    auto report = [&](const char* kind, const std::string& message, std::optional<double> t = std::nullopt) {
        nlohmann::json j{{"status", "error"}, {"kind", kind}, {"message", message}};
        if (t) j["time"] = *t;
        err << j.dump() << '\n';
    };
    try {
        run(parse_config(args));
        return 0;
    } catch (const HelpRequested& h) {
        std::cout << h.what();
        return 0;
    } catch (const ConfigError& e) {
        report("config", e.what());
        return 2;
    } catch (const TrajectoryEscaped& e) {
        report("trajectory_escaped", e.what(), e.time());
        return 1;
    } catch (const CapacityError& e) {
        report("capacity", e.what());
        return 1;
    } catch (const std::exception& e) {
        report("runtime", e.what());
        return 1;
    }
}

}  // namespace qduffing
