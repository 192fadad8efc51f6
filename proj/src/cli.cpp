#include "optomech/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "optomech/config.hpp"
#include "optomech/csv.hpp"
#include "optomech/errors.hpp"
#include "optomech/fock.hpp"
#include "optomech/langevin.hpp"
#include "optomech/parallel.hpp"
#include "optomech/spectra.hpp"
#include "optomech/steady.hpp"
#include "optomech/timedomain.hpp"

namespace optomech::cli {

namespace {

CubicConvention parse_convention(const std::string& s) {
    if (s == "mean_field") return CubicConvention::mean_field;
    if (s == "printed") return CubicConvention::printed;
    throw ValidationError("convention must be 'mean_field' or 'printed'");
}

QuadraticBranch parse_branch(const std::string& s) {
    if (s == "off_resonant") return QuadraticBranch::off_resonant;
    if (s == "resonant") return QuadraticBranch::resonant;
    throw ValidationError("branch must be 'off_resonant' or 'resonant'");
}

PhononNoise parse_noise(const std::string& s) {
    if (s == "thermal") return PhononNoise::thermal;
    if (s == "coherent") return PhononNoise::coherent;
    throw ValidationError("phonon_noise must be 'thermal' or 'coherent'");
}

NoiseOrdering parse_ordering(const std::string& s) {
    if (s == "quantum") return NoiseOrdering::quantum;
    if (s == "symmetrized") return NoiseOrdering::symmetrized;
    throw ValidationError("noise_ordering must be 'quantum' or 'symmetrized'");
}

std::string yes_no(bool b) { return b ? "1" : "0"; }

struct Context {
    RunConfig cfg;
    std::string command;
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;
    std::unique_ptr<std::ofstream> file;

    CubicConvention convention() const { return parse_convention(cfg.get_string("convention", "mean_field")); }
    QuadraticBranch branch() const { return parse_branch(cfg.get_string("branch", "off_resonant")); }
    PhononNoise noise() const { return parse_noise(cfg.get_string("phonon_noise", "thermal")); }
    NoiseOrdering ordering() const { return parse_ordering(cfg.get_string("noise_ordering", "quantum")); }

    std::ostream& open(const std::string& key = "output") {
        const std::string path = cfg.get_string(key, "-");
        if (path == "-") return *out;
        file = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
        if (!*file) throw ValidationError("cannot open output file '" + path + "'");
        return *file;
    }
    void header(std::ostream& os) const { write_header(os, command, cfg.resolved_text()); }
};

SteadyState solve_model(const Context& ctx, const SystemParams& p, cplx alpha) {
    const std::string model = ctx.cfg.get_string("model", "cubic");
    if (model == "cubic") return solve_cubic_steady(p, alpha, ctx.convention());
    if (model == "quadratic") return solve_quadratic_steady(p, alpha, ctx.branch());
    throw ValidationError("model must be 'cubic' or 'quadratic'");
}

int cmd_steady(Context& ctx) {
    const SystemParams& p = ctx.cfg.params;
    if (ctx.cfg.get("alpha_min") || ctx.cfg.get("alpha_max") || ctx.cfg.get("alpha_points")) {
        const double lo = ctx.cfg.get_double("alpha_min", 1.0);
        const double hi = ctx.cfg.get_double("alpha_max", 10.0);
        const auto n = static_cast<int>(ctx.cfg.get_int("alpha_points", 21));
        const auto alphas = geometric_grid(lo, hi, n);
        const std::string model = ctx.cfg.get_string("model", "cubic");
        PumpSweep sw;
        if (model == "cubic") sw = sweep_cubic(p, alphas, ctx.convention());
        else if (model == "quadratic") sw = sweep_quadratic(p, alphas, ctx.branch());
        else throw ValidationError("model must be 'cubic' or 'quadratic'");
        auto& os = ctx.open();
        ctx.header(os);
        write_row(os, {"alpha", "n_bar", "m_bar", "psi", "f", "bistable", "residual", "psi_exponent_fit"});
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            const auto& s = sw.states[i];
            write_row(os, {format_double(alphas[i]), format_double(s.n_bar), format_double(s.m_bar),
                           format_double(s.psi), format_double(s.f), yes_no(s.bistable), format_double(s.residual),
                           format_double(sw.psi_exponent)});
        }
        return 0;
    }
    const auto s = solve_model(ctx, p, p.alpha);
    auto& os = ctx.open();
    ctx.header(os);
    write_row(os, {"quantity", "value"});
    write_row(os, {"regime", s.regime});
    write_row(os, {"n_bar", format_double(s.n_bar)});
    write_row(os, {"m_bar", format_double(s.m_bar)});
    write_row(os, {"a_bar_re", format_double(s.a_bar.real())});
    write_row(os, {"a_bar_im", format_double(s.a_bar.imag())});
    write_row(os, {"b_bar_re", format_double(s.b_bar.real())});
    write_row(os, {"b_bar_im", format_double(s.b_bar.imag())});
    write_row(os, {"d_bar_re", format_double(s.d_bar.real())});
    write_row(os, {"d_bar_im", format_double(s.d_bar.imag())});
    write_row(os, {"f", format_double(s.f)});
    write_row(os, {"psi", format_double(s.psi)});
    write_row(os, {"bistable", yes_no(s.bistable)});
    write_row(os, {"residual", format_double(s.residual)});
    for (std::size_t i = 0; i < s.all_real_roots.size(); ++i) {
        write_row(os, {"root_" + std::to_string(i), format_double(s.all_real_roots[i])});
    }
    return 0;
}

LinearLangevinSystem make_system(const Context& ctx, const std::string& fallback = "first_order") {
    return build_system(ctx.cfg.get_string("basis", fallback), ctx.cfg.params, ctx.convention(), ctx.branch(),
                        ctx.noise());
}

int cmd_system(Context& ctx) {
    const auto sys = make_system(ctx);
    auto& os = ctx.open();
    ctx.header(os);
    write_system_csv(os, sys);
    const auto st = stability(sys);
    *ctx.err << "system " << sys.name << ": dim " << sys.dim() << ", max Re(eig M) = " << format_double(st.max_real)
             << (st.stable ? " (stable)" : " (unstable)") << "\n";
    for (const auto& w : sys.warnings) *ctx.err << "warning: " << w << "\n";
    return 0;
}

int cmd_spectrum(Context& ctx) {
    const SystemParams& p = ctx.cfg.params;
    const auto sys = make_system(ctx);
    std::vector<double> grid;
    const std::string kind = ctx.cfg.get_string("grid", "linear");
    if (kind == "linear") {
        const double lo = ctx.cfg.get_double("w_min", -2.0 * p.Omega);
        const double hi = ctx.cfg.get_double("w_max", 2.0 * p.Omega);
        const auto n = ctx.cfg.get_int("points", 4001);
        if (n < 2 || !(hi > lo)) throw ValidationError("spectrum grid needs points >= 2 and w_max > w_min");
        for (long long i = 0; i < n; ++i) grid.push_back(lo + (hi - lo) * static_cast<double>(i) / (n - 1));
    } else if (kind == "sideband") {
        grid = sideband_grid(sys, p.Omega, static_cast<int>(ctx.cfg.get_int("dense_points", 10000)));
    } else {
        throw ValidationError("grid must be 'linear' or 'sideband'");
    }
    const auto psd = output_psd(sys, grid, ctx.ordering());
    auto& os = ctx.open();
    ctx.header(os);
    write_row(os, {"w", "S_AA"});
    for (std::size_t i = 0; i < grid.size(); ++i) write_row(os, {format_double(grid[i]), format_double(psd.S_AA[i])});
    return 0;
}

SemiclassicalOptions semiclassical_options(const Context& ctx) {
    const SystemParams& p = ctx.cfg.params;
    SemiclassicalOptions o;
    o.dt = ctx.cfg.get_double("dt", max_semiclassical_dt(p));
    o.T = ctx.cfg.get_double("T", 200.0 * 2.0 * 3.141592653589793 / p.Omega);
    o.seed = static_cast<std::uint64_t>(ctx.cfg.get_int("seed", 1));
    o.burn_in = ctx.cfg.get_double("burn_in", 0.0);
    o.stride = static_cast<int>(ctx.cfg.get_int("stride", 1));
    o.convention = ctx.convention();
    return o;
}

int cmd_sideband(Context& ctx) {
    const SystemParams& p = ctx.cfg.params;
    if (p.kappa >= p.Omega) {
        throw NotSidebandResolvedError("cavity linewidth kappa >= Omega: not sideband resolved");
    }
    const std::string source = ctx.cfg.get_string("source", "model");
    SidebandResult res;
    if (source == "model") {
        const auto sys = make_system(ctx);
        const auto grid = sideband_grid(sys, p.Omega, static_cast<int>(ctx.cfg.get_int("dense_points", 10000)));
        auto psd = output_psd(sys, grid, ctx.ordering());
        res = sideband_analysis(psd, p.Omega, p.kappa);
    } else if (source == "simulation") {
        const auto o = semiclassical_options(ctx);
        const auto traj = static_cast<int>(ctx.cfg.get_int("trajectories", 4));
        const auto seg = static_cast<int>(ctx.cfg.get_int("segment", 65536));
        const auto w = semiclassical_output_psd(p, o, traj, seg, ctx.cfg.get_double("overlap", 0.5));
        res = sideband_analysis(w.w, w.psd, p.Omega, p.kappa);
    } else {
        throw ValidationError("source must be 'model' or 'simulation'");
    }
    const auto st = solve_cubic_steady(p, p.alpha, ctx.convention());
    const auto est = estimate_inequivalence(p, st.n_bar);
    std::string warnings;
    for (const auto& w : est.warnings) warnings += (warnings.empty() ? "" : "; ") + w;
    auto& os = ctx.open();
    ctx.header(os);
    write_row(os, {"delta_r", "delta_b", "delta_Omega", "estimate", "estimate_normalized", "ratio", "warnings"});
    const double ratio = est.delta_Omega != 0.0 ? res.delta_Omega / est.delta_Omega : 0.0;
    write_row(os, {format_double(res.delta_r), format_double(res.delta_b), format_double(res.delta_Omega),
                   format_double(est.delta_Omega), format_double(est.normalized), format_double(ratio),
                   "\"" + warnings + "\""});
    return 0;
}

void write_psd(Context& ctx, const WelchResult& w) {
    auto& os = ctx.open("psd_output");
    ctx.header(os);
    write_row(os, {"w", "psd"});
    for (std::size_t i = 0; i < w.w.size(); ++i) write_row(os, {format_double(w.w[i]), format_double(w.psd[i])});
    ctx.file.reset();
}

int cmd_simulate(Context& ctx) {
    const SystemParams& p = ctx.cfg.params;
    const std::string engine = ctx.cfg.get_string("engine", "semiclassical");
    const auto traj = static_cast<int>(ctx.cfg.get_int("trajectories", 1));
    const auto seg = static_cast<int>(ctx.cfg.get_int("segment", 4096));
    const double overlap = ctx.cfg.get_double("overlap", 0.5);
    const std::uint64_t seed = static_cast<std::uint64_t>(ctx.cfg.get_int("seed", 1));
    Trajectory tr;
    WelchResult psd;
    const bool want_psd = ctx.cfg.get("psd_output").has_value();
    if (engine == "semiclassical") {
        auto o = semiclassical_options(ctx);
        if (want_psd) psd = semiclassical_output_psd(p, o, traj, seg, overlap);
        o.seed = derive_seed(seed, 0);
        tr = integrate_semiclassical(p, o);
    } else if (engine == "linear") {
        const auto sys = make_system(ctx);
        LinearSimOptions o;
        o.dt = ctx.cfg.get_double("dt", 0.05 / p.Omega);
        o.T = ctx.cfg.get_double("T", 200.0 * 2.0 * 3.141592653589793 / p.Omega);
        o.seed = seed;
        o.burn_in = ctx.cfg.get_double("burn_in", 0.0);
        if (want_psd) psd = simulated_output_psd(sys, o, traj, seg, overlap);
        o.seed = derive_seed(seed, 0);
        tr = simulate_linear(sys, o);
    } else {
        throw ValidationError("engine must be 'semiclassical' or 'linear'");
    }
    if (want_psd) write_psd(ctx, psd);
    auto& os = ctx.open();
    ctx.header(os);
    std::vector<std::string> cols{"t"};
    for (const auto& l : tr.labels) {
        cols.push_back(l + "_re");
        cols.push_back(l + "_im");
    }
    write_row(os, cols);
    std::vector<std::string> row(cols.size());
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        row[0] = format_double(tr.t[k]);
        for (std::size_t s = 0; s < tr.series.size(); ++s) {
            row[1 + 2 * s] = format_double(tr.series[s][k].real());
            row[2 + 2 * s] = format_double(tr.series[s][k].imag());
        }
        write_row(os, row);
    }
    return 0;
}

bool expected_closed(const std::string& basis) { return basis != "reduced_second_order"; }

int cmd_verify(Context& ctx) {
    const auto ntr = static_cast<int>(ctx.cfg.get_int("truncation", 14));
    const auto margin = static_cast<int>(ctx.cfg.get_int("margin", 4));
    const std::string check = ctx.cfg.get_string("check", "closure");
    const auto rep = fock::build_mode_ops(ntr, ntr);
    auto& os = ctx.open();
    ctx.header(os);
    std::ostream& err = *ctx.err;
    bool ok = true;
    if (check == "closure") {
        const double tol = ctx.cfg.get_double("tolerance", 1e-10);
        const std::string basis = ctx.cfg.get_string("basis", "all");
        std::vector<std::string> bases = basis == "all" ? fock::known_bases() : std::vector<std::string>{basis};
        write_row(os, {"basis", "left", "right", "residual", "expected", "expected_residual"});
        for (const auto& b : bases) {
            const auto r = fock::verify_basis_closure(rep, b, tol, margin);
            for (const auto& pr : r.pairs) {
                write_row(os, {b, pr.left, pr.right, format_double(pr.residual), pr.has_expected ? pr.expected : "",
                               pr.has_expected ? format_double(pr.expected_residual) : ""});
            }
            const bool match = r.closed == expected_closed(b);
            ok = ok && match;
            err << "basis " << b << " (truncation " << ntr << ", " << r.safe_columns << " safe states): "
                << (r.closed ? "CLOSED" : "NOT CLOSED") << ", max residual " << format_double(r.max_residual)
                << "; expected " << (expected_closed(b) ? "closed" : "not closed") << " -> "
                << (match ? "pass" : "FAIL") << "\n";
            for (const auto& pr : r.pairs) {
                if (!pr.has_expected) continue;
                err << "  [" << pr.left << ", " << pr.right << "] = " << pr.expected
                    << "  residual " << format_double(pr.expected_residual) << "\n";
            }
        }
    } else if (check == "drift") {
        const double tol = ctx.cfg.get_double("tolerance", 1e-9);
        const std::string basis = ctx.cfg.get_string("basis", "second_order");
        fock::DriftEquivalenceReport r;
        if (basis == "second_order") r = fock::verify_second_order_drift(rep, ctx.cfg.params, tol, margin);
        else if (basis == "quadratic") r = fock::verify_quadratic_drift(rep, ctx.cfg.params, tol, margin);
        else throw ValidationError("drift check basis must be 'second_order' or 'quadratic'");
        write_row(os, {"system", "row", "residual_left", "residual_right", "drift_norm", "pass", "placement"});
        for (const auto& row : r.rows) {
            write_row(os, {r.name, row.row_label, format_double(row.residual_left), format_double(row.residual_right),
                           format_double(row.drift_norm), yes_no(row.pass),
                           row.used == fock::Placement::left ? "left" : "right"});
            err << r.name << " row " << row.row_label << ": left " << format_double(row.residual_left) << ", right "
                << format_double(row.residual_right) << (row.pass ? " pass" : " FAIL") << "\n";
        }
        ok = r.pass;
    } else if (check == "phase") {
        const double tol = ctx.cfg.get_double("tolerance", 1e-10);
        const auto [rf, rn] = fock::verify_phase_map(rep, margin);
        write_row(os, {"field_residual", "number_residual"});
        write_row(os, {format_double(rf), format_double(rn)});
        ok = rf < tol && rn < tol;
        err << "phase map: field residual " << format_double(rf) << ", number residual " << format_double(rn)
            << (ok ? " pass" : " FAIL") << "\n";
    } else {
        throw ValidationError("check must be 'closure', 'drift' or 'phase'");
    }
    return ok ? 0 : 2;
}

int cmd_sweep(Context& ctx) {
    const SystemParams base = ctx.cfg.params;
    const std::string key = ctx.cfg.get_string("sweep_key", "alpha");
    const double lo = ctx.cfg.get_double("sweep_from", get_param(base, key));
    const double hi = ctx.cfg.get_double("sweep_to", lo);
    const auto n = static_cast<int>(ctx.cfg.get_int("sweep_points", 11));
    const std::string scale = ctx.cfg.get_string("sweep_scale", "linear");
    if (n < 1) throw ValidationError("sweep_points must be positive");
    std::vector<double> values;
    if (scale == "log") {
        values = geometric_grid(lo, hi, n);
    } else if (scale == "linear") {
        for (int i = 0; i < n; ++i) values.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    } else {
        throw ValidationError("sweep_scale must be 'linear' or 'log'");
    }
    const std::string model = ctx.cfg.get_string("model", "cubic");
    std::vector<std::vector<std::string>> rows(values.size());
    parallel_for(values.size(), [&](std::size_t i) {
        SystemParams p = base;
        std::vector<std::string>& row = rows[i];
        row = {format_double(values[i])};
        try {
            set_param(p, key, values[i]);
            const auto s = solve_model(ctx, p, p.alpha);
            const auto sys = model == "cubic" ? build_first_order(p, s, ctx.noise()) : build_quadratic(p, s, ctx.noise());
            const auto st = stability(sys);
            const auto est = estimate_inequivalence(p, s.n_bar);
            for (const auto& v : {s.n_bar, s.m_bar, s.psi, s.f}) row.push_back(format_double(v));
            row.push_back(yes_no(s.bistable));
            row.push_back(format_double(st.max_real));
            row.push_back(yes_no(st.stable));
            row.push_back(format_double(est.delta_Omega));
            row.push_back("");
        } catch (const Error& e) {
            std::string msg = e.what();
            std::replace(msg.begin(), msg.end(), ',', ';');
            row.resize(1);
            for (int k = 0; k < 8; ++k) row.emplace_back("");
            row.push_back("\"" + msg + "\"");
        }
    });
    auto& os = ctx.open();
    ctx.header(os);
    write_row(os, {key, "n_bar", "m_bar", "psi", "f", "bistable", "max_re_eig", "stable", "delta_Omega_estimate",
                   "error"});
    for (const auto& r : rows) write_row(os, r);
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Linearized quantum Langevin systems of standard and quadratic cavity optomechanics", "optomech"};
    app.set_version_flag("--version", OPTOMECH_VERSION);
    app.require_subcommand(1, 1);
    app.fallthrough();
    std::string config_path;
    std::map<std::string, std::string> overrides;
    app.add_option("-c,--config", config_path, "Configuration file (default: $OPTOMECH_CONFIG)");
    auto opt = [&overrides](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
        sub->add_option_function<std::string>(flag, [&overrides, key](const std::string& v) { overrides[key] = v; },
                                              help);
    };
    opt(&app, "-o,--output", "output", "Output CSV path ('-' for stdout)");

    auto* steady = app.add_subcommand("steady", "Solve the steady-state mean fields");
    opt(steady, "--model", "model", "cubic | quadratic");
    opt(steady, "--convention", "convention", "mean_field | printed");
    opt(steady, "--branch", "branch", "off_resonant | resonant");
    std::string sweep_arg;
    steady->add_option("--sweep", sweep_arg, "Pump sweep alpha=lo:hi:n (geometric)");

    auto* system = app.add_subcommand("system", "Dump a linearized Langevin system");
    opt(system, "--basis", "basis", "first_order | second_order | minimal_fourth | quadratic | quadratic_perturbed");
    opt(system, "--phonon-noise", "phonon_noise", "thermal | coherent");
    opt(system, "--branch", "branch", "off_resonant | resonant");

    auto* spectrum = app.add_subcommand("spectrum", "Output spectral density");
    opt(spectrum, "--basis", "basis", "system kind");
    opt(spectrum, "--grid", "grid", "linear | sideband");
    opt(spectrum, "--w-min", "w_min", "lower w (resolvent frequency, probe detuning is -w)");
    opt(spectrum, "--w-max", "w_max", "upper w");
    opt(spectrum, "--points", "points", "grid points");
    opt(spectrum, "--noise-ordering", "noise_ordering", "quantum | symmetrized");

    auto* sideband = app.add_subcommand("sideband", "Sideband peak detunings and inequivalence");
    opt(sideband, "--basis", "basis", "system kind for the model spectrum");
    opt(sideband, "--source", "source", "model | simulation");
    opt(sideband, "--T", "T", "simulated time per trajectory");
    opt(sideband, "--dt", "dt", "time step");
    opt(sideband, "--seed", "seed", "master seed");
    opt(sideband, "--trajectories", "trajectories", "trajectory count");
    opt(sideband, "--segment", "segment", "Welch segment length");
    opt(sideband, "--burn-in", "burn_in", "discarded time before recording");

    auto* simulate = app.add_subcommand("simulate", "Time-domain simulation");
    opt(simulate, "--engine", "engine", "semiclassical | linear");
    opt(simulate, "--basis", "basis", "system kind for the linear engine");
    opt(simulate, "--T", "T", "simulated time per trajectory");
    opt(simulate, "--dt", "dt", "time step");
    opt(simulate, "--seed", "seed", "master seed");
    opt(simulate, "--trajectories", "trajectories", "trajectories averaged into the PSD");
    opt(simulate, "--segment", "segment", "Welch segment length");
    opt(simulate, "--burn-in", "burn_in", "discarded time before recording");
    opt(simulate, "--stride", "stride", "record every n-th step");
    opt(simulate, "--psd-output", "psd_output", "averaged PSD CSV path");

    auto* verify = app.add_subcommand("verify-algebra", "Truncated Fock-space checks of the operator algebra");
    opt(verify, "--check", "check", "closure | drift | phase");
    opt(verify, "--basis", "basis", "basis name, 'all', or second_order | quadratic for drift");
    opt(verify, "--truncation", "truncation", "levels per mode");
    opt(verify, "--margin", "margin", "levels excluded below the truncation edge");
    opt(verify, "--tolerance", "tolerance", "residual tolerance");

    auto* sweep = app.add_subcommand("sweep", "Parameter sweep of steady state and stability");
    opt(sweep, "--key", "sweep_key", "parameter to sweep");
    opt(sweep, "--from", "sweep_from", "first value");
    opt(sweep, "--to", "sweep_to", "last value");
    opt(sweep, "--points", "sweep_points", "number of values");
    opt(sweep, "--scale", "sweep_scale", "linear | log");
    opt(sweep, "--model", "model", "cubic | quadratic");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << OPTOMECH_VERSION << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        Context ctx;
        ctx.out = &out;
        ctx.err = &err;
        ctx.command = app.get_subcommands().front()->get_name();
        if (config_path.empty()) {
            if (const char* env = std::getenv("OPTOMECH_CONFIG")) config_path = env;
        }
        ctx.cfg = config_path.empty() ? parse_config("") : load_config(config_path);
        if (!sweep_arg.empty()) {
            const auto eq = sweep_arg.find('=');
            const std::string var = sweep_arg.substr(0, eq == std::string::npos ? 0 : eq);
            std::vector<std::string> parts;
            std::stringstream ss(eq == std::string::npos ? "" : sweep_arg.substr(eq + 1));
            for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
            if (var != "alpha" || parts.size() != 3) throw ValidationError("--sweep expects alpha=lo:hi:n");
            overrides["alpha_min"] = parts[0];
            overrides["alpha_max"] = parts[1];
            overrides["alpha_points"] = parts[2];
        }
        for (auto [k, v] : overrides) {
            if ((k == "output" || k == "psd_output") && v != "-") {
                v = std::filesystem::absolute(v).lexically_normal().string();
            }
            ctx.cfg.run[k] = v;
        }
        const std::string& c = ctx.command;
        if (c == "steady") return cmd_steady(ctx);
        if (c == "system") return cmd_system(ctx);
        if (c == "spectrum") return cmd_spectrum(ctx);
        if (c == "sideband") return cmd_sideband(ctx);
        if (c == "simulate") return cmd_simulate(ctx);
        if (c == "verify-algebra") return cmd_verify(ctx);
        if (c == "sweep") return cmd_sweep(ctx);
        throw ValidationError("unknown subcommand '" + c + "'");
    } catch (const PhysicsError& e) {
        err << "physics error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace optomech::cli
