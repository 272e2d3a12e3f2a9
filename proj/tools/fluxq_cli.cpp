#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "fluxq/fluxq.hpp"

using namespace fluxq;
namespace fs = std::filesystem;

namespace {

struct Range {
    double lo = 0, hi = 0;
    int n = 0;
    std::vector<double> values() const {
        std::vector<double> v;
        for (int i = 0; i < n; ++i) v.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
        return v;
    }
};

// lo:hi:n
Range parse_range(const std::string& s, const std::string& flag) {
    Range r;
    char c1 = 0, c2 = 0;
    std::istringstream in(s);
    if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.n) || c1 != ':' || c2 != ':' || !in.eof())
        throw ValidationError(flag + " expects lo:hi:n, got '" + s + "'");
    if (r.n < 1) throw ValidationError(flag + " is empty");
    if (r.n > 1 && !(r.hi > r.lo)) throw ValidationError(flag + " needs hi > lo");
    return r;
}

struct Common {
    std::string config;
    std::string out;
    SystemParams sys;
    std::vector<std::string> outputs;

    void load() {
        sys = config.empty() ? calibrated_device() : load_system_params_file(config);
        if (out.empty()) throw ValidationError("--out is required");
    }
    // only after validation
    std::string path(const std::string& name) {
        fs::create_directories(out);
        outputs.push_back(name);
        return (fs::path(out) / name).string();
    }
    void manifest(const std::string& command, const nlohmann::json& sweep) const {
        RunManifest m{command, config, sweep, outputs, 0, utc_timestamp()};
        write_manifest(out, m);
    }
    std::string header_line(const std::string& command) const {
        return "run " + command + " manifest " + (fs::path(out) / "manifest.json").string();
    }
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "device parameter JSON (defaults to the calibrated device)");
    app->add_option("--out", c.out, "run directory")->required();
}

// Effective-gap operating points for both qubits.
std::pair<double, double> operating_point(const SystemParams& sys, double delta1, double delta2) {
    return {find_cjj_for_effective_delta(sys, 0, delta1), find_cjj_for_effective_delta(sys, 1, delta2)};
}

// spectrum ----------------------------------------------------------------

struct SpectrumArgs {
    Common c;
    std::string cjj1_range, m12_range;
    double delta1 = 1.5, delta2 = 1.5, bias = 0, m12 = 0;
    int lines = 6, levels = 10;
    std::optional<int> gap_level;
};

int cmd_spectrum(SpectrumArgs& a) {
    a.c.load();
    if (a.cjj1_range.empty() == a.m12_range.empty())
        throw ValidationError("give exactly one of --cjj1-range, --m12-range");
    const bool over_cjj = !a.cjj1_range.empty();
    const Range r = over_cjj ? parse_range(a.cjj1_range, "--cjj1-range") : parse_range(a.m12_range, "--m12-range");
    if (a.lines < 1 || a.levels < 2) throw ValidationError("--lines and --levels must be positive");
    SolveOptions opt;
    opt.levels = a.levels;
    opt.k = a.lines + 1;
    const int gl = a.gap_level.value_or(over_cjj ? 1 : 2);
    if (gl < 0 || gl + 1 > opt.k - 1) throw ValidationError("--gap-level outside the computed levels");
    opt.k = std::max(opt.k, gl + 2);

    double cjj1 = 0, cjj2 = 0;
    if (over_cjj)
        cjj2 = find_cjj_for_effective_delta(a.c.sys, 1, a.delta2, opt);
    else
        std::tie(cjj1, cjj2) = operating_point(a.c.sys, a.delta1, a.delta2);
    const double q = a.bias * 1e-3;
    const auto xs = r.values();
    std::function<std::pair<std::vector<double>, double>(size_t)> f = [&](size_t i) {
        Controls ctl{over_cjj ? xs[i] : cjj1, cjj2, q, q, over_cjj ? a.m12 * unit::pH : xs[i] * unit::pH};
        const auto s = solve_coupled(a.c.sys, ctl, opt);
        auto l = transition_lines(s.spectrum, LineSource::ground);
        l.resize(a.lines, NAN);
        return std::make_pair(l, level_gap(s.spectrum, gl));
    };
    const auto res = parallel_map(xs.size(), f);

    CsvTable t;
    t.comments.push_back(a.c.header_line("spectrum"));
    t.header.push_back(over_cjj ? "cjj1_Phi0" : "m12_pH");
    for (int k = 1; k <= a.lines; ++k) t.header.push_back("line" + std::to_string(k) + "_GHz");
    t.header.push_back("gap_GHz");
    std::vector<double> gaps;
    for (size_t i = 0; i < xs.size(); ++i) {
        std::vector<double> row{xs[i]};
        row.insert(row.end(), res[i].first.begin(), res[i].first.end());
        row.push_back(res[i].second);
        gaps.push_back(res[i].second);
        t.rows.push_back(row);
    }
    write_csv(a.c.path("spectrum.csv"), t);
    nlohmann::json summary{{"axis", over_cjj ? "cjj1_Phi0" : "m12_pH"},
                           {"gap_levels", {gl, gl + 1}},
                           {"cjj1_Phi0", over_cjj ? nlohmann::json() : nlohmann::json(cjj1)},
                           {"cjj2_Phi0", cjj2}};
    if (xs.size() >= 3) {
        const auto ac = anticrossing(xs, gaps);
        summary["gap_GHz"] = ac.gap;
        summary["location"] = ac.location;
    } else {
        const auto it = std::min_element(gaps.begin(), gaps.end());
        summary["gap_GHz"] = *it;
        summary["location"] = xs[it - gaps.begin()];
    }
    write_json(a.c.path("summary.json"), summary);
    a.c.manifest("spectrum", {{"range", over_cjj ? a.cjj1_range : a.m12_range},
                              {"delta1_GHz", a.delta1},
                              {"delta2_GHz", a.delta2},
                              {"bias_mPhi0", a.bias},
                              {"m12_pH", a.m12}});
    std::cout << "gap " << format_number(summary["gap_GHz"].get<double>()) << " GHz at "
              << format_number(summary["location"].get<double>()) << "\n";
    return 0;
}

// reduce / stoq-map -------------------------------------------------------

struct SweepArgs {
    Common c;
    std::string cjj_range, m12_range;
    double delta = 1.5, bias = 0, m12 = 0;
    std::optional<double> cjj2;
    double tol = default_stoq_tol;
};

struct Sweep {
    bool over_cjj = false;
    std::vector<double> xs;
    std::function<Controls(double)> controls;
};

Sweep make_sweep(SweepArgs& a) {
    a.c.load();
    if (a.cjj_range.empty() == a.m12_range.empty()) throw ValidationError("give exactly one of --cjj-range, --m12-range");
    Sweep s;
    s.over_cjj = !a.cjj_range.empty();
    s.xs = (s.over_cjj ? parse_range(a.cjj_range, "--cjj-range") : parse_range(a.m12_range, "--m12-range")).values();
    const double q = a.bias * 1e-3;
    if (s.over_cjj) {
        const std::optional<double> c2 = a.cjj2;
        const double m = a.m12 * unit::pH;
        s.controls = [=](double x) { return Controls{x, c2.value_or(x), q, q, m}; };
    } else {
        const auto [c1, c2] = operating_point(a.c.sys, a.delta, a.delta);
        s.controls = [=](double x) { return Controls{c1, c2, q, q, x * unit::pH}; };
    }
    return s;
}

nlohmann::json sweep_json(const SweepArgs& a) {
    return {{"range", a.cjj_range.empty() ? a.m12_range : a.cjj_range},
            {"axis", a.cjj_range.empty() ? "m12_pH" : "cjj_Phi0"},
            {"delta_GHz", a.delta},
            {"bias_mPhi0", a.bias},
            {"m12_pH", a.m12}};
}

int cmd_reduce(SweepArgs& a) {
    const Sweep s = make_sweep(a);
    struct Row {
        std::optional<ReducedTwoQubitHamiltonian> r;
        std::string error;
    };
    std::function<Row(size_t)> f = [&](size_t i) {
        try {
            return Row{reduced_hamiltonian(a.c.sys, s.controls(s.xs[i])), ""};
        } catch (const PhysicsError& e) {
            return Row{std::nullopt, e.what()};
        }
    };
    const auto rows = parallel_map(s.xs.size(), f);
    CsvTable t;
    t.comments.push_back(a.c.header_line("reduce"));
    t.header = {s.over_cjj ? "cjj_Phi0" : "m12_pH", "delta1_GHz", "delta2_GHz", "h1_GHz", "h2_GHz"};
    const char* ax = "xyz";
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t.header.push_back(std::string("J") + ax[i] + ax[j] + "_GHz");
    t.header.insert(t.header.end(), {"na_min", "flagged"});
    int flagged = 0;
    for (size_t i = 0; i < rows.size(); ++i) {
        std::vector<double> row{s.xs[i]};
        if (rows[i].r) {
            const auto& r = *rows[i].r;
            row.insert(row.end(), {r.delta1, r.delta2, r.h1, r.h2});
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q) row.push_back(r.J(p, q));
            row.push_back(r.na_min);
            const bool bad = r.na_min < na_hard_floor;
            row.push_back(bad);
            flagged += bad;
        } else {
            row.resize(t.header.size() - 2, NAN);
            row.insert(row.end(), {NAN, 1});
            ++flagged;
            std::cerr << "row " << i << ": " << rows[i].error << "\n";
        }
        t.rows.push_back(row);
    }
    write_csv(a.c.path("reduce.csv"), t);
    a.c.manifest("reduce", sweep_json(a));
    if (flagged) {
        std::cerr << flagged << " rows below the na_min floor\n";
        return static_cast<int>(ExitCode::physics);
    }
    return 0;
}

int cmd_stoq_map(SweepArgs& a) {
    const Sweep s = make_sweep(a);
    auto model = [&](double x) { return Eigen::Matrix4d(reduced_hamiltonian(a.c.sys, s.controls(x)).matrix); };
    const double xtol = s.xs.size() > 1 ? 1e-3 * (s.xs.back() - s.xs.front()) : 1e-3;
    const RegionMap map = nonstoq_region_map(s.xs, model, a.tol, 181, xtol);
    CsvTable t;
    t.comments.push_back(a.c.header_line("stoq-map"));
    t.header = {s.over_cjj ? "cjj_Phi0" : "m12_pH", "stoquastic", "residual_GHz", "angle1_rad",
                "angle2_rad", "flip1", "flip2", "yz_swap"};
    for (const auto& p : map.points) {
        const auto tr = p.verdict.curing.value_or(LocalTransform{NAN, NAN, false, false, false});
        t.rows.push_back({p.x, double(p.verdict.stoquastic), p.verdict.max_positive_offdiag, tr.angle1, tr.angle2,
                          double(tr.flip1), double(tr.flip2), double(tr.yz_swap)});
    }
    write_csv(a.c.path("stoq_map.csv"), t);
    CsvTable b;
    b.comments.push_back(a.c.header_line("stoq-map"));
    b.header = {s.over_cjj ? "boundary_cjj_Phi0" : "boundary_m12_pH", "Jxx_GHz", "Jyy_GHz", "Jzz_GHz"};
    for (double x : map.boundaries) {
        const auto r = reduced_hamiltonian(a.c.sys, s.controls(x));
        b.rows.push_back({x, r.jxx(), r.jyy(), r.jzz()});
    }
    write_csv(a.c.path("boundaries.csv"), b);
    a.c.manifest("stoq-map", sweep_json(a));
    int nonstoq = 0;
    for (const auto& p : map.points) nonstoq += !p.verdict.stoquastic;
    std::cout << nonstoq << " of " << map.points.size() << " points nonstoquastic, " << map.boundaries.size()
              << " boundaries\n";
    return 0;
}

// oscillate ---------------------------------------------------------------

struct OscArgs {
    Common c;
    std::string init = "uu", track, m12_range;
    double dwell_max = 10, dwell_step = 0.02, final_bias = 0, delta = 1.5;
    bool zero_jyy = false;
};

int cmd_oscillate(OscArgs& a) {
    a.c.load();
    const BasisState init = parse_basis_state(a.init);
    // default: both qubits flipped
    const BasisState tracked =
        a.track.empty() ? static_cast<BasisState>(3 - static_cast<int>(init)) : parse_basis_state(a.track);
    const Range r = parse_range(a.m12_range, "--m12-range");
    if (!(a.dwell_max >= 0) || !(a.dwell_step > 0)) throw ValidationError("dwell settings must be non-negative");
    std::vector<double> dwell;
    const long nd = std::lround(std::floor(a.dwell_max / a.dwell_step + 1e-9));
    for (long i = 0; i <= nd; ++i) dwell.push_back(i * a.dwell_step);
    std::vector<double> ms;
    for (double x : r.values()) ms.push_back(x * unit::pH);
    const auto [c1, c2] = operating_point(a.c.sys, a.delta, a.delta);
    const double q = a.final_bias * 1e-3;
    ProtocolOptions po;
    po.cache.zero_jyy = a.zero_jyy;
    const auto map = oscillation_map(a.c.sys, init, tracked, c1, c2, q, q, ms, dwell, po);
    CsvTable t;
    t.comments = {a.c.header_line("oscillate"), "init " + a.init, "tracked " + basis_state_name(tracked),
                  "final_bias_mPhi0 " + format_number(a.final_bias), "cells population of tracked state"};
    t.header.push_back("dwell_ns");
    for (double m : ms) t.header.push_back("P_m12=" + format_number(m / unit::pH) + "_pH");
    for (size_t i = 0; i < dwell.size(); ++i) {
        std::vector<double> row{dwell[i]};
        for (size_t j = 0; j < ms.size(); ++j) row.push_back(map.population(i, j));
        t.rows.push_back(row);
    }
    write_csv(a.c.path("oscillation_map.csv"), t);
    a.c.manifest("oscillate", {{"init", a.init},
                               {"tracked", basis_state_name(tracked)},
                               {"m12_range", a.m12_range},
                               {"dwell_max_ns", a.dwell_max},
                               {"dwell_step_ns", a.dwell_step},
                               {"final_bias_mPhi0", a.final_bias},
                               {"delta_GHz", a.delta},
                               {"zero_jyy", a.zero_jyy}});
    return 0;
}

// compensate --------------------------------------------------------------

struct CompArgs {
    Common c;
    double target = 5.0;
    std::string distortion = "2:1";
    int max_iter = 5;
};

// "A:tau,A:tau" in mPhi0 and ns; "none" for no distortion
DistortionModel parse_distortion(const std::string& s) {
    DistortionModel d;
    if (s == "none" || s.empty()) return d;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::istringstream in(item);
        double amp = 0, tau = 0;
        char colon = 0;
        if (!(in >> amp >> colon >> tau) || colon != ':' || !in.eof())
            throw ValidationError("--distortion-spec expects A:tau[,A:tau...] in mPhi0:ns, got '" + item + "'");
        d.tails.push_back({amp * 1e-3, tau});
    }
    d.validate();
    return d;
}

int cmd_compensate(CompArgs& a) {
    a.c.load();
    const DistortionModel d = parse_distortion(a.distortion);
    if (!(a.target > 0)) throw ValidationError("--target-delta must be positive");
    CompensationOptions o;
    o.max_iter = a.max_iter;
    if (o.max_iter < 1) throw ValidationError("--max-iter must be >= 1");
    double op = 0;
    try {
        op = find_cjj_for_effective_delta(a.c.sys, 0, a.target);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("target gap out of range: ") + e.what());
    }
    const DeltaCurve curve(a.c.sys, 0, op - 0.02, op + 0.02, 41);
    const auto res = compensate_distortion(curve, a.target, d, o);

    CsvTable it;
    it.comments.push_back(a.c.header_line("compensate"));
    it.header = {"iteration", "tau_ns", "delta_m_GHz", "applied_cjj_Phi0"};
    for (size_t k = 0; k < res.iterations.size(); ++k) {
        const auto& r = res.iterations[k];
        for (size_t j = 0; j < r.tau.size(); ++j) it.rows.push_back({double(k + 1), r.tau[j], r.delta_m[j], r.applied[j]});
    }
    write_csv(a.c.path("iterations.csv"), it);
    CsvTable sch;
    sch.comments.push_back(a.c.header_line("compensate"));
    sch.header = {"t_ns", "cjj_Phi0"};
    for (size_t j = 0; j < res.applied.t.size(); ++j) sch.rows.push_back({res.applied.t[j], res.applied.v[j]});
    write_csv(a.c.path("schedule.csv"), sch);
    nlohmann::json summary{{"target_GHz", a.target},
                           {"operating_cjj_Phi0", res.operating_cjj},
                           {"slope_GHz_per_Phi0", res.slope},
                           {"iterations", res.iterations.size()},
                           {"converged", res.converged},
                           {"max_rel_error", res.iterations.back().max_rel_error}};
    write_json(a.c.path("summary.json"), summary);
    a.c.manifest("compensate", {{"target_GHz", a.target}, {"distortion", a.distortion}, {"max_iter", a.max_iter}});
    std::cout << "iterations " << res.iterations.size() << " residual "
              << format_number(res.iterations.back().max_rel_error) << "\n";
    if (!res.converged) {
        std::cerr << "compensation did not converge within " << a.max_iter << " iterations\n";
        return static_cast<int>(ExitCode::nonconvergence);
    }
    return 0;
}

// fit ---------------------------------------------------------------------

struct FitArgs {
    Common c;
    std::vector<std::string> data;
    std::string seed_params;
    int qubit = 1;
};

size_t column(const CsvTable& t, const std::string& name) {
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) throw ValidationError("data file lacks column " + name);
    return it - t.header.begin();
}

SystemParams seed_params(FitArgs& a) {
    return a.seed_params.empty() ? a.c.sys : load_system_params_file(a.seed_params);
}

void write_fit(FitArgs& a, const std::string& kind, const FitResult& f) {
    nlohmann::json params = nlohmann::json::array();
    for (const auto& p : f.parameters) params.push_back({{"name", p.name}, {"unit", p.unit}, {"value", p.value}});
    write_json(a.c.path("fit.json"), {{"model", kind},
                                      {"parameters", params},
                                      {"residual_rms", f.residual_rms},
                                      {"seed_residual_rms", f.seed_residual_rms},
                                      {"iterations", f.iterations},
                                      {"converged", f.converged}});
    a.c.manifest("fit " + kind, {{"data", a.data}, {"seed_params", a.seed_params}});
    for (const auto& p : f.parameters) std::cout << p.name << " " << format_number(p.value) << " " << p.unit << "\n";
}

int cmd_fit_coupler(FitArgs& a) {
    a.c.load();
    if (a.data.size() != 1) throw ValidationError("fit coupler takes one data file");
    const auto t = read_csv(a.data[0]);
    const size_t x = column(t, "phi_co_Phi0"), y = column(t, "m12_pH");
    std::vector<double> phi, m;
    for (const auto& r : t.rows) phi.push_back(r[x]), m.push_back(r[y] * unit::pH);
    const auto f = fit_coupler(phi, m, seed_params(a).coupler);
    write_fit(a, "coupler", f);
    return 0;
}

int cmd_fit_ip(FitArgs& a) {
    a.c.load();
    if (a.data.size() != 1) throw ValidationError("fit ip takes one data file");
    if (a.qubit != 1 && a.qubit != 2) throw ValidationError("--qubit is 1 or 2");
    const auto t = read_csv(a.data[0]);
    const size_t x = column(t, "cjj_Phi0"), y = column(t, "ip_uA");
    std::vector<double> c, ip;
    for (const auto& r : t.rows) c.push_back(r[x]), ip.push_back(r[y] * unit::uA);
    const auto s = seed_params(a);
    const auto f = fit_persistent_current(c, ip, a.qubit == 1 ? s.qubit1 : s.qubit2);
    write_fit(a, "ip", f);
    return 0;
}

int cmd_fit_spectro(FitArgs& a) {
    a.c.load();
    if (a.data.empty()) throw ValidationError("fit spectro needs data files");
    std::map<std::pair<int, double>, SpectroSweep> sweeps;
    for (const auto& path : a.data) {
        const auto t = read_csv(path);
        const size_t q = column(t, "swept_qubit"), p = column(t, "partner_cjj_Phi0"), x = column(t, "cjj_Phi0");
        std::vector<size_t> lines;
        for (int k = 1;; ++k) {
            const auto it = std::find(t.header.begin(), t.header.end(), "line" + std::to_string(k) + "_GHz");
            if (it == t.header.end()) break;
            lines.push_back(it - t.header.begin());
        }
        if (lines.empty()) throw ValidationError(path + " has no line<k>_GHz columns");
        for (const auto& r : t.rows) {
            const int sq = static_cast<int>(std::lround(r[q]));
            if (sq != 1 && sq != 2) throw ValidationError("swept_qubit is 1 or 2");
            auto& s = sweeps[{sq, r[p]}];
            s.swept_qubit = sq - 1;
            s.partner_cjj = r[p];
            s.cjj.push_back(r[x]);
            std::vector<double> l;
            for (size_t c : lines) l.push_back(r[c]);
            s.lines.push_back(l);
        }
    }
    std::vector<SpectroSweep> data;
    for (auto& [k, s] : sweeps) data.push_back(s);
    const auto f = fit_spectroscopy(data, seed_params(a));
    write_fit(a, "spectro", f);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled rf-SQUID flux-qubit simulator"};
    app.require_subcommand(1);

    SpectrumArgs sp;
    auto* spectrum = app.add_subcommand("spectrum", "transition lines over a Phi_cjj,1 or M12 sweep");
    add_common(spectrum, sp.c);
    spectrum->add_option("--cjj1-range", sp.cjj1_range, "lo:hi:n in Phi0");
    spectrum->add_option("--m12-range", sp.m12_range, "lo:hi:n in pH");
    spectrum->add_option("--delta1", sp.delta1, "qubit 1 effective gap, GHz (M12 sweeps)");
    spectrum->add_option("--delta2", sp.delta2, "qubit 2 effective gap, GHz");
    spectrum->add_option("--bias", sp.bias, "tilt on both qubits, mPhi0");
    spectrum->add_option("--m12", sp.m12, "fixed M12 for Phi_cjj sweeps, pH");
    spectrum->add_option("--lines", sp.lines, "transition lines to report");
    spectrum->add_option("--levels", sp.levels, "single-SQUID levels per qubit");
    spectrum->add_option("--gap-level", sp.gap_level, "summary gap between levels g and g+1 (from 0)");

    SweepArgs rd, sm;
    auto* reduce = app.add_subcommand("reduce", "reduced two-qubit parameters over a sweep");
    auto* stoq = app.add_subcommand("stoq-map", "stoquasticity verdicts over a sweep");
    for (auto [cmd, a] : {std::pair{reduce, &rd}, std::pair{stoq, &sm}}) {
        add_common(cmd, a->c);
        cmd->add_option("--cjj-range", a->cjj_range, "lo:hi:n in Phi0, both qubits unless --cjj2");
        cmd->add_option("--m12-range", a->m12_range, "lo:hi:n in pH");
        cmd->add_option("--cjj2", a->cjj2, "hold qubit 2 at this Phi_cjj");
        cmd->add_option("--delta", a->delta, "effective gap of both qubits for M12 sweeps, GHz");
        cmd->add_option("--bias", a->bias, "tilt on both qubits, mPhi0");
        cmd->add_option("--m12", a->m12, "fixed M12 for Phi_cjj sweeps, pH");
    }
    stoq->add_option("--tol", sm.tol, "off-diagonal tolerance, GHz");

    OscArgs os;
    auto* osc = app.add_subcommand("oscillate", "coherent-oscillation population map");
    add_common(osc, os.c);
    osc->add_option("--init", os.init, "dd, du, ud or uu");
    osc->add_option("--track", os.track, "tracked state (default: both flipped)");
    osc->add_option("--m12-range", os.m12_range, "lo:hi:n in pH")->required();
    osc->add_option("--dwell-max", os.dwell_max, "ns");
    osc->add_option("--dwell-step", os.dwell_step, "ns");
    osc->add_option("--final-bias", os.final_bias, "tilt during the dwell, mPhi0");
    osc->add_option("--delta", os.delta, "effective gap at the dwell point, GHz");
    osc->add_flag("--zero-jyy", os.zero_jyy, "drop the yy coupling");

    CompArgs cp;
    auto* comp = app.add_subcommand("compensate", "iterative pulse-distortion compensation");
    add_common(comp, cp.c);
    comp->add_option("--target-delta", cp.target, "GHz");
    comp->add_option("--distortion-spec", cp.distortion, "A:tau[,A:tau...] in mPhi0:ns, or none");
    comp->add_option("--max-iter", cp.max_iter);

    FitArgs fc, fi, fs_;
    auto* fit = app.add_subcommand("fit", "calibration fits");
    fit->require_subcommand(1);
    auto* fcoupler = fit->add_subcommand("coupler", "coupler constants from phi_co_Phi0,m12_pH");
    auto* fip = fit->add_subcommand("ip", "Ic and L from cjj_Phi0,ip_uA");
    auto* fspec = fit->add_subcommand("spectro", "capacitances and Lcjj from spectroscopy lines");
    for (auto [cmd, a] : {std::pair{fcoupler, &fc}, std::pair{fip, &fi}, std::pair{fspec, &fs_}}) {
        add_common(cmd, a->c);
        cmd->add_option("--data", a->data, "CSV data file(s)")->required();
        cmd->add_option("--seed-params", a->seed_params, "parameter JSON with the starting values");
    }
    fip->add_option("--qubit", fi.qubit, "1 or 2");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::validation);
    }

    try {
        if (*spectrum) return cmd_spectrum(sp);
        if (*reduce) return cmd_reduce(rd);
        if (*stoq) return cmd_stoq_map(sm);
        if (*osc) return cmd_oscillate(os);
        if (*comp) return cmd_compensate(cp);
        if (*fcoupler) return cmd_fit_coupler(fc);
        if (*fip) return cmd_fit_ip(fi);
        if (*fspec) return cmd_fit_spectro(fs_);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::validation);
    }
    return 0;
}
