#include "fluxq/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "fluxq/errors.hpp"
#include "fluxq/optimize.hpp"

namespace fluxq {

using std::numbers::pi;

double FitResult::value(const std::string& name) const {
    for (const auto& p : parameters)
        if (p.name == name) return p.value;
    throw ValidationError("no fitted parameter named " + name);
}

double coupler_m12(const CouplerParams& cp, double phi_co) {
    const double x = cp.beta * std::cos(pi * phi_co);
    if (std::abs(1 + x) <= 0.05) throw ValidationError("coupler bias too close to the model singularity");
    return cp.msq_over_l * x / (1 + x) + cp.m12_offset;
}

double bias_for_m12(const CouplerParams& cp, double target) {
    if (!(std::abs(target) <= cp.m12_max_abs)) throw ValidationError("target M12 out of coupler range");
    const double y = (target - cp.m12_offset) / cp.msq_over_l;
    if (!(y < 1)) throw ValidationError("target M12 out of coupler range");
    const double x = y / (1 - y);
    const double c = x / cp.beta;
    if (c < -1 || c > 1 || 1 + x <= 0.05) throw ValidationError("target M12 out of coupler range");
    return std::acos(c) / pi;
}

namespace {

FitResult finish(const SimplexResult& r, double seed_rms) {
    FitResult f;
    f.residual_rms = r.value;
    f.seed_residual_rms = seed_rms;
    f.iterations = r.iterations;
    f.converged = r.converged;
    f.history = r.history;
    return f;
}

double rms(const Eigen::VectorXd& r) { return std::sqrt(r.squaredNorm() / r.size()); }

}  // namespace

FitResult fit_coupler(const std::vector<double>& phi_co, const std::vector<double>& m12, const CouplerParams& seed) {
    if (phi_co.size() != m12.size()) throw ValidationError("coupler data size mismatch");
    if (std::set<double>(phi_co.begin(), phi_co.end()).size() < 6) throw ValidationError("coupler fit needs >= 6 points");
    const auto [mn, mx] = std::minmax_element(m12.begin(), m12.end());
    if (*mx - *mn < 1e-9 * unit::pH) throw ValidationError("rank-deficient data: M12 does not vary");
    const int n = static_cast<int>(m12.size());

    auto residuals = [&](const Eigen::VectorXd& x) {
        CouplerParams cp = seed;
        cp.msq_over_l = x[0] * unit::pH;
        cp.beta = x[1];
        cp.m12_offset = x[2] * unit::pH;
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i) {
            const double d = 1 + cp.beta * std::cos(pi * phi_co[i]);
            if (std::abs(d) <= 0.05 || cp.beta <= 0) return Eigen::VectorXd(Eigen::VectorXd::Constant(n, INFINITY));
            r[i] = (coupler_m12(cp, phi_co[i]) - m12[i]) / unit::pH;
        }
        return r;
    };
    auto obj = [&](const Eigen::VectorXd& x) { return rms(residuals(x)); };
    Eigen::VectorXd x0(3), scale(3);
    x0 << seed.msq_over_l / unit::pH, seed.beta, seed.m12_offset / unit::pH;
    scale << 0.1 * std::abs(x0[0]) + 0.1, 0.1 * x0[1], 0.5;
    SimplexResult r = nelder_mead(obj, x0, scale, 1e-12, 20000);
    // restart once from the optimum to shake off a collapsed simplex
    r = nelder_mead(obj, r.x, 0.01 * scale, 1e-13, 20000);

    // Jacobian rank at the optimum
    Eigen::MatrixXd jac(n, 3);
    for (int k = 0; k < 3; ++k) {
        Eigen::VectorXd xp = r.x, xm = r.x;
        const double h = 1e-6 * std::max(1.0, std::abs(r.x[k]));
        xp[k] += h;
        xm[k] -= h;
        jac.col(k) = (residuals(xp) - residuals(xm)) / (2 * h);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
    const auto sv = svd.singularValues();
    if (!(sv[2] > 1e-8 * sv[0])) throw ValidationError("rank-deficient data: coupler constants not separable");

    FitResult f = finish(r, obj(x0));
    f.parameters = {{"msq_over_l", "pH", r.x[0]}, {"beta", "", r.x[1]}, {"m12_offset", "pH", r.x[2]}};
    if (!f.converged) throw NonConvergenceError("coupler fit did not converge");
    return f;
}

FitResult fit_persistent_current(const std::vector<double>& cjj, const std::vector<double>& ip, const SquidParams& seed) {
    if (cjj.size() != ip.size() || cjj.size() < 3) throw ValidationError("persistent-current data needs >= 3 points");
    const auto [mn, mx] = std::minmax_element(cjj.begin(), cjj.end());
    if (*mx - *mn < 0.5) throw ValidationError("persistent-current data must span >= 0.5 Phi0 of Phi_cjj");
    const int n = static_cast<int>(ip.size());
    auto obj = [&](const Eigen::VectorXd& x) {
        if (x[0] <= 0 || x[1] <= 0) return double(INFINITY);
        SquidParams p = seed;
        p.ic = x[0] * seed.ic;
        p.l = x[1] * seed.l;
        Eigen::VectorXd r(n);
        try {
            for (int i = 0; i < n; ++i) r[i] = (persistent_current(p, cjj[i], 0.0) - ip[i]) / unit::uA;
        } catch (const PhysicsError&) {
            return double(INFINITY);
        }
        return rms(r);
    };
    Eigen::VectorXd x0 = Eigen::VectorXd::Ones(2);
    // Ip itself is only smooth to ~1e-9 uA (inner minimizations)
    SimplexResult r = nelder_mead(obj, x0, Eigen::VectorXd::Constant(2, 0.1), 1e-8, 1000);
    r = nelder_mead(obj, r.x, Eigen::VectorXd::Constant(2, 0.005), 1e-8, 1000);
    FitResult f = finish(r, obj(x0));
    f.parameters = {{"ic", "uA", r.x[0] * seed.ic / unit::uA}, {"l", "pH", r.x[1] * seed.l / unit::pH}};
    if (!f.converged) throw NonConvergenceError("persistent-current fit did not converge");
    return f;
}

std::vector<std::vector<double>> spectro_lines(const SystemParams& sys, const SpectroSweep& sweep, int lines,
                                               const SolveOptions& opts) {
    SolveOptions o = opts;
    o.k = std::max(o.k, lines + 1);
    std::vector<std::vector<double>> out;
    for (double c : sweep.cjj) {
        Controls ctl;
        ctl.cjj1 = sweep.swept_qubit == 0 ? c : sweep.partner_cjj;
        ctl.cjj2 = sweep.swept_qubit == 0 ? sweep.partner_cjj : c;
        const auto s = solve_coupled(sys, ctl, o);
        auto l = transition_lines(s.spectrum, LineSource::ground);
        l.resize(lines);
        out.push_back(l);
    }
    return out;
}

FitResult fit_spectroscopy(const std::vector<SpectroSweep>& data, const SystemParams& seed, const SpectroOptions& opts) {
    std::set<double> settings;
    bool single = false;
    for (const auto& s : data) {
        if (s.cjj.size() != s.lines.size() || s.cjj.empty()) throw ValidationError("spectroscopy sweep is malformed");
        if (std::abs(s.partner_cjj - 0.5) < 1e-9)
            single = true;
        else
            settings.insert(s.partner_cjj);
    }
    if (settings.size() < 2 || !single)
        throw ValidationError("insufficient sweep coverage: need single-qubit sweeps and two distinct partner settings");

    auto model = [&](const Eigen::VectorXd& x) {
        SystemParams p = seed;
        p.qubit1.c = x[0] * seed.qubit1.c;
        p.qubit2.c = x[1] * seed.qubit2.c;
        p.c12 = x[2] * seed.c12;
        p.qubit1.lcjj = x[3] * seed.qubit1.lcjj;
        p.qubit2.lcjj = x[4] * seed.qubit2.lcjj;
        return p;
    };
    auto obj = [&](const Eigen::VectorXd& x) {
        if ((x.array() <= 0).any()) return double(INFINITY);
        const SystemParams p = model(x);
        double ss = 0;
        int count = 0;
        try {
            for (const auto& s : data) {
                const int nl = static_cast<int>(s.lines.front().size());
                const auto pred = spectro_lines(p, s, nl, opts.solve);
                for (size_t i = 0; i < pred.size(); ++i)
                    for (int k = 0; k < nl; ++k) {
                        const double d = pred[i][k] - s.lines[i][k];
                        ss += d * d;
                        ++count;
                    }
            }
        } catch (const Error&) {
            return double(INFINITY);
        }
        return std::sqrt(ss / count);
    };
    const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(5);
    SimplexResult r = nelder_mead(obj, x0, Eigen::VectorXd::Constant(5, 0.05), opts.tol, opts.max_iter);
    r = nelder_mead(obj, r.x, Eigen::VectorXd::Constant(5, 0.005), opts.tol, opts.max_iter);
    FitResult f = finish(r, obj(x0));
    const SystemParams p = model(r.x);
    f.parameters = {{"c1", "fF", p.qubit1.c / unit::fF},
                    {"c2", "fF", p.qubit2.c / unit::fF},
                    {"c12", "fF", p.c12 / unit::fF},
                    {"lcjj1", "pH", p.qubit1.lcjj / unit::pH},
                    {"lcjj2", "pH", p.qubit2.lcjj / unit::pH}};
    if (!f.converged) throw NonConvergenceError("spectroscopy fit did not converge");
    return f;
}

}  // namespace fluxq
