#include "fluxq/coupled.hpp"

#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "fluxq/errors.hpp"

namespace fluxq {

LoadedCapacitances loaded_capacitances(double c1, double c2, double c12) {
    if (!(c1 > 0 && c2 > 0)) throw ValidationError("capacitances must be positive");
    if (!(c12 >= 0)) throw ValidationError("c12 must be >= 0");
    return {c1 + c12 * c2 / (c2 + c12), c2 + c12 * c1 / (c1 + c12)};
}

double charge_coupling(double c1, double c2, double c12) {
    return c12 / (c1 * c2 + (c1 + c2) * c12);
}

QubitBasis qubit_basis(const SquidParams& p, double loaded_c, double cjjx, double qx, int levels, int grid_n) {
    const auto grid = default_grid(p, cjjx, qx, grid_n);
    QubitBasis b;
    b.eig = diagonalize(build_single_hamiltonian(p, loaded_c, cjjx, qx, grid), levels);
    b.qx = qx;
    b.flux = flux_elements(b.eig, qx);
    b.derivative = derivative_elements(b.eig);
    return b;
}

Eigen::MatrixXd build_coupled_hamiltonian(const QubitBasis& b1, const QubitBasis& b2, double m12,
                                          const SystemParams& sys, CouplingOptions couplings) {
    const int n1 = b1.eig.k(), n2 = b2.eig.k();
    if (b1.flux.rows() != n1 || b2.flux.rows() != n2 || b1.derivative.rows() != n1 ||
        b2.derivative.rows() != n2)
        throw ValidationError("basis-size mismatch");
    const double ml = m12 / (sys.qubit1.l * sys.qubit2.l);
    // Q1 Q2 = (-i hbar)^2 A1 A2
    const double qq = -hbar * hbar * charge_coupling(sys.qubit1.c, sys.qubit2.c, sys.c12);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n1 * n2, n1 * n2);
    for (int a = 0; a < n1; ++a)
        for (int b = 0; b < n1; ++b) {
            const double x1 = couplings.inductive ? ml * b1.flux(a, b) : 0.0;
            const double d1 = couplings.charge ? qq * b1.derivative(a, b) : 0.0;
            auto blk = h.block(a * n2, b * n2, n2, n2);
            if (x1 != 0) blk += x1 * b2.flux;
            if (d1 != 0) blk += d1 * b2.derivative;
            if (a == b) {
                blk.diagonal().array() += b1.eig.energies[a];
                blk.diagonal() += b2.eig.energies;
            }
        }
    return h;
}

CoupledSpectrum coupled_spectrum(const Eigen::MatrixXd& h, int n1, int n2, int k) {
    if (h.rows() != n1 * n2) throw ValidationError("basis-size mismatch");
    const auto ep = lowest_eigenpairs(h, k);
    CoupledSpectrum s;
    s.energies = ep.values;
    s.n1 = n1;
    s.n2 = n2;
    for (int a = 0; a < k; ++a) {
        Eigen::MatrixXd c(n1, n2);
        for (int m = 0; m < n1; ++m)
            for (int v = 0; v < n2; ++v) c(m, v) = ep.vectors(m * n2 + v, a);
        s.amplitudes.push_back(c);
    }
    return s;
}

CoupledSolution solve_coupled(const SystemParams& sys, const Controls& c, const SolveOptions& opts) {
    const auto lc = loaded_capacitances(sys.qubit1.c, sys.qubit2.c, sys.c12);
    CoupledSolution s;
    s.b1 = qubit_basis(sys.qubit1, lc.c1_tilde, c.cjj1, c.q1, opts.levels, opts.grid_n);
    s.b2 = qubit_basis(sys.qubit2, lc.c2_tilde, c.cjj2, c.q2, opts.levels, opts.grid_n);
    const auto h = build_coupled_hamiltonian(s.b1, s.b2, c.m12, sys, opts.couplings);
    s.spectrum = coupled_spectrum(h, opts.levels, opts.levels, std::min(opts.k, opts.levels * opts.levels));
    return s;
}

std::vector<double> transition_lines(const CoupledSpectrum& s, LineSource from) {
    const int src = from == LineSource::ground ? 0 : 1;
    if (s.energies.size() < 4) throw ValidationError("need at least four levels");
    std::vector<double> out;
    for (int a = src + 1; a < s.energies.size(); ++a)
        out.push_back(energy_to_frequency(s.energies[a] - s.energies[src]));
    return out;
}

double level_gap(const CoupledSpectrum& s, int lower) {
    if (lower + 1 >= s.energies.size()) throw ValidationError("level index out of range");
    return energy_to_frequency(s.energies[lower + 1] - s.energies[lower]);
}

Anticrossing anticrossing(const std::vector<double>& x, const std::vector<double>& g) {
    if (x.size() != g.size() || x.size() < 3) throw ValidationError("sweep needs >= 3 points");
    size_t i = 0;
    for (size_t j = 1; j < g.size(); ++j)
        if (g[j] < g[i]) i = j;
    if (i == 0 || i + 1 == g.size()) throw PhysicsError("no interior gap minimum in sweep");
    const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
    const double y0 = g[i - 1], y1 = g[i], y2 = g[i + 1];
    const double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
    const double a = (d12 - d01) / (x2 - x0);
    if (!(a > 0)) return {y1, x1};
    const double xm = 0.5 * (x0 + x1) - d01 / (2 * a);
    const double ym = y0 + d01 * (xm - x0) + a * (xm - x0) * (xm - x1);
    // A cusp-shaped minimum (true level crossing) can push the parabola below zero.
    return {std::max(ym, 0.0), xm};
}

double effective_delta(const SystemParams& sys, int qubit, double cjj, const SolveOptions& opts) {
    Controls c;
    (qubit == 0 ? c.cjj1 : c.cjj2) = cjj;
    SolveOptions o = opts;
    o.k = 2;
    const auto s = solve_coupled(sys, c, o);
    return level_gap(s.spectrum, 0);
}

double find_cjj_for_effective_delta(const SystemParams& sys, int qubit, double target_ghz,
                                    const SolveOptions& opts) {
    const double lo = 0.5, hi = 0.8;
    auto f = [&](double c) { return effective_delta(sys, qubit, c, opts) - target_ghz; };
    const double flo = f(lo), fhi = f(hi);
    if (!(flo >= 0 && fhi <= 0)) throw ValidationError("target gap out of achievable range");
    std::uintmax_t iters = 100;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                               boost::math::tools::eps_tolerance<double>(40), iters);
    return 0.5 * (r.first + r.second);
}

}  // namespace fluxq
