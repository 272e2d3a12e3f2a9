#include "fluxq/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fluxq/errors.hpp"

namespace fluxq {

double barrier_location(const EigenSystem& eig) {
    const Eigen::VectorXd& u = eig.potential;
    const int n = static_cast<int>(u.size());
    if (n != eig.grid.n) throw ValidationError("eigensystem carries no potential");
    std::vector<int> mins;
    for (int i = 1; i + 1 < n; ++i)
        if (u[i] < u[i - 1] && u[i] <= u[i + 1]) mins.push_back(i);
    if (mins.size() < 2) throw PhysicsError("monostable potential: no barrier");
    std::sort(mins.begin(), mins.end(), [&](int a, int b) { return u[a] < u[b]; });
    const int lo = std::min(mins[0], mins[1]), hi = std::max(mins[0], mins[1]);
    int top = lo;
    for (int i = lo; i <= hi; ++i)
        if (u[i] > u[top]) top = i;
    const double curv = u[top - 1] - 2 * u[top] + u[top + 1];
    double shift = 0;
    if (curv < 0) shift = 0.5 * (u[top - 1] - u[top + 1]) / curv;
    return eig.grid.at(top) + std::clamp(shift, -0.5, 0.5) * eig.grid.spacing();
}

MixingAngle mixing_angle(const EigenSystem& eig, double barrier) {
    if (eig.k() < 2) throw ValidationError("mixing angle needs two states");
    const FluxGrid& g = eig.grid;
    const double d = g.spacing();
    double a = 0, b = 0, o = 0;
    for (int i = 0; i < g.n; ++i) {
        // share of the cell [x - d/2, x + d/2] lying left of the barrier
        const double w = std::clamp((barrier - (g.at(i) - 0.5 * d)) / d, 0.0, 1.0);
        if (w == 0) continue;
        const double c1 = eig.states(i, 0), c2 = eig.states(i, 1);
        a += w * c1 * c1;
        b += w * c2 * c2;
        o += w * c1 * c2;
    }
    const double theta = 0.5 * std::atan2(2 * o, a - b);
    const double pop = 0.5 * (a + b) + std::hypot(0.5 * (a - b), o);
    return {theta, pop};
}

namespace {

Eigen::Matrix2d down_up(double theta) {
    Eigen::Matrix2d m;
    m << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return m;
}

}  // namespace

ReducedTwoQubitHamiltonian reduce(const CoupledSpectrum& cs, const MixingAngle& t1, const MixingAngle& t2) {
    if (cs.energies.size() < 4 || cs.amplitudes.size() < 4) throw ValidationError("reduction needs four levels");
    if (cs.n1 < 2 || cs.n2 < 2) throw ValidationError("reduction needs two states per qubit");
    // The four levels carrying the most weight in the two-state block. Under
    // strong coupling at high barriers some computational states lie above
    // intrawell excitations.
    std::vector<int> order(cs.amplitudes.size());
    std::iota(order.begin(), order.end(), 0);
    auto weight = [&](int a) { return cs.amplitudes[a].topLeftCorner(2, 2).squaredNorm(); };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return weight(a) > weight(b); });
    order.resize(4);
    std::sort(order.begin(), order.end());

    Eigen::Matrix4d eta;
    for (int a = 0; a < 4; ++a) {
        const auto& c = cs.amplitudes[order[a]];
        eta.col(a) << c(0, 0), c(0, 1), c(1, 0), c(1, 1);
    }
    ReducedTwoQubitHamiltonian r;
    r.levels = {order[0], order[1], order[2], order[3]};
    r.na = eta.colwise().norm().transpose();
    r.na_min = r.na.minCoeff();
    if (r.na_min < na_hard_floor) throw PhysicsError("reduction invalid: truncated weight below floor");

    Eigen::Matrix4d q = eta;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < a; ++b) q.col(a) -= q.col(b).dot(q.col(a)) * q.col(b);
        q.col(a).normalize();
    }
    for (int a = 0; a < 4; ++a) r.energies[a] = energy_to_frequency(cs.energies[order[a]]);
    const Eigen::Matrix4d h_chi = q * r.energies.asDiagonal() * q.transpose();
    const Eigen::Matrix4d r2 = kron2(down_up(t1.theta), down_up(t2.theta));
    Eigen::Matrix4d h = r2.transpose() * h_chi * r2;
    r.matrix = 0.5 * (h + h.transpose());

    r.coefficients = pauli_decompose(r.matrix);
    const auto& c = r.coefficients;
    r.offset = c(0, 0);
    r.delta1 = -2 * c(1, 0);
    r.delta2 = -2 * c(0, 1);
    r.h1 = c(3, 0);
    r.h2 = c(0, 3);
    r.J = c.bottomRightCorner<3, 3>();
    return r;
}

Eigen::Matrix4d compose_real(const Eigen::Matrix4d& c) { return pauli_compose<double>(c).real(); }

Eigen::Matrix4d reduced_matrix(const ReducedTwoQubitHamiltonian& r) {
    Eigen::Matrix4d c = Eigen::Matrix4d::Zero();
    c(0, 0) = r.offset;
    c(1, 0) = -0.5 * r.delta1;
    c(0, 1) = -0.5 * r.delta2;
    c(3, 0) = r.h1;
    c(0, 3) = r.h2;
    c.bottomRightCorner<3, 3>() = r.J;
    return compose_real(c);
}

std::array<double, 4> block_eigenvalues(double delta1, double delta2, double jyy) {
    const double s = std::hypot(jyy, 0.5 * (delta1 + delta2));
    const double d = std::hypot(jyy, 0.5 * (delta1 - delta2));
    std::array<double, 4> e{-s, -d, d, s};
    std::sort(e.begin(), e.end());
    return e;
}

ReducedTwoQubitHamiltonian reduced_hamiltonian(const SystemParams& sys, const Controls& c, const SolveOptions& opts) {
    SolveOptions o = opts;
    o.k = std::max(o.k, reduction_search_levels);
    const auto s = solve_coupled(sys, c, o);
    const auto t1 = mixing_angle(s.b1.eig, barrier_location(s.b1.eig));
    const auto t2 = mixing_angle(s.b2.eig, barrier_location(s.b2.eig));
    return reduce(s.spectrum, t1, t2);
}

}  // namespace fluxq
