#include "fluxq/squid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <lapacke.h>

#include "fluxq/errors.hpp"

namespace fluxq {

using std::numbers::pi;

void FluxGrid::validate() const {
    if (n < 64 || n % 2 == 0) throw ValidationError("flux grid needs an odd point count >= 64");
    if (!(halfwidth > 0)) throw ValidationError("flux grid halfwidth must be positive");
}

Eigen::VectorXd FluxGrid::points() const {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = at(i);
    return x;
}

EigenPairs lowest_eigenpairs(const Eigen::MatrixXd& symmetric, int k) {
    if (symmetric.rows() != symmetric.cols()) throw ValidationError("matrix must be square");
    if (k < 1 || k > symmetric.rows()) throw ValidationError("k out of range");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric);
    if (es.info() != Eigen::Success) throw NonConvergenceError("eigensolver failure");
    return {es.eigenvalues().head(k), es.eigenvectors().leftCols(k)};
}

EigenPairs lowest_eigenpairs_tridiagonal(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, int k) {
    const lapack_int n = static_cast<lapack_int>(diag.size());
    if (off.size() != n - 1) throw ValidationError("tridiagonal shape mismatch");
    if (k < 1 || k > n) throw ValidationError("k out of range");
    Eigen::VectorXd d = diag;
    Eigen::VectorXd e(n);
    e.head(n - 1) = off;
    e[n - 1] = 0;
    Eigen::VectorXd w(n);
    Eigen::MatrixXd z(n, k);
    std::vector<lapack_int> support(2 * static_cast<size_t>(k));
    lapack_int m = 0;
    lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, 1, k,
                                     0.0, &m, w.data(), z.data(), n, support.data());
    if (info != 0 || m != k) throw NonConvergenceError("tridiagonal eigensolver failure");
    return {w.head(k), z};
}

EigenPairs diagonalize(const Eigen::MatrixXd& symmetric, int k) { return lowest_eigenpairs(symmetric, k); }

namespace {

struct PotentialKey {
    std::array<double, 8> v;
    bool operator<(const PotentialKey& o) const { return v < o.v; }
};

std::mutex cache_mutex;
std::map<PotentialKey, std::shared_ptr<const Eigen::VectorXd>> potential_cache;
constexpr size_t cache_limit = 20000;

double cjj_potential(const SquidParams& p, double cjjx, double q, double cjj) {
    const double dc = (cjj - cjjx) * Phi0;
    return dc * dc / (2.0 * p.lcjj) - p.josephson_energy() * std::cos(pi * cjj) * std::cos(2.0 * pi * q);
}

double minimize_cjj(const SquidParams& p, double cjjx, double q) {
    double window = 0.25;
    for (int attempt = 0; attempt < 3; ++attempt) {
        std::uintmax_t iters = 200;
        auto f = [&](double c) { return cjj_potential(p, cjjx, q, c); };
        auto r = boost::math::tools::brent_find_minima(f, cjjx - window, cjjx + window,
                                                       std::numeric_limits<double>::digits / 2, iters);
        if (iters >= 200) throw NonConvergenceError("cjj minimization did not converge");
        const double edge = std::min(r.first - (cjjx - window), (cjjx + window) - r.first);
        if (edge > 1e-6) return r.second;
        window *= 2;
    }
    throw NonConvergenceError("cjj minimum not bracketed");
}

}  // namespace

double effective_potential(const SquidParams& p, double cjjx, double qx, double q) {
    const double dq = (q - qx) * Phi0;
    return dq * dq / (2.0 * p.l) + minimize_cjj(p, cjjx, q);
}

std::shared_ptr<const Eigen::VectorXd> effective_potential(const SquidParams& p, double cjjx, double qx,
                                                           const FluxGrid& grid) {
    const PotentialKey key{{p.ic, p.l, p.lcjj, cjjx, qx, grid.center, grid.halfwidth, double(grid.n)}};
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = potential_cache.find(key);
        if (it != potential_cache.end()) return it->second;
    }
    auto u = std::make_shared<Eigen::VectorXd>(grid.n);
    for (int i = 0; i < grid.n; ++i) (*u)[i] = effective_potential(p, cjjx, qx, grid.at(i));
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (potential_cache.size() >= cache_limit) potential_cache.clear();
    potential_cache.emplace(key, u);
    return u;
}

void clear_potential_cache() {
    std::lock_guard<std::mutex> lock(cache_mutex);
    potential_cache.clear();
}

std::vector<double> classical_minima(const SquidParams& p, double cjjx, double qx) {
    const int n = 1201;
    const double lo = qx - 0.6, step = 1.2 / (n - 1);
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) u[i] = effective_potential(p, cjjx, qx, lo + i * step);
    std::vector<double> mins;
    for (int i = 1; i + 1 < n; ++i) {
        if (u[i] < u[i - 1] && u[i] <= u[i + 1]) {
            auto f = [&](double q) { return effective_potential(p, cjjx, qx, q); };
            std::uintmax_t iters = 200;
            auto r = boost::math::tools::brent_find_minima(f, lo + (i - 1) * step, lo + (i + 1) * step,
                                                           std::numeric_limits<double>::digits / 2, iters);
            mins.push_back(r.first);
        }
    }
    return mins;
}

FluxGrid default_grid(const SquidParams& p, double cjjx, double qx, int n) {
    const auto mins = classical_minima(p, cjjx, qx);
    double separation = 0;
    if (mins.size() >= 2) separation = mins.back() - mins.front();
    FluxGrid g{qx, std::max(0.4, 0.5 * separation + 0.3), n};
    g.validate();
    return g;
}

FluxGridOperator<double> build_hamiltonian(const Eigen::VectorXd& potential, double loaded_c,
                                           const FluxGrid& grid) {
    grid.validate();
    if (!(loaded_c > 0)) throw ValidationError("loaded capacitance must be positive");
    if (potential.size() != grid.n) throw ValidationError("potential does not match grid");
    const double d = grid.spacing() * Phi0;
    const double t = hbar * hbar / (2.0 * loaded_c * d * d);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(3 * static_cast<size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i) {
        entries.emplace_back(i, i, potential[i] + 2.0 * t);
        if (i + 1 < grid.n) {
            entries.emplace_back(i, i + 1, -t);
            entries.emplace_back(i + 1, i, -t);
        }
    }
    FluxGridOperator<double> h{grid, Eigen::SparseMatrix<double>(grid.n, grid.n), potential};
    h.matrix.setFromTriplets(entries.begin(), entries.end());
    return h;
}

FluxGridOperator<double> build_single_hamiltonian(const SquidParams& p, double loaded_c, double cjjx,
                                                  double qx, const FluxGrid& grid) {
    grid.validate();
    return build_hamiltonian(*effective_potential(p, cjjx, qx, grid), loaded_c, grid);
}

namespace {

bool is_tridiagonal(const Eigen::SparseMatrix<double>& m) {
    for (int k = 0; k < m.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
            if (std::abs(it.row() - it.col()) > 1 && it.value() != 0) return false;
    return true;
}

void fix_phases(Eigen::MatrixXd& v, const FluxGrid& grid) {
    auto largest_positive = [&](int j) {
        Eigen::Index imax;
        v.col(j).cwiseAbs().maxCoeff(&imax);
        if (v(imax, j) < 0) v.col(j) *= -1;
    };
    largest_positive(0);
    if (v.cols() > 1) {
        const Eigen::VectorXd x = grid.points().array() - grid.center;
        if (v.col(0).cwiseProduct(x).dot(v.col(1)) < 0) v.col(1) *= -1;
    }
    for (int j = 2; j < v.cols(); ++j) largest_positive(j);
}

}  // namespace

EigenSystem diagonalize(const FluxGridOperator<double>& h, int k) {
    const int n = h.grid.n;
    if (k < 1 || k > n) throw ValidationError("k out of range");
    if (!is_hermitian(h)) throw ValidationError("operator is not Hermitian");
    EigenPairs ep;
    if (is_tridiagonal(h.matrix)) {
        Eigen::VectorXd d(n), e(n - 1);
        for (int i = 0; i < n; ++i) d[i] = h.matrix.coeff(i, i);
        for (int i = 0; i + 1 < n; ++i) e[i] = h.matrix.coeff(i + 1, i);
        ep = lowest_eigenpairs_tridiagonal(d, e, k);
    } else {
        ep = lowest_eigenpairs(Eigen::MatrixXd(h.matrix), k);
    }
    const Eigen::VectorXd g = ep.vectors.col(0).cwiseAbs();
    if (std::max(g[0], g[n - 1]) > 1e-6 * g.maxCoeff())
        throw PhysicsError("boundary leak: ground state reaches the grid edge");
    fix_phases(ep.vectors, h.grid);
    return {h.grid, ep.values, ep.vectors, h.potential};
}

FluxGridOperator<double> flux_operator(const FluxGrid& grid, double qx) {
    grid.validate();
    Eigen::SparseMatrix<double> m(grid.n, grid.n);
    m.reserve(Eigen::VectorXi::Constant(grid.n, 1));
    for (int i = 0; i < grid.n; ++i) m.insert(i, i) = (grid.at(i) - qx) * Phi0;
    return {grid, m, {}};
}

FluxGridOperator<double> derivative_operator(const FluxGrid& grid) {
    grid.validate();
    const double inv = 1.0 / (2.0 * grid.spacing() * Phi0);
    std::vector<Eigen::Triplet<double>> entries;
    for (int i = 0; i + 1 < grid.n; ++i) {
        entries.emplace_back(i, i + 1, inv);
        entries.emplace_back(i + 1, i, -inv);
    }
    Eigen::SparseMatrix<double> m(grid.n, grid.n);
    m.setFromTriplets(entries.begin(), entries.end());
    return {grid, m, {}};
}

FluxGridOperator<std::complex<double>> charge_operator(const FluxGrid& grid) {
    auto d = derivative_operator(grid);
    Eigen::SparseMatrix<std::complex<double>> q = d.matrix.cast<std::complex<double>>() * std::complex<double>(0, -hbar);
    return {grid, q, {}};
}

Eigen::MatrixXd flux_elements(const EigenSystem& eig, double qx) {
    const Eigen::VectorXd x = (eig.grid.points().array() - qx) * Phi0;
    return eig.states.transpose() * x.asDiagonal() * eig.states;
}

Eigen::MatrixXd derivative_elements(const EigenSystem& eig) {
    return matrix_elements(derivative_operator(eig.grid), eig);
}

Eigen::MatrixXcd matrix_elements(Observable op, const EigenSystem& eig, double qx) {
    if (op == Observable::charge) return std::complex<double>(0, -hbar) * derivative_elements(eig).cast<std::complex<double>>();
    return flux_elements(eig, qx).cast<std::complex<double>>();
}

double persistent_current(const SquidParams& p, double cjjx, double qx) {
    const auto mins = classical_minima(p, cjjx, qx);
    if (mins.size() < 2) throw PhysicsError("monostable potential: no persistent-current states");
    double best = mins.front();
    double ubest = effective_potential(p, cjjx, qx, best);
    for (double m : mins) {
        const double u = effective_potential(p, cjjx, qx, m);
        if (u < ubest - 1e-30) {
            best = m;
            ubest = u;
        }
    }
    return std::abs(best - qx) * Phi0 / p.l;
}

double single_gap(const SquidParams& p, double loaded_c, double cjjx, double qx) {
    const auto grid = default_grid(p, cjjx, qx);
    const auto eig = diagonalize(build_single_hamiltonian(p, loaded_c, cjjx, qx, grid), 2);
    return energy_to_frequency(eig.energies[1] - eig.energies[0]);
}

double find_cjj_for_delta(const SquidParams& p, double loaded_c, double target_ghz) {
    const double lo = 0.5, hi = 0.8;
    auto f = [&](double c) { return single_gap(p, loaded_c, c) - target_ghz; };
    const double flo = f(lo), fhi = f(hi);
    if (!(flo >= 0 && fhi <= 0)) throw ValidationError("target gap out of achievable range");
    std::uintmax_t iters = 100;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                               boost::math::tools::eps_tolerance<double>(40), iters);
    return 0.5 * (r.first + r.second);
}

}  // namespace fluxq
