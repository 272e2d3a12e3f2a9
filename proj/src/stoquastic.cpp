#include "fluxq/stoquastic.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "fluxq/errors.hpp"
#include "fluxq/pauli.hpp"

namespace fluxq {

using std::numbers::pi;

namespace {

double max_offdiag(const Eigen::Matrix4d& h) {
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) m = std::max(m, std::max(h(i, j), h(j, i)));
    return m;
}

Eigen::Matrix2d rot(double a) {
    Eigen::Matrix2d r;
    r << std::cos(a / 2), std::sin(a / 2), -std::sin(a / 2), std::cos(a / 2);
    return r;
}

// H' entries after rotation of qubit 2, for fixed qubit-1 stage h1.
// Gauge signs act as g_i g_j on entry (i, j).
constexpr std::array<std::array<int, 4>, 4> gauge_signs{{{1, 1, 1, 1}, {-1, -1, 1, 1}, {-1, 1, -1, 1}, {1, -1, -1, 1}}};

double gauge_residual(const Eigen::Matrix4d& h, int g) {
    const auto& s = gauge_signs[g];
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) m = std::max(m, s[i] * s[j] * h(i, j));
    return m;
}

Eigen::Matrix4d rotate_both(const Eigen::Matrix4d& h, double a1, double a2) {
    const Eigen::Matrix4d u = kron2(rot(a1), rot(a2));
    return u.transpose() * h * u;
}

// Off-diagonals and admissibility do not depend on the identity part.
Eigen::Matrix4d traceless(const Eigen::Matrix4d& h) {
    return h - (h.trace() / 4) * Eigen::Matrix4d::Identity();
}

struct Candidate {
    double residual = std::numeric_limits<double>::infinity();
    double a1 = 0, a2 = 0;
};

}  // namespace

std::pair<bool, double> is_stoquastic_in_basis(const Eigen::Matrix4d& h, double tol) {
    const double m = max_offdiag(h);
    return {m <= tol, m};
}

std::pair<bool, double> is_stoquastic_in_basis(const Eigen::Matrix4cd& h, double tol) {
    if (h.imag().cwiseAbs().maxCoeff() > 1e-10) throw ValidationError("invalid input: complex matrix entries");
    return is_stoquastic_in_basis(Eigen::Matrix4d(h.real()), tol);
}

Eigen::Matrix4cd local_unitary(const LocalTransform& t) {
    using C = std::complex<double>;
    auto one = [](double a, bool flip, bool swap) {
        Matrix2<C> u = rot(a).cast<C>();
        if (flip) u = u * pauli<double>(3);
        if (swap) u = ((pauli<double>(0) - C(0, 1) * pauli<double>(1)) / std::sqrt(2.0)) * u;
        return u;
    };
    return kron2(one(t.angle1, t.flip1, t.yz_swap), one(t.angle2, t.flip2, t.yz_swap));
}

Eigen::Matrix4cd apply_transform(const Eigen::Matrix4cd& h, const LocalTransform& t) {
    const Eigen::Matrix4cd u = local_unitary(t);
    return u.adjoint() * h * u;
}

Eigen::Matrix4d apply_transform(const Eigen::Matrix4d& h, const LocalTransform& t) {
    const Eigen::Matrix4cd r = apply_transform(Eigen::Matrix4cd(h.cast<std::complex<double>>()), t);
    if (r.imag().cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, traceless(h).cwiseAbs().maxCoeff()))
        throw ValidationError("transform leaves the real matrices");
    return r.real();
}

StoquasticityVerdict decide_stoquastic(const Eigen::Matrix4d& h, double tol, int grid_n) {
    if (grid_n < 2) throw ValidationError("grid_n too small");
    StoquasticityVerdict v;
    v.tolerance = tol;
    v.max_positive_offdiag = std::numeric_limits<double>::infinity();
    const Eigen::Matrix4d h0 = traceless(h);
    const double scale = std::max(1.0, h0.cwiseAbs().maxCoeff());

    for (int swap = 0; swap < 2; ++swap) {
        Eigen::Matrix4d base = h0;
        if (swap) {
            LocalTransform s;
            s.yz_swap = true;
            const Eigen::Matrix4cd r = apply_transform(Eigen::Matrix4cd(h0.cast<std::complex<double>>()), s);
            if (r.imag().cwiseAbs().maxCoeff() > 1e-10 * scale) continue;
            base = r.real();
        }
        std::array<Candidate, 4> best;
        const double step = pi / grid_n;
        for (int i = 0; i < grid_n; ++i) {
            const Eigen::Matrix4d u1 = kron2(rot(i * step), Eigen::Matrix2d::Identity());
            const Eigen::Matrix4d h1 = u1.transpose() * base * u1;
            for (int j = 0; j < grid_n; ++j) {
                const Eigen::Matrix4d u2 = kron2(Eigen::Matrix2d::Identity(), rot(j * step));
                const Eigen::Matrix4d h2 = u2.transpose() * h1 * u2;
                for (int g = 0; g < 4; ++g) {
                    const double r = gauge_residual(h2, g);
                    if (r < best[g].residual) best[g] = {r, i * step, j * step};
                }
            }
        }
        for (int g = 0; g < 4; ++g) {
            Candidate c = best[g];
            auto f = [&](double a1, double a2) { return gauge_residual(rotate_both(base, a1, a2), g); };
            // zoom: resample a local grid around the incumbent, shrinking the
            // window each pass; unlike a compass search it cannot stall on ridges
            constexpr int m = 10;
            double s = step;
            for (int pass = 0; s > 1e-12 && pass < 200; ++pass) {
                const Candidate start = c;
                int bx = 0, by = 0;
                for (int dx = -m; dx <= m; ++dx)
                    for (int dy = -m; dy <= m; ++dy) {
                        const double a1 = start.a1 + dx * s / m * 2, a2 = start.a2 + dy * s / m * 2;
                        const double r = f(a1, a2);
                        if (r < c.residual) c = {r, a1, a2}, bx = dx, by = dy;
                    }
                if (std::abs(bx) < m && std::abs(by) < m) s *= 0.2;
            }
            if (c.residual < v.max_positive_offdiag) {
                v.max_positive_offdiag = c.residual;
                LocalTransform t;
                t.angle1 = std::fmod(std::fmod(c.a1, 2 * pi) + 2 * pi, 2 * pi);
                t.angle2 = std::fmod(std::fmod(c.a2, 2 * pi) + 2 * pi, 2 * pi);
                t.flip1 = (g == 1 || g == 3);
                t.flip2 = (g == 2 || g == 3);
                t.yz_swap = swap;
                v.curing = t;
            }
        }
    }
    v.stoquastic = v.max_positive_offdiag <= tol;
    if (!v.stoquastic) v.curing.reset();
    return v;
}

RegionMap nonstoq_region_map(const std::vector<double>& xs, const std::function<Eigen::Matrix4d(double)>& model,
                             double tol, int grid_n, double xtol) {
    if (xs.empty()) throw ValidationError("empty sweep");
    RegionMap map;
    for (double x : xs) map.points.push_back({x, decide_stoquastic(model(x), tol, grid_n)});
    for (size_t i = 0; i + 1 < map.points.size(); ++i) {
        bool left = map.points[i].verdict.stoquastic;
        if (left == map.points[i + 1].verdict.stoquastic) continue;
        double a = map.points[i].x, b = map.points[i + 1].x;
        while (std::abs(b - a) > xtol) {
            const double m = 0.5 * (a + b);
            if (decide_stoquastic(model(m), tol, grid_n).stoquastic == left)
                a = m;
            else
                b = m;
        }
        map.boundaries.push_back(0.5 * (a + b));
    }
    return map;
}

}  // namespace fluxq
