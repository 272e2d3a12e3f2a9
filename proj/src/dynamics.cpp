#include "fluxq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "fluxq/errors.hpp"
#include "fluxq/optimize.hpp"
#include "fluxq/sweep.hpp"

namespace fluxq {

using std::numbers::pi;
using cd = std::complex<double>;

void PiecewiseLinear::validate() const {
    if (t.empty() || t.size() != v.size()) throw ValidationError("control needs matching breakpoint lists");
    for (size_t i = 1; i < t.size(); ++i)
        if (!(t[i] >= t[i - 1])) throw ValidationError("breakpoints must be time-sorted");
}

double PiecewiseLinear::operator()(double time) const {
    if (time <= t.front()) return v.front();
    if (time >= t.back()) return v.back();
    const size_t i = std::upper_bound(t.begin(), t.end(), time) - t.begin();
    const double span = t[i] - t[i - 1];
    if (span <= 0) return v[i];
    const double w = (time - t[i - 1]) / span;
    return v[i - 1] + w * (v[i] - v[i - 1]);
}

double PiecewiseLinear::min() const { return *std::min_element(v.begin(), v.end()); }
double PiecewiseLinear::max() const { return *std::max_element(v.begin(), v.end()); }

void PulseSchedule::validate() const {
    for (const auto* c : {&cjj1, &cjj2, &q1, &q2, &m12}) c->validate();
    if (!(t_end > 0)) throw ValidationError("schedule needs a positive duration");
}

Controls PulseSchedule::at(double time) const { return {cjj1(time), cjj2(time), q1(time), q2(time), m12(time)}; }

namespace {

constexpr std::array<double, 5> axis_scale{1.0, 1.0, 1.0, 1.0, 1e-12};

std::array<double, 5> raw(const Controls& c) { return {c.cjj1, c.cjj2, c.q1, c.q2, c.m12}; }

Controls from_raw(const std::array<double, 5>& x) { return {x[0], x[1], x[2], x[3], x[4]}; }

// Catmull-Rom weights on node offsets -1..2, folded onto valid nodes with
// linear ghost points at the ends.
std::vector<std::pair<int, double>> cubic_weights(double u, int n) {
    if (n == 1) return {{0, 1.0}};
    u = std::clamp(u, 0.0, double(n - 1));
    int i = std::min(static_cast<int>(std::floor(u)), n - 2);
    const double t = u - i;
    if (n == 2) return {{0, 1 - t}, {1, t}};
    const double t2 = t * t, t3 = t2 * t;
    double w[4] = {0.5 * (-t3 + 2 * t2 - t), 0.5 * (3 * t3 - 5 * t2 + 2), 0.5 * (-3 * t3 + 4 * t2 + t),
                   0.5 * (t3 - t2)};
    std::vector<std::pair<int, double>> out;
    auto add = [&](int k, double wk) {
        for (auto& p : out)
            if (p.first == k) {
                p.second += wk;
                return;
            }
        out.emplace_back(k, wk);
    };
    for (int k = 0; k < 4; ++k) {
        const int idx = i - 1 + k;
        if (idx < 0) {
            add(0, 2 * w[k]);
            add(1, -w[k]);
        } else if (idx > n - 1) {
            add(n - 1, 2 * w[k]);
            add(n - 2, -w[k]);
        } else {
            add(idx, w[k]);
        }
    }
    return out;
}

Eigen::Matrix4d traceless(const ReducedTwoQubitHamiltonian& r, bool zero_jyy) {
    Eigen::Matrix4d m = r.matrix - r.offset * Eigen::Matrix4d::Identity();
    if (zero_jyy) m -= r.jyy() * pauli_product<double>(2, 2).real();
    return m;
}

}  // namespace

ReducedTwoQubitHamiltonian snapshot_reduced_hamiltonian(const SystemParams& sys, const Controls& c,
                                                        const SolveOptions& opts) {
    return reduced_hamiltonian(sys, c, opts);
}

SnapshotCache::SnapshotCache(const SystemParams& sys, const PulseSchedule& schedule, const CacheOptions& opts)
    : sys_(sys), opts_(opts) {
    schedule.validate();
    if (opts.nodes < 2) throw ValidationError("cache needs at least two nodes per axis");
    const PiecewiseLinear* ctl[5] = {&schedule.cjj1, &schedule.cjj2, &schedule.q1, &schedule.q2, &schedule.m12};
    for (int a = 0; a < 5; ++a) {
        lo_[a] = ctl[a]->min();
        hi_[a] = ctl[a]->max();
        if (hi_[a] - lo_[a] > 1e-12 * axis_scale[a]) axes_.push_back(a);
    }

    // Controls at every breakpoint, normalized per axis.
    std::vector<double> times;
    for (auto* c : ctl) times.insert(times.end(), c->t.begin(), c->t.end());
    std::sort(times.begin(), times.end());
    std::vector<Eigen::VectorXd> pts;
    for (double t : times) {
        const auto x = raw(schedule.at(t));
        Eigen::VectorXd p(axes_.size());
        for (size_t k = 0; k < axes_.size(); ++k) p[k] = (x[axes_[k]] - lo_[axes_[k]]) / (hi_[axes_[k]] - lo_[axes_[k]]);
        pts.push_back(p);
    }
    if (axes_.size() >= 2) {
        // Straight segment between the two breakpoints farthest apart?
        size_t ia = 0, ib = 0;
        double far = 0;
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i + 1; j < pts.size(); ++j)
                if ((pts[i] - pts[j]).norm() > far) {
                    far = (pts[i] - pts[j]).norm();
                    ia = i;
                    ib = j;
                }
        const Eigen::VectorXd d = (pts[ib] - pts[ia]) / far;
        bool line = far > 0;
        for (const auto& p : pts) {
            const Eigen::VectorXd r = p - pts[ia];
            if ((r - r.dot(d) * d).norm() > 1e-9) line = false;
        }
        if (line) {
            path_ = true;
            // remember the ends in raw units inside lo_/hi_ (lo_ = start, hi_ = end)
            std::array<double, 5> a = lo_, b = lo_;
            for (size_t k = 0; k < axes_.size(); ++k) {
                const int ax = axes_[k];
                a[ax] = lo_[ax] + pts[ia][k] * (hi_[ax] - lo_[ax]);
                b[ax] = lo_[ax] + pts[ib][k] * (hi_[ax] - lo_[ax]);
            }
            lo_ = a;
            hi_ = b;
        }
    }
    size_t total = 1;
    if (path_) {
        dims_ = {opts.nodes};
        total = opts.nodes;
    } else {
        for (size_t k = 0; k < axes_.size(); ++k) {
            dims_.push_back(opts.nodes);
            total *= opts.nodes;
        }
    }
    std::function<Eigen::Matrix4d(size_t)> build = [&](size_t flat) {
        std::vector<double> u;
        size_t rem = flat;
        for (int dim : dims_) {
            u.push_back(double(rem % dim) / (dim - 1));
            rem /= dim;
        }
        try {
            return traceless(reduced_hamiltonian(sys_, controls_at(u), opts_.solve), opts_.zero_jyy);
        } catch (const PhysicsError&) {
            if (!path_) throw;
            return Eigen::Matrix4d(Eigen::Matrix4d::Constant(std::numeric_limits<double>::quiet_NaN()));
        }
    };
    values_ = parallel_map(total, build);

    // Isolated path nodes where a computational state hybridizes with an
    // intrawell excitation are bridged from their valid neighbours.
    auto bad = [&](size_t i) { return values_[i].hasNaN(); };
    for (size_t i = 0; i < values_.size(); ++i) {
        if (!bad(i)) continue;
        size_t a = i, b = i;
        while (a > 0 && bad(a)) --a;
        while (b + 1 < values_.size() && bad(b)) ++b;
        if (bad(a) || bad(b)) throw PhysicsError("reduction invalid along the whole path end");
        const double w = double(i - a) / double(b - a);
        values_[i] = (1 - w) * values_[a] + w * values_[b];
        ++bridged_;
    }
}

Controls SnapshotCache::controls_at(const std::vector<double>& u) const {
    std::array<double, 5> x = lo_;
    if (path_) {
        for (int ax : axes_) x[ax] = lo_[ax] + u[0] * (hi_[ax] - lo_[ax]);
    } else {
        for (size_t k = 0; k < axes_.size(); ++k) x[axes_[k]] = lo_[axes_[k]] + u[k] * (hi_[axes_[k]] - lo_[axes_[k]]);
    }
    return from_raw(x);
}

std::array<double, 5> SnapshotCache::coords(const Controls& c) const {
    const auto x = raw(c);
    std::array<double, 5> u{};
    if (path_) {
        double num = 0, den = 0;
        for (int ax : axes_) {
            num += (x[ax] - lo_[ax]) / (hi_[ax] - lo_[ax]);
            den += 1.0;
        }
        const double t = num / den;
        for (int ax : axes_) {
            const double expect = lo_[ax] + t * (hi_[ax] - lo_[ax]);
            if (std::abs(expect - x[ax]) > 1e-6 * std::abs(hi_[ax] - lo_[ax]))
                throw ValidationError("controls off the tabulated path");
        }
        u[0] = t * (dims_[0] - 1);
    } else {
        for (size_t k = 0; k < axes_.size(); ++k) {
            const int ax = axes_[k];
            const double t = (x[ax] - lo_[ax]) / (hi_[ax] - lo_[ax]);
            if (t < -1e-9 || t > 1 + 1e-9) throw ValidationError("controls outside the tabulated range");
            u[k] = t * (dims_[k] - 1);
        }
    }
    return u;
}

Eigen::Matrix4d SnapshotCache::hamiltonian(const Controls& c) const {
    if (dims_.empty()) return values_.front();
    const auto u = coords(c);
    std::vector<std::vector<std::pair<int, double>>> w;
    for (size_t k = 0; k < dims_.size(); ++k) w.push_back(cubic_weights(u[k], dims_[k]));
    Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
    std::vector<size_t> pos(dims_.size(), 0);
    while (true) {
        size_t flat = 0, stride = 1;
        double weight = 1;
        for (size_t k = 0; k < dims_.size(); ++k) {
            flat += w[k][pos[k]].first * stride;
            weight *= w[k][pos[k]].second;
            stride *= dims_[k];
        }
        out += weight * values_[flat];
        size_t k = 0;
        while (k < dims_.size() && ++pos[k] == w[k].size()) pos[k++] = 0;
        if (k == dims_.size()) break;
    }
    return out;
}

ReducedTwoQubitHamiltonian SnapshotCache::snapshot(const Controls& c) const {
    ReducedTwoQubitHamiltonian r;
    r.matrix = hamiltonian(c);
    r.coefficients = pauli_decompose(r.matrix);
    const auto& k = r.coefficients;
    r.offset = k(0, 0);
    r.delta1 = -2 * k(1, 0);
    r.delta2 = -2 * k(0, 1);
    r.h1 = k(3, 0);
    r.h2 = k(0, 3);
    r.J = k.bottomRightCorner<3, 3>();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(r.matrix);
    r.energies = es.eigenvalues();
    r.na = Eigen::Vector4d::Constant(std::numeric_limits<double>::quiet_NaN());
    r.na_min = std::numeric_limits<double>::quiet_NaN();
    return r;
}

Eigen::MatrixXcd propagator(const Eigen::MatrixXd& h, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const Eigen::VectorXcd phase = (es.eigenvalues().cast<cd>() * cd(0, -2 * pi * t)).array().exp();
    const Eigen::MatrixXcd v = es.eigenvectors().cast<cd>();
    return v * phase.asDiagonal() * v.adjoint();
}

Trajectory evolve(const Eigen::VectorXcd& psi0, const HamiltonianAt& h, double t0, double t1,
                  const EvolveOptions& opts) {
    if (std::abs(psi0.squaredNorm() - 1) > opts.norm_bound) throw ValidationError("initial state must be normalized");
    if (!(opts.dt > 0) || opts.stride < 1) throw ValidationError("invalid step settings");
    const long steps = std::max(1L, static_cast<long>(std::ceil((t1 - t0) / opts.dt - 1e-9)));
    const double dt = (t1 - t0) / steps;
    Trajectory tr;
    Eigen::VectorXcd psi = psi0;
    auto record = [&](double t) {
        const double drift = std::abs(psi.squaredNorm() - 1);
        if (drift > opts.norm_bound) throw NonConvergenceError("step-size error: norm drift exceeds bound");
        tr.times.push_back(t);
        tr.states.push_back(psi);
        tr.populations.push_back(psi.cwiseAbs2());
    };
    record(t0);
    const cd mi(0, -2 * pi);
    for (long s = 0; s < steps; ++s) {
        const double t = t0 + s * dt;
        if (opts.method == Integrator::rk4) {
            const Eigen::MatrixXd ha = h(t), hm = h(t + 0.5 * dt), hb = h(t + dt);
            const Eigen::VectorXcd k1 = mi * (ha.cast<cd>() * psi);
            const Eigen::VectorXcd k2 = mi * (hm.cast<cd>() * (psi + 0.5 * dt * k1));
            const Eigen::VectorXcd k3 = mi * (hm.cast<cd>() * (psi + 0.5 * dt * k2));
            const Eigen::VectorXcd k4 = mi * (hb.cast<cd>() * (psi + dt * k3));
            psi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } else {
            psi = propagator(h(t + 0.5 * dt), dt) * psi;
        }
        if ((s + 1) % opts.stride == 0 || s + 1 == steps) record(t0 + (s + 1) * dt);
    }
    return tr;
}

Trajectory evolve(const Eigen::VectorXcd& psi0, const PulseSchedule& schedule, const SnapshotCache& cache,
                  const EvolveOptions& opts) {
    schedule.validate();
    return evolve(
        psi0, [&](double t) { return Eigen::MatrixXd(cache.hamiltonian(schedule.at(t))); }, 0.0, schedule.t_end,
        opts);
}

BasisState parse_basis_state(const std::string& s) {
    static const std::array<std::string, 4> names{"dd", "du", "ud", "uu"};
    for (int i = 0; i < 4; ++i)
        if (s == names[i]) return static_cast<BasisState>(i);
    throw ValidationError("unknown basis state '" + s + "' (use dd, du, ud, uu)");
}

std::string basis_state_name(BasisState s) {
    static const std::array<std::string, 4> names{"dd", "du", "ud", "uu"};
    return names[static_cast<int>(s)];
}

PulseSchedule oscillation_schedule(double cjj1, double cjj2, double q1, double q2, double m12, double dwell,
                                   const ProtocolOptions& opts) {
    const double r = opts.ramp, l = opts.latched_cjj;
    PulseSchedule s;
    s.cjj1 = {{0, r, r + dwell, 2 * r + dwell}, {l, cjj1, cjj1, l}};
    s.cjj2 = {{0, r, r + dwell, 2 * r + dwell}, {l, cjj2, cjj2, l}};
    s.q1 = PiecewiseLinear::constant(q1);
    s.q2 = PiecewiseLinear::constant(q2);
    s.m12 = PiecewiseLinear::constant(m12);
    s.t_end = 2 * r + dwell;
    return s;
}

OscillationResult run_oscillation_protocol(const SystemParams& sys, BasisState init, double cjj1, double cjj2,
                                           double m12, double q1, double q2, const std::vector<double>& dwell,
                                           const ProtocolOptions& opts) {
    if (dwell.empty()) throw ValidationError("dwell grid is empty");
    for (double d : dwell)
        if (!(d >= 0)) throw ValidationError("dwell times must be >= 0");
    const auto schedule = oscillation_schedule(cjj1, cjj2, q1, q2, m12, 1.0, opts);
    const SnapshotCache cache(sys, schedule, opts.cache);
    const double r = opts.ramp, l = opts.latched_cjj;
    auto ramp_h = [&](bool down) {
        return [&, down](double t) {
            const double w = down ? t / r : 1 - t / r;
            Controls c{l + w * (cjj1 - l), l + w * (cjj2 - l), q1, q2, m12};
            return Eigen::MatrixXd(cache.hamiltonian(c));
        };
    };
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(4);
    psi0[static_cast<int>(init)] = 1;
    EvolveOptions eo = opts.evolve;
    eo.stride = 1 << 30;
    const Eigen::VectorXcd psi_a = evolve(psi0, ramp_h(true), 0.0, r, eo).states.back();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(cache.hamiltonian({cjj1, cjj2, q1, q2, m12}));
    const Eigen::Matrix4cd v = es.eigenvectors().cast<cd>();
    const Eigen::Vector4cd a = v.adjoint() * psi_a;
    OscillationResult out;
    out.dwell = dwell;
    for (double tau : dwell) {
        const Eigen::Vector4cd ph = (es.eigenvalues().cast<cd>() * cd(0, -2 * pi * tau)).array().exp();
        const Eigen::VectorXcd psi_t = v * ph.cwiseProduct(a);
        const auto tr = evolve(psi_t, ramp_h(false), 0.0, r, eo);
        out.populations.push_back(tr.populations.back());
    }
    return out;
}

OscillationMap oscillation_map(const SystemParams& sys, BasisState init, BasisState tracked, double cjj1,
                               double cjj2, double q1, double q2, const std::vector<double>& m12,
                               const std::vector<double>& dwell, const ProtocolOptions& opts) {
    if (m12.empty()) throw ValidationError("empty M12 grid");
    std::function<Eigen::VectorXd(size_t)> column = [&](size_t j) {
        const auto res = run_oscillation_protocol(sys, init, cjj1, cjj2, m12[j], q1, q2, dwell, opts);
        Eigen::VectorXd col(dwell.size());
        for (size_t i = 0; i < dwell.size(); ++i) col[i] = res.populations[i][static_cast<int>(tracked)];
        return col;
    };
    const auto cols = parallel_map(m12.size(), column);
    OscillationMap map{dwell, m12, Eigen::MatrixXd(dwell.size(), m12.size())};
    for (size_t j = 0; j < m12.size(); ++j) map.population.col(j) = cols[j];
    return map;
}

namespace {

std::mutex fftw_mutex;

double periodogram_peak(const Eigen::VectorXd& y, double dt) {
    const int n = static_cast<int>(y.size());
    int m = 1;
    while (m < 16 * n) m <<= 1;
    std::vector<double> in(m, 0.0);
    for (int i = 0; i < n; ++i) in[i] = y[i];
    std::vector<fftw_complex> out(m / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        plan = fftw_plan_dft_r2c_1d(m, in.data(), out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        fftw_destroy_plan(plan);
    }
    std::vector<double> p(m / 2 + 1);
    for (int k = 0; k <= m / 2; ++k) p[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    int kmax = 1;
    for (int k = 1; k < m / 2; ++k)
        if (p[k] > p[kmax]) kmax = k;
    double shift = 0;
    if (kmax > 0 && kmax < m / 2) {
        const double den = p[kmax - 1] - 2 * p[kmax] + p[kmax + 1];
        if (den < 0) shift = 0.5 * (p[kmax - 1] - p[kmax + 1]) / den;
    }
    return (kmax + shift) / (m * dt);
}

}  // namespace

double estimate_frequency(const std::vector<double>& t, const std::vector<double>& y, double window_start,
                          double window_len) {
    if (t.size() != y.size()) throw ValidationError("trace size mismatch");
    std::vector<double> ts, ys;
    for (size_t i = 0; i < t.size(); ++i)
        if (t[i] >= window_start - 1e-12 && t[i] <= window_start + window_len + 1e-12) {
            ts.push_back(t[i] - window_start);
            ys.push_back(y[i]);
        }
    const int n = static_cast<int>(ts.size());
    if (n < 8) throw ValidationError("window holds fewer than 8 samples");
    const Eigen::Map<const Eigen::VectorXd> yv(ys.data(), n);
    if (yv.maxCoeff() - yv.minCoeff() < 1e-6) throw PhysicsError("flat trace: no oscillation detected");
    const double dt = (ts.back() - ts.front()) / (n - 1);
    const double f0 = periodogram_peak(yv.array() - yv.mean(), dt);

    auto fit = [&](const Eigen::VectorXd& p) {
        Eigen::MatrixXd a(n, 3);
        for (int i = 0; i < n; ++i) {
            const double env = std::exp(-p[1] * ts[i]);
            a(i, 0) = 1;
            a(i, 1) = env * std::cos(2 * pi * p[0] * ts[i]);
            a(i, 2) = env * std::sin(2 * pi * p[0] * ts[i]);
        }
        const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(yv);
        return (a * coef - yv).squaredNorm();
    };
    Eigen::VectorXd x0(2), scale(2);
    x0 << f0, 0.0;
    scale << 0.02 * std::max(f0, 1.0 / window_len), 0.1;
    const auto r = nelder_mead(fit, x0, scale, 1e-13, 4000);
    return std::abs(r.x[0]);
}

}  // namespace fluxq
