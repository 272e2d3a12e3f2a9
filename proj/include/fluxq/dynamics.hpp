#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fluxq/coupled.hpp"
#include "fluxq/reduction.hpp"

namespace fluxq {

// Piecewise-linear control, held constant outside its breakpoints.
struct PiecewiseLinear {
    std::vector<double> t;  // ns, sorted
    std::vector<double> v;

    static PiecewiseLinear constant(double value) { return {{0.0}, {value}}; }
    void validate() const;
    double operator()(double time) const;
    double min() const;
    double max() const;
};

inline constexpr double default_ramp_ns = 0.2;

struct PulseSchedule {
    PiecewiseLinear cjj1 = PiecewiseLinear::constant(0.5);  // Phi0
    PiecewiseLinear cjj2 = PiecewiseLinear::constant(0.5);
    PiecewiseLinear q1 = PiecewiseLinear::constant(0.0);
    PiecewiseLinear q2 = PiecewiseLinear::constant(0.0);
    PiecewiseLinear m12 = PiecewiseLinear::constant(0.0);  // H
    double t_end = 0;                                        // ns

    void validate() const;
    Controls at(double time) const;
};

struct CacheOptions {
    int nodes = 64;  // per varying axis, or along the path
    SolveOptions solve;
    bool zero_jyy = false;  // drop the yy term after reduction
};

// Reduced Hamiltonians tabulated over the controls a schedule visits.
// Varying controls that move along one straight segment are tabulated on
// that segment; otherwise on a tensor grid over the varying axes. Cubic
// (Catmull-Rom) interpolation of the matrix entries in between.
class SnapshotCache {
public:
    SnapshotCache(const SystemParams& sys, const PulseSchedule& schedule, const CacheOptions& opts = {});

    // Computational-basis matrix in GHz with the identity part removed.
    Eigen::Matrix4d hamiltonian(const Controls& c) const;
    ReducedTwoQubitHamiltonian snapshot(const Controls& c) const;
    size_t node_count() const { return values_.size(); }
    bool path_mode() const { return path_; }
    int bridged_nodes() const { return bridged_; }

private:
    std::array<double, 5> coords(const Controls& c) const;
    Controls controls_at(const std::vector<double>& u) const;
    Eigen::Matrix4d node(size_t flat) const { return values_[flat]; }

    SystemParams sys_;
    CacheOptions opts_;
    bool path_ = false;
    int bridged_ = 0;
    std::array<double, 5> lo_{}, hi_{};
    std::vector<int> axes_;  // varying axis indices
    std::vector<int> dims_;
    std::vector<Eigen::Matrix4d> values_;
};

ReducedTwoQubitHamiltonian snapshot_reduced_hamiltonian(const SystemParams& sys, const Controls& c,
                                                        const SolveOptions& opts = {});

enum class Integrator { rk4, exponential_midpoint };

struct EvolveOptions {
    double dt = 5e-4;  // ns
    int stride = 1;    // store every stride-th step
    Integrator method = Integrator::rk4;
    double norm_bound = 1e-8;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXcd> states;
    std::vector<Eigen::VectorXd> populations;
};

using HamiltonianAt = std::function<Eigen::MatrixXd(double)>;  // GHz, time in ns

Trajectory evolve(const Eigen::VectorXcd& psi0, const HamiltonianAt& h, double t0, double t1,
                  const EvolveOptions& opts = {});
Trajectory evolve(const Eigen::VectorXcd& psi0, const PulseSchedule& schedule, const SnapshotCache& cache,
                  const EvolveOptions& opts = {});
// exp(-2 pi i H t) for constant H in GHz, t in ns.
Eigen::MatrixXcd propagator(const Eigen::MatrixXd& h, double t);

// Basis order dd, du, ud, uu.
enum class BasisState { dd = 0, du = 1, ud = 2, uu = 3 };
BasisState parse_basis_state(const std::string& s);
std::string basis_state_name(BasisState s);

struct ProtocolOptions {
    double latched_cjj = 0.72;
    double ramp = default_ramp_ns;
    CacheOptions cache;
    // Latched couplings reach |Jzz| ~ 12 GHz; the finer step keeps RK4 norm
    // drift well inside the bound.
    EvolveOptions evolve{2.5e-4};
};

struct OscillationResult {
    std::vector<double> dwell;                   // ns
    std::vector<Eigen::Vector4d> populations;    // per dwell time
};

// Barriers lowered from latched to (cjj1, cjj2) over the ramp, dwell tau,
// quench back to latched, then project on the computational basis.
PulseSchedule oscillation_schedule(double cjj1, double cjj2, double q1, double q2, double m12, double dwell,
                                   const ProtocolOptions& opts = {});
OscillationResult run_oscillation_protocol(const SystemParams& sys, BasisState init, double cjj1, double cjj2,
                                           double m12, double q1, double q2, const std::vector<double>& dwell,
                                           const ProtocolOptions& opts = {});

struct OscillationMap {
    std::vector<double> dwell;  // rows
    std::vector<double> m12;    // columns, H
    Eigen::MatrixXd population;
};

OscillationMap oscillation_map(const SystemParams& sys, BasisState init, BasisState tracked, double cjj1,
                               double cjj2, double q1, double q2, const std::vector<double>& m12,
                               const std::vector<double>& dwell, const ProtocolOptions& opts = {});

// Dominant frequency (GHz) of samples inside [start, start + len] from a
// damped-sinusoid least-squares fit seeded by the periodogram peak.
double estimate_frequency(const std::vector<double>& t, const std::vector<double>& y, double window_start,
                          double window_len = 0.4);

}  // namespace fluxq
