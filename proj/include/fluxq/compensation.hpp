#pragma once

#include <vector>

#include "fluxq/dynamics.hpp"

namespace fluxq {

struct DistortionTail {
    double amplitude;  // Phi0
    double tau;        // ns
};

// delta Phi_cjj(t) = sum_k A_k exp(-(t - edge) / tau_k) for t >= edge.
struct DistortionModel {
    std::vector<DistortionTail> tails;
    double edge = 0;

    void validate() const;
    double operator()(double t) const;
};

// Single-qubit gap versus Phi_cjj, tabulated and cubic-interpolated.
class DeltaCurve {
public:
    DeltaCurve(const SystemParams& sys, int qubit, double lo, double hi, int nodes = 41,
               const SolveOptions& opts = {});
    double operator()(double cjj) const;
    double derivative(double cjj) const;
    double lo() const { return lo_; }
    double hi() const { return hi_; }

private:
    double lo_, hi_;
    std::vector<double> values_;
};

struct CompensationOptions {
    double duration = 4.0;     // ns
    double window = 0.4;       // ns
    double window_step = 0.1;  // ns
    double sample = 0.005;     // ns
    int max_iter = 5;
    double tolerance = 0.01;   // relative
    EvolveOptions evolve;
};

struct CompensationIteration {
    std::vector<double> tau;      // window centres, ns
    std::vector<double> delta_m;  // GHz
    std::vector<double> applied;  // applied Phi_cjj at the centres
    double max_rel_error = 0;
};

struct CompensationResult {
    double operating_cjj = 0;
    double slope = 0;         // dDelta/dPhi_cjj at the operating point, GHz per Phi0
    PiecewiseLinear applied;  // corrected Phi_cjj schedule
    std::vector<CompensationIteration> iterations;
    bool converged = false;
};

// P_down(t) for a qubit prepared up under H = -Delta(Phi(t))/2 sigma_x.
std::vector<double> single_qubit_trace(const DeltaCurve& delta, const PiecewiseLinear& applied,
                                       const DistortionModel& distortion, const CompensationOptions& opts,
                                       std::vector<double>* times);

// Window estimates Delta_m(tau) and first-order corrections
// Phi_new = Phi - (Delta_m - Delta) / (dDelta/dPhi) until every window sits
// within tolerance of the target.
CompensationResult compensate_distortion(const DeltaCurve& delta, double target_ghz,
                                         const DistortionModel& distortion, const CompensationOptions& opts = {});
CompensationResult compensate_distortion(const SystemParams& sys, const DistortionModel& distortion,
                                         double target_ghz, const CompensationOptions& opts = {});

}  // namespace fluxq
