#pragma once

#include <string>
#include <vector>

#include "fluxq/coupled.hpp"
#include "fluxq/units.hpp"

namespace fluxq {

struct FitParameter {
    std::string name;
    std::string unit;
    double value;
};

struct FitResult {
    std::vector<FitParameter> parameters;
    double residual_rms = 0;       // model units
    double seed_residual_rms = 0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> history;   // best objective per simplex iteration

    double value(const std::string& name) const;
};

// M12 for coupler bias phi_co in Phi0 (H).
double coupler_m12(const CouplerParams& cp, double phi_co);
// Inverse on the principal branch phi_co in [0, 1) with 1 + beta cos > 0.05.
double bias_for_m12(const CouplerParams& cp, double target);

// Fits (msq_over_l, beta, m12_offset) to (phi_co, M12 in H) pairs.
FitResult fit_coupler(const std::vector<double>& phi_co, const std::vector<double>& m12, const CouplerParams& seed);

// Fits (Ic, L) to (Phi_cjj, Ip in A) pairs at zero tilt; Lcjj taken from seed.
FitResult fit_persistent_current(const std::vector<double>& cjj, const std::vector<double>& ip,
                                 const SquidParams& seed);

// One spectroscopy sweep over the cjj bias of `swept_qubit` with the partner's
// cjj bias held fixed. partner_cjj = 0.5 gives an effective single-qubit line.
struct SpectroSweep {
    int swept_qubit = 0;
    double partner_cjj = 0.5;
    std::vector<double> cjj;
    std::vector<std::vector<double>> lines;  // per point, lowest transitions from ground, GHz
};

struct SpectroOptions {
    SolveOptions solve{6, 4, 129, {}};
    double tol = 1e-7;
    int max_iter = 3000;
};

std::vector<std::vector<double>> spectro_lines(const SystemParams& sys, const SpectroSweep& sweep, int lines,
                                               const SolveOptions& opts);

// Fits (C1, C2, C12, Lcjj1, Lcjj2); Ic and L come from `seed`, which also
// supplies the starting values.
FitResult fit_spectroscopy(const std::vector<SpectroSweep>& data, const SystemParams& seed,
                           const SpectroOptions& opts = {});

}  // namespace fluxq
