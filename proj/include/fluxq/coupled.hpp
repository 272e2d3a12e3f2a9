#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fluxq/squid.hpp"
#include "fluxq/units.hpp"

namespace fluxq {

struct LoadedCapacitances {
    double c1_tilde;
    double c2_tilde;
};

LoadedCapacitances loaded_capacitances(double c1, double c2, double c12);
// Prefactor of Q1 Q2 in the Hamiltonian (1/F).
double charge_coupling(double c1, double c2, double c12);

// Truncated single-SQUID eigenbasis with the operator elements needed for coupling.
struct QubitBasis {
    EigenSystem eig;
    double qx = 0;
    Eigen::MatrixXd flux;        // <mu|phi - qx|nu>, Wb
    Eigen::MatrixXd derivative;  // <mu|d/dphi|nu>, 1/Wb; Q = -i hbar derivative
};

QubitBasis qubit_basis(const SquidParams& p, double loaded_c, double cjjx, double qx, int levels,
                       int grid_n = 257);

struct Controls {
    double cjj1 = 0.5;  // Phi0
    double cjj2 = 0.5;
    double q1 = 0;
    double q2 = 0;
    double m12 = 0;  // H
};

struct CouplingOptions {
    bool inductive = true;
    bool charge = true;
};

Eigen::MatrixXd build_coupled_hamiltonian(const QubitBasis& b1, const QubitBasis& b2, double m12,
                                          const SystemParams& sys, CouplingOptions couplings = {});

struct CoupledSpectrum {
    Eigen::VectorXd energies;                 // J, ascending
    std::vector<Eigen::MatrixXd> amplitudes;  // per level, n1 x n2 tensor c_{mu nu}
    int n1 = 0;
    int n2 = 0;
};

CoupledSpectrum coupled_spectrum(const Eigen::MatrixXd& h, int n1, int n2, int k);

struct SolveOptions {
    int levels = 10;
    int k = 6;
    int grid_n = 257;
    CouplingOptions couplings;
};

struct CoupledSolution {
    QubitBasis b1;
    QubitBasis b2;
    CoupledSpectrum spectrum;
};

CoupledSolution solve_coupled(const SystemParams& sys, const Controls& c, const SolveOptions& opts = {});

enum class LineSource { ground, first_excited };

// eps_a - eps_source in GHz for every level above the source.
std::vector<double> transition_lines(const CoupledSpectrum& s, LineSource from);

// eps_{lower+1} - eps_lower in GHz, levels counted from 0.
double level_gap(const CoupledSpectrum& s, int lower);

struct Anticrossing {
    double gap;
    double location;
};

// Minimum of a sampled gap curve, refined by a parabola through the
// three points around the discrete minimum.
Anticrossing anticrossing(const std::vector<double>& control, const std::vector<double>& gap);

// Gap of one qubit with the partner parked at the monostable point.
double effective_delta(const SystemParams& sys, int qubit, double cjj, const SolveOptions& opts = {});
double find_cjj_for_effective_delta(const SystemParams& sys, int qubit, double target_ghz,
                                    const SolveOptions& opts = {});

}  // namespace fluxq
