#pragma once

#include <array>

#include <Eigen/Dense>

#include "fluxq/coupled.hpp"
#include "fluxq/pauli.hpp"
#include "fluxq/squid.hpp"

namespace fluxq {

struct MixingAngle {
    double theta = 0;  // rad, down = cos(theta) chi1 + sin(theta) chi2
    double left_population = 0;
};

// Top of the barrier between the two deepest wells of the stored potential (Phi0).
double barrier_location(const EigenSystem& eig);

MixingAngle mixing_angle(const EigenSystem& eig, double barrier);

struct ReducedTwoQubitHamiltonian {
    double delta1 = 0, delta2 = 0;  // GHz
    double h1 = 0, h2 = 0;
    Eigen::Matrix3d J = Eigen::Matrix3d::Zero();  // J(alpha, beta), alpha, beta = x, y, z
    double offset = 0;
    Eigen::Vector4d na = Eigen::Vector4d::Zero();
    double na_min = 0;
    std::array<int, 4> levels{0, 1, 2, 3};               // coupled levels kept, ascending
    Eigen::Vector4d energies = Eigen::Vector4d::Zero();  // their energies, GHz
    Eigen::Matrix4d matrix = Eigen::Matrix4d::Zero();    // basis dd, du, ud, uu; GHz
    Eigen::Matrix4d coefficients = Eigen::Matrix4d::Zero();  // full Pauli table c(a, b)

    double jxx() const { return J(0, 0); }
    double jyy() const { return J(1, 1); }
    double jzz() const { return J(2, 2); }
    double jxz() const { return J(0, 2); }
    double jzx() const { return J(2, 0); }
    bool reliable() const { return na_min >= 0.95; }
};

inline constexpr double na_hard_floor = 0.8;
// Coupled levels searched for the computational manifold.
inline constexpr int reduction_search_levels = 20;

ReducedTwoQubitHamiltonian reduce(const CoupledSpectrum& cs, const MixingAngle& t1, const MixingAngle& t2);

// Rebuilds the real 4x4 from a Pauli table, or from the named fields.
Eigen::Matrix4d compose_real(const Eigen::Matrix4d& c);
Eigen::Matrix4d reduced_matrix(const ReducedTwoQubitHamiltonian& r);

// Eigenvalues when only Delta1, Delta2 and Jyy are present, ascending.
std::array<double, 4> block_eigenvalues(double delta1, double delta2, double jyy);

// Full pipeline at one operating point.
ReducedTwoQubitHamiltonian reduced_hamiltonian(const SystemParams& sys, const Controls& c,
                                               const SolveOptions& opts = {});

}  // namespace fluxq
