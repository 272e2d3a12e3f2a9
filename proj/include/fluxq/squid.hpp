#pragma once

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "fluxq/units.hpp"

namespace fluxq {

// Uniform grid over the body-loop flux, in units of Phi0.
struct FluxGrid {
    double center = 0;
    double halfwidth = 0.4;
    int n = 257;

    void validate() const;
    double spacing() const { return 2.0 * halfwidth / (n - 1); }
    double at(int i) const { return center - halfwidth + i * spacing(); }
    Eigen::VectorXd points() const;
};

template <typename Scalar>
struct FluxGridOperator {
    FluxGrid grid;
    Eigen::SparseMatrix<Scalar> matrix;
    // Potential part of the diagonal (J) when the operator is a Hamiltonian.
    Eigen::VectorXd potential;
};

template <typename Scalar>
bool is_hermitian(const FluxGridOperator<Scalar>& op, double rel_tol = 1e-12) {
    Eigen::SparseMatrix<Scalar> adj = op.matrix.adjoint();
    const double scale = op.matrix.norm();
    return (op.matrix - adj).norm() <= rel_tol * (scale > 0 ? scale : 1.0);
}

struct EigenPairs {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

EigenPairs lowest_eigenpairs(const Eigen::MatrixXd& symmetric, int k);
EigenPairs lowest_eigenpairs_tridiagonal(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, int k);

struct EigenSystem {
    FluxGrid grid;
    Eigen::VectorXd energies;   // J, ascending
    Eigen::MatrixXd states;     // n x k, orthonormal columns (sum of squares = 1)
    Eigen::VectorXd potential;  // J on the grid, empty if the operator had none

    int k() const { return static_cast<int>(energies.size()); }
};

// Eliminates the cjj flux by minimization over Phi_cjj in cjjx +- 0.25.
// Fluxes in Phi0 units, result in J.
double effective_potential(const SquidParams& p, double cjjx, double qx, double q);
// Memoized evaluation over a whole grid.
std::shared_ptr<const Eigen::VectorXd> effective_potential(const SquidParams& p, double cjjx, double qx,
                                                           const FluxGrid& grid);
void clear_potential_cache();

// Local minima of U_eff in qx +- 0.6, ascending in flux.
std::vector<double> classical_minima(const SquidParams& p, double cjjx, double qx);

// Grid centred on qx wide enough for both wells.
FluxGrid default_grid(const SquidParams& p, double cjjx, double qx, int n = 257);

FluxGridOperator<double> build_single_hamiltonian(const SquidParams& p, double loaded_c, double cjjx,
                                                  double qx, const FluxGrid& grid);
// Same kinetic term over an arbitrary potential sampled on the grid.
FluxGridOperator<double> build_hamiltonian(const Eigen::VectorXd& potential, double loaded_c,
                                           const FluxGrid& grid);

// k lowest eigenpairs. Phases: the ground state's largest component is
// positive, the first excited state has a positive dipole <0|phi-center|1>,
// higher states have their largest component positive.
// Throws PhysicsError if the ground state leaks to the grid edge.
EigenSystem diagonalize(const FluxGridOperator<double>& h, int k);
EigenPairs diagonalize(const Eigen::MatrixXd& symmetric, int k);

FluxGridOperator<double> flux_operator(const FluxGrid& grid, double qx);           // Wb
FluxGridOperator<double> derivative_operator(const FluxGrid& grid);               // 1/Wb
FluxGridOperator<std::complex<double>> charge_operator(const FluxGrid& grid);     // C

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix_elements(const FluxGridOperator<Scalar>& op,
                                                                      const EigenSystem& eig) {
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> v = eig.states.cast<Scalar>();
    return v.adjoint() * (op.matrix * v);
}

enum class Observable { charge, flux_deviation };

Eigen::MatrixXcd matrix_elements(Observable op, const EigenSystem& eig, double qx);

// Real parts used for coupled assembly: Q = -i hbar A.
Eigen::MatrixXd flux_elements(const EigenSystem& eig, double qx);
Eigen::MatrixXd derivative_elements(const EigenSystem& eig);

// Classical persistent current |phi* - qx| L^-1 in the deeper well (A).
double persistent_current(const SquidParams& p, double cjjx, double qx);

// Gap eps2 - eps1 in GHz on the default grid.
double single_gap(const SquidParams& p, double loaded_c, double cjjx, double qx = 0.0);

// Phi_cjj in (0.5, 0.8) with single_gap = target within 1 MHz.
double find_cjj_for_delta(const SquidParams& p, double loaded_c, double target_ghz);

}  // namespace fluxq
