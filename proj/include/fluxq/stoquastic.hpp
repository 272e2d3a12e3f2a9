#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fluxq {

// y-axis rotations exp(-i angle sigma_y / 2) followed by optional sigma_z
// gauges. yz_swap first rotates both qubits by pi/2 about x, which maps
// sigma_y to sigma_z; it is admissible only when the result stays real.
struct LocalTransform {
    double angle1 = 0;
    double angle2 = 0;
    bool flip1 = false;
    bool flip2 = false;
    bool yz_swap = false;
};

struct StoquasticityVerdict {
    bool stoquastic = false;
    std::optional<LocalTransform> curing;
    double max_positive_offdiag = 0;  // GHz, minimax residual over the search
    double tolerance = 0;
};

inline constexpr double default_stoq_tol = 1e-6;

// {all off-diagonals <= tol, largest off-diagonal}
std::pair<bool, double> is_stoquastic_in_basis(const Eigen::Matrix4d& h, double tol = default_stoq_tol);
std::pair<bool, double> is_stoquastic_in_basis(const Eigen::Matrix4cd& h, double tol = default_stoq_tol);

Eigen::Matrix4cd local_unitary(const LocalTransform& t);
Eigen::Matrix4cd apply_transform(const Eigen::Matrix4cd& h, const LocalTransform& t);
// Real result; throws ValidationError when the transform leaves the reals.
Eigen::Matrix4d apply_transform(const Eigen::Matrix4d& h, const LocalTransform& t);

StoquasticityVerdict decide_stoquastic(const Eigen::Matrix4d& h, double tol = default_stoq_tol, int grid_n = 181);

struct RegionPoint {
    double x;
    StoquasticityVerdict verdict;
};

struct RegionMap {
    std::vector<RegionPoint> points;
    std::vector<double> boundaries;
};

// Verdicts along a 1D sweep; boundaries bisected between neighbours with
// opposite verdicts to within xtol.
RegionMap nonstoq_region_map(const std::vector<double>& xs, const std::function<Eigen::Matrix4d(double)>& model,
                             double tol = default_stoq_tol, int grid_n = 181, double xtol = 1e-3);

}  // namespace fluxq
