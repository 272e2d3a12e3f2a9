#pragma once

#include <numbers>
#include <string>

#include <json.hpp>

namespace fluxq {

namespace codata {
inline constexpr double hbar = 1.05457181765e-34;           // J s
inline constexpr double elementary_charge = 1.60217663400e-19;  // C
}  // namespace codata

struct PhysicalConstants {
    double flux_quantum;  // Wb
    double planck_h;      // J s
    double hbar;          // J s
};

inline constexpr PhysicalConstants constants{
    std::numbers::pi * codata::hbar / codata::elementary_charge,
    2.0 * std::numbers::pi * codata::hbar,
    codata::hbar,
};

inline constexpr double Phi0 = constants.flux_quantum;
inline constexpr double hbar = constants.hbar;
inline constexpr double planck_h = constants.planck_h;

// Multiply to convert an external-unit value into SI.
namespace unit {
inline constexpr double uA = 1e-6;
inline constexpr double pH = 1e-12;
inline constexpr double fF = 1e-15;
inline constexpr double GHz = 1e9;
inline constexpr double ns = 1e-9;
inline constexpr double mPhi0 = 1e-3;  // of Phi0, fluxes are kept in Phi0 units
}  // namespace unit

// E / h in GHz.
double energy_to_frequency(double joules);
double frequency_to_energy(double ghz);

struct SquidParams {
    double ic = 0;    // A
    double l = 0;     // H
    double lcjj = 0;  // H
    double c = 0;     // F

    void validate() const;
    double josephson_energy() const { return Phi0 * ic / (2.0 * std::numbers::pi); }
    // True when the cjj loop is not small against the body loop.
    bool weak_adiabaticity() const { return lcjj / l > 0.2; }
};

struct CouplerParams {
    double msq_over_l = 0;    // H
    double beta = 0;
    double m12_offset = 0;    // H
    double m12_max_abs = 0;   // H

    void validate() const;
};

struct SystemParams {
    SquidParams qubit1;
    SquidParams qubit2;
    double c12 = 0;  // F
    CouplerParams coupler;

    void validate() const;
    const SquidParams& qubit(int i) const { return i == 0 ? qubit1 : qubit2; }
};

// The calibrated two-qubit device used throughout the tests and CLI defaults.
SystemParams calibrated_device();

SystemParams load_system_params(const nlohmann::json& doc);
SystemParams load_system_params_file(const std::string& path);
nlohmann::json to_json(const SystemParams& p);
// Canonical text form: keys sorted, fixed indentation, trailing newline.
std::string serialize(const SystemParams& p);

}  // namespace fluxq
