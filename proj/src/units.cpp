#include "fluxq/units.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "fluxq/errors.hpp"

namespace fluxq {

double energy_to_frequency(double joules) { return joules / planck_h / unit::GHz; }

double frequency_to_energy(double ghz) { return ghz * unit::GHz * planck_h; }

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v))
        throw ValidationError(std::string("non-positive value: ") + name);
}

// Locate `base_unit` (e.g. "l_pH") in obj. A key with the same base but a
// different unit suffix is reported as a unit mismatch rather than missing.
double field(const nlohmann::json& obj, const std::string& base, const std::string& unit_tag,
             const std::string& where) {
    const std::string key = unit_tag.empty() ? base : base + "_" + unit_tag;
    if (!obj.is_object()) throw ValidationError("missing field: " + where);
    auto it = obj.find(key);
    if (it == obj.end()) {
        for (auto& [k, v] : obj.items()) {
            (void)v;
            if (k.rfind(base + "_", 0) == 0 && k != key)
                throw ValidationError("unit tag mismatch: " + where + "." + k + " (expected " + key + ")");
        }
        throw ValidationError("missing field: " + where + "." + key);
    }
    if (!it->is_number()) throw ValidationError("field is not a number: " + where + "." + key);
    return it->get<double>();
}

SquidParams squid_from(const nlohmann::json& doc, const std::string& name) {
    auto it = doc.find(name);
    if (it == doc.end()) throw ValidationError("missing field: " + name);
    const auto& q = *it;
    SquidParams p;
    p.ic = field(q, "ic", "uA", name) * unit::uA;
    p.l = field(q, "l", "pH", name) * unit::pH;
    p.lcjj = field(q, "lcjj", "pH", name) * unit::pH;
    p.c = field(q, "c", "fF", name) * unit::fF;
    return p;
}

// SI scaling round trips are not exact; 12 significant digits makes the
// serialized form a fixed point.
double tidy(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

nlohmann::json squid_json(const SquidParams& p) {
    return {{"ic_uA", tidy(p.ic / unit::uA)},
            {"l_pH", tidy(p.l / unit::pH)},
            {"lcjj_pH", tidy(p.lcjj / unit::pH)},
            {"c_fF", tidy(p.c / unit::fF)}};
}

}  // namespace

void SquidParams::validate() const {
    require_positive(ic, "ic");
    require_positive(l, "l");
    require_positive(lcjj, "lcjj");
    require_positive(c, "c");
    if (weak_adiabaticity())
        std::clog << "warning: lcjj/l = " << lcjj / l << " exceeds 0.2, cjj elimination is rough\n";
}

void CouplerParams::validate() const {
    require_positive(beta, "beta");
    require_positive(m12_max_abs, "m12_max_abs");
    if (!std::isfinite(msq_over_l) || !std::isfinite(m12_offset))
        throw ValidationError("non-finite coupler constant");
}

void SystemParams::validate() const {
    qubit1.validate();
    qubit2.validate();
    if (!(c12 >= 0) || !std::isfinite(c12)) throw ValidationError("c12 must be >= 0");
    coupler.validate();
}

SystemParams calibrated_device() {
    SystemParams s;
    s.qubit1 = {3.22697 * unit::uA, 231.633 * unit::pH, 17.02 * unit::pH, 119.5 * unit::fF};
    s.qubit2 = {3.15711 * unit::uA, 238.981 * unit::pH, 17.17 * unit::pH, 116.4 * unit::fF};
    s.c12 = 132.0 * unit::fF;
    s.coupler = {10.77 * unit::pH, 1.416, 1.848 * unit::pH, 8.145 * unit::pH};
    return s;
}

SystemParams load_system_params(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ValidationError("config document must be an object");
    SystemParams s;
    s.qubit1 = squid_from(doc, "qubit1");
    s.qubit2 = squid_from(doc, "qubit2");
    s.c12 = field(doc, "c12", "fF", "root") * unit::fF;
    auto it = doc.find("coupler");
    if (it == doc.end()) throw ValidationError("missing field: coupler");
    s.coupler.msq_over_l = field(*it, "msq_over_l", "pH", "coupler") * unit::pH;
    s.coupler.beta = field(*it, "beta", "", "coupler");
    s.coupler.m12_offset = field(*it, "m12_offset", "pH", "coupler") * unit::pH;
    s.coupler.m12_max_abs = field(*it, "m12_max_abs", "pH", "coupler") * unit::pH;
    s.validate();
    return s;
}

SystemParams load_system_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config parse error: ") + e.what());
    }
    return load_system_params(doc);
}

nlohmann::json to_json(const SystemParams& p) {
    return {{"qubit1", squid_json(p.qubit1)},
            {"qubit2", squid_json(p.qubit2)},
            {"c12_fF", tidy(p.c12 / unit::fF)},
            {"coupler",
             {{"msq_over_l_pH", tidy(p.coupler.msq_over_l / unit::pH)},
              {"beta", tidy(p.coupler.beta)},
              {"m12_offset_pH", tidy(p.coupler.m12_offset / unit::pH)},
              {"m12_max_abs_pH", tidy(p.coupler.m12_max_abs / unit::pH)}}}};
}

std::string serialize(const SystemParams& p) { return to_json(p).dump(2) + "\n"; }

}  // namespace fluxq
