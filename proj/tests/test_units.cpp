#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fluxq/errors.hpp"
#include "fluxq/units.hpp"

using namespace fluxq;

namespace {

nlohmann::json device_doc() {
    return nlohmann::json::parse(R"({
      "qubit1": {"ic_uA": 3.22697, "l_pH": 231.633, "lcjj_pH": 17.02, "c_fF": 119.5},
      "qubit2": {"ic_uA": 3.15711, "l_pH": 238.981, "lcjj_pH": 17.17, "c_fF": 116.4},
      "c12_fF": 132.0,
      "coupler": {"msq_over_l_pH": 10.77, "beta": 1.416, "m12_offset_pH": 1.848, "m12_max_abs_pH": 8.145}
    })");
}

}  // namespace

TEST_CASE("flux quantum follows from hbar and e") {
    CHECK(Phi0 == doctest::Approx(std::numbers::pi * 1.054571817e-34 / 1.602176634e-19).epsilon(1e-10));
    CHECK(std::abs(Phi0 - std::numbers::pi * constants.hbar / codata::elementary_charge) <= 1e-16 * Phi0);
    CHECK(constants.flux_quantum > 0);
    CHECK(constants.planck_h > 0);
    CHECK(constants.hbar > 0);
}

TEST_CASE("device document loads with table values") {
    const auto s = load_system_params(device_doc());
    CHECK(s.qubit1.ic / unit::uA == doctest::Approx(3.22697));
    CHECK(s.qubit1.l / unit::pH == doctest::Approx(231.633));
    CHECK(s.qubit1.lcjj / unit::pH == doctest::Approx(17.02));
    CHECK(s.qubit1.c / unit::fF == doctest::Approx(119.5));
    CHECK(s.c12 / unit::fF == doctest::Approx(132.0));
    CHECK(s.qubit2.ic / unit::uA == doctest::Approx(3.15711));
    CHECK(s.qubit2.l / unit::pH == doctest::Approx(238.981));
    CHECK(s.qubit2.lcjj / unit::pH == doctest::Approx(17.17));
    CHECK(s.qubit2.c / unit::fF == doctest::Approx(116.4));
    CHECK(serialize(s) == serialize(calibrated_device()));
}

TEST_CASE("invalid documents are rejected") {
    auto doc = device_doc();
    doc["qubit1"]["c_fF"] = -1.0;
    CHECK_THROWS_WITH_AS(load_system_params(doc), doctest::Contains("non-positive"), ValidationError);

    doc = device_doc();
    doc["qubit2"].erase("l_pH");
    CHECK_THROWS_WITH_AS(load_system_params(doc), doctest::Contains("missing field"), ValidationError);

    doc = device_doc();
    doc["qubit2"].erase("l_pH");
    doc["qubit2"]["l_nH"] = 0.238981;
    CHECK_THROWS_WITH_AS(load_system_params(doc), doctest::Contains("unit tag mismatch"), ValidationError);

    doc = device_doc();
    doc["c12_fF"] = -3.0;
    CHECK_THROWS_AS(load_system_params(doc), ValidationError);

    doc = device_doc();
    doc["c12_fF"] = 0.0;
    CHECK_NOTHROW(load_system_params(doc));
}

TEST_CASE("serialization round trip is byte stable") {
    const auto doc = device_doc();
    const std::string once = serialize(load_system_params(doc));
    const std::string twice = serialize(load_system_params(nlohmann::json::parse(once)));
    CHECK(once == twice);
    CHECK(nlohmann::json::parse(once) == doc);

    auto odd = device_doc();
    odd["qubit1"]["l_pH"] = 231.63300000000001;
    odd["coupler"]["beta"] = 1.41600000001;
    const std::string a = serialize(load_system_params(odd));
    CHECK(a == serialize(load_system_params(nlohmann::json::parse(a))));
}

TEST_CASE("energy to frequency") {
    const double h_codata = 6.62607015e-34;
    CHECK(energy_to_frequency(0.0) == 0.0);
    CHECK(energy_to_frequency(planck_h * 1e9) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(energy_to_frequency(h_codata * 1.5e9) == doctest::Approx(1.5).epsilon(1e-11));
    for (double a : {-3.0, 0.25, 7.0, 1e3}) {
        const double e = 2.3e-24;
        CHECK(energy_to_frequency(a * e) == doctest::Approx(a * energy_to_frequency(e)).epsilon(1e-14));
    }
    CHECK(frequency_to_energy(energy_to_frequency(4.2e-24)) == doctest::Approx(4.2e-24).epsilon(1e-14));
}
