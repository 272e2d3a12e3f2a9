#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fluxq/coupled.hpp"
#include "fluxq/errors.hpp"

using namespace fluxq;

namespace {

const SystemParams sys = calibrated_device();

SystemParams symmetric_uncoupled() {
    SystemParams s = sys;
    s.qubit2 = s.qubit1;
    s.c12 = 0;
    return s;
}

std::vector<double> gaps_ghz(const CoupledSpectrum& s) {
    std::vector<double> g;
    for (int a = 1; a < s.energies.size(); ++a) g.push_back(energy_to_frequency(s.energies[a] - s.energies[0]));
    return g;
}

}  // namespace

TEST_CASE("loaded capacitances") {
    auto id = loaded_capacitances(119.5 * unit::fF, 116.4 * unit::fF, 0.0);
    CHECK(id.c1_tilde == 119.5 * unit::fF);
    CHECK(id.c2_tilde == 116.4 * unit::fF);

    const double c1 = 119.5 * unit::fF, c2 = 116.4 * unit::fF, c12 = 132.0 * unit::fF;
    const auto lc = loaded_capacitances(c1, c2, c12);
    CHECK(lc.c1_tilde / unit::fF == doctest::Approx(c1 / unit::fF + 132.0 * 116.4 / (116.4 + 132.0)));
    CHECK(lc.c2_tilde / unit::fF == doctest::Approx(c2 / unit::fF + 132.0 * 119.5 / (119.5 + 132.0)));
    CHECK(lc.c1_tilde / unit::fF == doctest::Approx(181.35).epsilon(1e-4));
    CHECK(lc.c2_tilde / unit::fF == doctest::Approx(179.13).epsilon(1e-4));
    CHECK(lc.c1_tilde > c1);
    CHECK(lc.c2_tilde > c2);

    const auto sw = loaded_capacitances(c2, c1, c12);
    CHECK(sw.c1_tilde == doctest::Approx(lc.c2_tilde).epsilon(1e-15));
    CHECK(sw.c2_tilde == doctest::Approx(lc.c1_tilde).epsilon(1e-15));

    CHECK(charge_coupling(c1, c2, 0.0) == 0.0);
    CHECK(charge_coupling(c1, c2, c12) == doctest::Approx(c12 / (c1 * c2 + (c1 + c2) * c12)));
}

TEST_CASE("uncoupled Hamiltonian is a product spectrum") {
    const SystemParams s = symmetric_uncoupled();
    const auto lc = loaded_capacitances(s.qubit1.c, s.qubit2.c, 0.0);
    const auto b1 = qubit_basis(s.qubit1, lc.c1_tilde, 0.668, 0.0, 6);
    const auto b2 = qubit_basis(s.qubit2, lc.c2_tilde, 0.672, 0.0, 6);
    const Eigen::MatrixXd h = build_coupled_hamiltonian(b1, b2, 0.0, s);
    std::vector<double> sums;
    for (int m = 0; m < 6; ++m)
        for (int n = 0; n < 6; ++n) sums.push_back(b1.eig.energies[m] + b2.eig.energies[n]);
    std::sort(sums.begin(), sums.end());
    const auto sp = coupled_spectrum(h, 6, 6, 8);
    for (int a = 0; a < 8; ++a) CHECK(sp.energies[a] == doctest::Approx(sums[a]).epsilon(1e-12));
    for (int a = 0; a < 8; ++a) {
        const Eigen::MatrixXd amp2 = sp.amplitudes[a].cwiseAbs2();
        CHECK(amp2.maxCoeff() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(amp2.sum() == doctest::Approx(1.0).epsilon(1e-10));
    }

    // lines from the ground state at the single-qubit gaps
    const double d1 = energy_to_frequency(b1.eig.energies[1] - b1.eig.energies[0]);
    const double d2 = energy_to_frequency(b2.eig.energies[1] - b2.eig.energies[0]);
    const auto lines = transition_lines(sp, LineSource::ground);
    CHECK(lines[0] == doctest::Approx(std::min(d1, d2)).epsilon(1e-9));
    CHECK(lines[1] == doctest::Approx(std::max(d1, d2)).epsilon(1e-9));
    CHECK(lines[2] == doctest::Approx(d1 + d2).epsilon(1e-9));
    const auto from1 = transition_lines(sp, LineSource::first_excited);
    REQUIRE(from1.size() + 1 == lines.size());
    for (size_t i = 0; i < from1.size(); ++i) CHECK(from1[i] == doctest::Approx(lines[i + 1] - lines[0]).epsilon(1e-9));
}

TEST_CASE("coupled matrix is real symmetric with normalized amplitudes") {
    const auto lc = loaded_capacitances(sys.qubit1.c, sys.qubit2.c, sys.c12);
    const auto b1 = qubit_basis(sys.qubit1, lc.c1_tilde, 0.664, 1e-4, 10);
    const auto b2 = qubit_basis(sys.qubit2, lc.c2_tilde, 0.662, 1e-4, 10);
    const Eigen::MatrixXd h = build_coupled_hamiltonian(b1, b2, 1.2 * unit::pH, sys);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * h.cwiseAbs().maxCoeff());
    const auto sp = coupled_spectrum(h, 10, 10, 6);
    for (const auto& a : sp.amplitudes) CHECK(a.cwiseAbs2().sum() == doctest::Approx(1.0).epsilon(1e-10));
    for (int a = 1; a < 6; ++a) CHECK(sp.energies[a] >= sp.energies[a - 1]);

    CHECK_THROWS_AS(coupled_spectrum(h, 10, 9, 6), ValidationError);
    CHECK_THROWS_AS(coupled_spectrum(h, 10, 10, 101), ValidationError);
}

TEST_CASE("basis enlargement") {
    const Controls c{0.664, 0.662, 1e-4, 1e-4, 1.0 * unit::pH};
    const auto s8 = solve_coupled(sys, c, {8, 4, 257, {}});
    const auto s12 = solve_coupled(sys, c, {12, 4, 257, {}});
    for (int a = 0; a < 4; ++a)
        CHECK(std::abs(energy_to_frequency(s8.spectrum.energies[a] - s12.spectrum.energies[a])) < 1e-2);
}

TEST_CASE("gap asymmetry in M12 comes from the capacitive coupling") {
    auto asym = [](const SystemParams& s) {
        const auto lo = solve_coupled(s, {0.664, 0.662, 0, 0, -2 * unit::pH});
        const auto hi = solve_coupled(s, {0.664, 0.662, 0, 0, 2 * unit::pH});
        double d = 0;
        for (int a = 0; a < 4; ++a) d = std::max(d, std::abs(level_gap(lo.spectrum, a) - level_gap(hi.spectrum, a)));
        return d;
    };
    SystemParams no_c = sys;
    no_c.c12 = 0;
    CHECK(asym(sys) > 1e-3);
    CHECK(asym(no_c) < 1e-9);
}

TEST_CASE("M12 sign reversal with one qubit mirrored") {
    SystemParams s = sys;
    s.c12 = 0;
    const double q1 = 2e-4, q2 = 1e-4;
    for (double m : {0.5, 1.7}) {
        const auto a = solve_coupled(s, {0.664, 0.662, q1, q2, m * unit::pH});
        const auto b = solve_coupled(s, {0.664, 0.662, q1, -q2, -m * unit::pH});
        const auto ga = gaps_ghz(a.spectrum), gb = gaps_ghz(b.spectrum);
        for (size_t i = 0; i < ga.size(); ++i) CHECK(std::abs(ga[i] - gb[i]) < 1e-9);
    }
}

TEST_CASE("qubit exchange symmetry") {
    SystemParams swapped = sys;
    std::swap(swapped.qubit1, swapped.qubit2);
    const auto a = solve_coupled(sys, {0.664, 0.662, 1e-4, -2e-4, 0.8 * unit::pH});
    const auto b = solve_coupled(swapped, {0.662, 0.664, -2e-4, 1e-4, 0.8 * unit::pH});
    const auto ga = gaps_ghz(a.spectrum), gb = gaps_ghz(b.spectrum);
    for (size_t i = 0; i < ga.size(); ++i) CHECK(std::abs(ga[i] - gb[i]) < 1e-9);
}

TEST_CASE("truncation health in the operating regime") {
    // Weight of the lowest 2x2 block for the first four levels across the
    // M12 sweep at 1.5 GHz.
    const double cjj1 = 0.66396523, cjj2 = 0.66240074;
    for (double m : {-2.0, -1.0, 0.0, 0.55, 1.0, 2.0})
        for (double q : {0.0, 1e-4}) {
            const auto s = solve_coupled(sys, {cjj1, cjj2, q, q, m * unit::pH});
            for (int a = 0; a < 4; ++a) {
                const double w = s.spectrum.amplitudes[a].topLeftCorner(2, 2).cwiseAbs2().sum();
                CAPTURE(m);
                CAPTURE(q);
                CAPTURE(a);
                CHECK(w > 0.95);
            }
        }
}

TEST_CASE("anticrossing refinement") {
    std::vector<double> x, y;
    for (int i = 0; i <= 20; ++i) {
        x.push_back(-1.0 + 0.1 * i);
        y.push_back(0.3 + 2.0 * std::pow(x.back() - 0.237, 2));
    }
    const auto ac = anticrossing(x, y);
    CHECK(ac.gap == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(ac.location == doctest::Approx(0.237).epsilon(1e-12));

    std::vector<double> mono(x.size());
    for (size_t i = 0; i < x.size(); ++i) mono[i] = 1.0 + x[i];
    CHECK_THROWS_AS(anticrossing(x, mono), PhysicsError);
    CHECK_THROWS_AS(anticrossing({0.0, 1.0}, {1.0, 0.5}), ValidationError);
}

TEST_CASE("effective gap inversion") {
    const SolveOptions o{6, 4, 129, {}};
    const double cjj = find_cjj_for_effective_delta(sys, 0, 1.5, o);
    CHECK(std::abs(effective_delta(sys, 0, cjj, o) - 1.5) < 1e-3);
    CHECK_THROWS_AS(find_cjj_for_effective_delta(sys, 0, 1e4, o), ValidationError);
}
