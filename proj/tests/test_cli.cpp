#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fluxq/calibration.hpp"
#include "fluxq/io.hpp"
#include "fluxq/squid.hpp"

using namespace fluxq;
namespace fs = std::filesystem;

namespace {

const fs::path root = fs::temp_directory_path() / "fluxq_cli_test";

int run(const std::string& args) {
    const std::string cmd = std::string(FLUXQ_CLI) + " " + args + " >/dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WEXITSTATUS(st);
}

std::string dir(const std::string& name) {
    const auto p = root / name;
    fs::remove_all(p);
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

size_t col(const CsvTable& t, const std::string& name) {
    return std::find(t.header.begin(), t.header.end(), name) - t.header.begin();
}

}  // namespace

TEST_CASE("spectrum command") {
    const auto out = dir("spectrum");
    REQUIRE(run("spectrum --cjj1-range 0.655:0.675:41 --delta2 1.5 --out " + out) == 0);
    const auto s = load(fs::path(out) / "summary.json");
    CHECK(s["gap_GHz"].get<double>() > 0);
    CHECK(s["location"].get<double>() > 0.655);
    const auto m = load(fs::path(out) / "manifest.json");
    CHECK(m["command"] == "spectrum");
    CHECK(m["outputs"].size() == 2);
    const auto t = read_csv((fs::path(out) / "spectrum.csv").string());
    CHECK(t.rows.size() == 41);
    CHECK(t.header.front() == "cjj1_Phi0");
    CHECK(t.comments.front().find("manifest") != std::string::npos);

    const auto bad = dir("spectrum_bad");
    CHECK(run("spectrum --cjj1-range 0.6:0.7:0 --out " + bad) == 2);
    CHECK_FALSE(fs::exists(bad));
    CHECK(run("spectrum --cjj1-range 0.6:0.7:5 --m12-range 0:1:3 --out " + bad) == 2);
    CHECK(run("spectrum --cjj1-range 0.7:0.6:5 --out " + bad) == 2);
    CHECK(run("spectrum --out " + bad) == 2);
    CHECK(run("nonsense") == 2);
    CHECK_FALSE(fs::exists(bad));
}

TEST_CASE("M12 spectrum locates the biased anticrossing") {
    const auto out = dir("spectrum_m12");
    REQUIRE(run("spectrum --m12-range -2:2:41 --delta1 1.5 --delta2 1.5 --bias 0.1 --out " + out) == 0);
    const auto s = load(fs::path(out) / "summary.json");
    CHECK(std::abs(s["location"].get<double>() - 0.55) <= 0.1);
}

TEST_CASE("reduce command") {
    const auto out = dir("reduce");
    REQUIRE(run("reduce --cjj-range 0.660:0.672:7 --out " + out) == 0);
    const auto t = read_csv((fs::path(out) / "reduce.csv").string());
    REQUIRE(t.rows.size() == 7);
    for (const auto& r : t.rows) {
        for (const char* name : {"Jxy_GHz", "Jyx_GHz", "Jyz_GHz", "Jzy_GHz"}) CHECK(std::abs(r[col(t, name)]) < 1e-9);
        CHECK(r[col(t, "flagged")] == 0);
    }

    const auto sweep = dir("reduce_m12");
    REQUIRE(run("reduce --m12-range -2:2:21 --out " + sweep) == 0);
    const auto m = read_csv((fs::path(sweep) / "reduce.csv").string());
    double lo = INFINITY, hi = -INFINITY, sum = 0;
    for (const auto& r : m.rows) {
        const double j = r[col(m, "Jyy_GHz")];
        lo = std::min(lo, j), hi = std::max(hi, j), sum += j;
    }
    CHECK(hi - lo < 0.3 * std::abs(sum / m.rows.size()));

    // the monostable end cannot be reduced
    const auto flagged = dir("reduce_flagged");
    CHECK(run("reduce --cjj-range 0.55:0.665:3 --out " + flagged) == 4);
    const auto f = read_csv((fs::path(flagged) / "reduce.csv").string());
    CHECK(f.rows.front()[col(f, "flagged")] == 1);
    CHECK(f.rows.back()[col(f, "flagged")] == 0);
}

TEST_CASE("stoq-map command") {
    const auto zero = dir("stoq_zero");
    REQUIRE(run("stoq-map --m12-range -2:2:21 --out " + zero) == 0);
    const auto z = read_csv((fs::path(zero) / "stoq_map.csv").string());
    for (const auto& r : z.rows) CHECK(r[col(z, "stoquastic")] == 1);
    CHECK(read_csv((fs::path(zero) / "boundaries.csv").string()).rows.empty());

    const auto biased = dir("stoq_bias");
    REQUIRE(run("stoq-map --m12-range -2:2:41 --bias 0.1 --out " + biased) == 0);
    const auto b = read_csv((fs::path(biased) / "boundaries.csv").string());
    REQUIRE(b.rows.size() == 2);
    for (const auto& r : b.rows) {
        const double jyy = std::abs(r[col(b, "Jyy_GHz")]);
        const double m = std::min(jyy - std::abs(r[col(b, "Jzz_GHz")]), jyy - std::abs(r[col(b, "Jxx_GHz")]));
        CHECK(std::abs(m) <= 0.05 * jyy);
    }

    const auto one = dir("stoq_one");
    REQUIRE(run("stoq-map --m12-range 0.5:0.5:1 --out " + one) == 0);
    CHECK(read_csv((fs::path(one) / "stoq_map.csv").string()).rows.size() == 1);
}

TEST_CASE("oscillate command") {
    const auto out = dir("osc");
    REQUIRE(run("oscillate --init uu --m12-range -1:1:3 --dwell-max 1 --dwell-step 0.05 --out " + out) == 0);
    const auto t = read_csv((fs::path(out) / "oscillation_map.csv").string());
    CHECK(t.rows.size() == 21);
    CHECK(t.header.size() == 4);
    CHECK(t.header[1] == "P_m12=-1_pH");
    bool init = false, tracked = false;
    for (const auto& c : t.comments) init |= c == "init uu", tracked |= c == "tracked dd";
    CHECK(init);
    CHECK(tracked);
    for (const auto& r : t.rows)
        for (size_t j = 1; j < r.size(); ++j) CHECK((r[j] >= -1e-12 && r[j] <= 1 + 1e-12));

    const auto single = dir("osc_single");
    REQUIRE(run("oscillate --m12-range 0:0:1 --dwell-max 0 --out " + single) == 0);
    CHECK(read_csv((fs::path(single) / "oscillation_map.csv").string()).rows.size() == 1);
    CHECK(run("oscillate --init xx --m12-range 0:0:1 --out " + dir("osc_bad")) == 2);
}

TEST_CASE("compensate command") {
    const auto out = dir("comp");
    REQUIRE(run("compensate --target-delta 5 --out " + out) == 0);
    const auto s = load(fs::path(out) / "summary.json");
    CHECK(s["iterations"].get<int>() <= 5);
    CHECK(s["converged"].get<bool>());
    CHECK(s["max_rel_error"].get<double>() < 0.01);

    const auto none = dir("comp_none");
    REQUIRE(run("compensate --distortion-spec none --out " + none) == 0);
    CHECK(load(fs::path(none) / "summary.json")["iterations"].get<int>() == 1);

    CHECK(run("compensate --target-delta 60 --out " + dir("comp_range")) == 2);
    CHECK(run("compensate --distortion-spec 80:1 --out " + dir("comp_big")) == 2);
    CHECK(run("compensate --max-iter 1 --out " + dir("comp_short")) == 3);
}

TEST_CASE("fit commands") {
    const SystemParams dev = calibrated_device();
    fs::create_directories(root);

    CsvTable coupler;
    coupler.header = {"phi_co_Phi0", "m12_pH"};
    for (int i = 0; i <= 24; ++i) {
        const double b = 0.026 * i;
        coupler.rows.push_back({b, coupler_m12(dev.coupler, b) / unit::pH});
    }
    const auto cfile = (root / "coupler.csv").string();
    write_csv(cfile, coupler);
    const auto out = dir("fit_coupler");
    REQUIRE(run("fit coupler --data " + cfile + " --out " + out) == 0);
    const auto f = load(fs::path(out) / "fit.json");
    CHECK(f["converged"].get<bool>());
    for (const auto& p : f["parameters"]) {
        const double want = p["name"] == "msq_over_l" ? 10.77 : p["name"] == "beta" ? 1.416 : 1.848;
        CHECK(std::abs(p["value"].get<double>() - want) / want < 0.01);
    }

    CsvTable ip;
    ip.header = {"cjj_Phi0", "ip_uA"};
    for (int i = 0; i <= 30; ++i) {
        const double c = 0.70 + 0.02 * i;
        ip.rows.push_back({c, persistent_current(dev.qubit1, c, 0.0) / unit::uA});
    }
    const auto ifile = (root / "ip.csv").string();
    write_csv(ifile, ip);
    const auto iout = dir("fit_ip");
    REQUIRE(run("fit ip --data " + ifile + " --out " + iout) == 0);
    for (const auto& p : load(fs::path(iout) / "fit.json")["parameters"]) {
        const double want = p["name"] == "ic" ? 3.22697 : 231.633;
        CHECK(std::abs(p["value"].get<double>() - want) / want < 1e-4);
    }

    CsvTable sp;
    sp.header = {"swept_qubit", "partner_cjj_Phi0", "cjj_Phi0", "line1_GHz"};
    sp.rows = {{1, 0.5, 0.66, 2.7}, {1, 0.5, 0.665, 1.9}};
    const auto sfile = (root / "spectro.csv").string();
    write_csv(sfile, sp);
    CHECK(run("fit spectro --data " + sfile + " --out " + dir("fit_spectro")) == 2);
    CHECK(run("fit coupler --data " + (root / "missing.csv").string() + " --out " + dir("fit_missing")) == 2);
}

TEST_CASE("identical runs give identical artifacts") {
    const auto a = dir("det_a"), b = dir("det_b");
    REQUIRE(run("reduce --m12-range -1:1:5 --bias 0.1 --out " + a) == 0);
    REQUIRE(run("reduce --m12-range -1:1:5 --bias 0.1 --out " + b) == 0);
    // first line names the run directory
    auto body = [](const fs::path& p) {
        const auto s = slurp(p);
        return s.substr(s.find('\n'));
    };
    CHECK(body(fs::path(a) / "reduce.csv") == body(fs::path(b) / "reduce.csv"));
}
