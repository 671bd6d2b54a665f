#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "bflow/cli.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using std::numbers::pi;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = bflow::cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("bflow_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream is(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("conjugate example") {
    const auto dir = scratch("conjugate");
    auto r = run({"conjugate", "--n", "2", "--m-max", "3", "--output-dir", dir.string()});
    REQUIRE(r.code == 0);
    const auto rows = read_csv(dir / "conjugate.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[0][2] == "T_detected");
    for (int m = 1; m <= 3; ++m) {
        CHECK(std::stod(rows[m][1]) == doctest::Approx(m * pi).epsilon(1e-15));
        CHECK(std::abs(std::stod(rows[m][2]) - m * pi) < 1e-6);
    }
    const auto manifest = json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["parameters"]["n"] == 2);
    CHECK(manifest["versions"].contains("fftw"));
    CHECK(manifest.contains("wall_time_seconds"));
}

TEST_CASE("curvature scan example and determinism") {
    const auto a = scratch("scan_a"), b = scratch("scan_b");
    REQUIRE(run({"curvature-scan", "--gamma", "2", "--trials", "200", "--seed", "7", "--output-dir", a.string()}).code == 0);
    const auto doc = json::parse(slurp(a / "curvature-scan.json"));
    CHECK(doc["summary"]["min_total"].get<double>() >= -1e-10);
    CHECK(doc["summary"]["trials"] == 200);

    REQUIRE(run({"curvature-scan", "--gamma", "2", "--trials", "200", "--seed", "7", "--output-dir", b.string()}).code == 0);
    CHECK(slurp(a / "curvature-scan.csv") == slurp(b / "curvature-scan.csv"));
    CHECK(slurp(a / "curvature-scan.json") == slurp(b / "curvature-scan.json"));

    // backends agree bit for bit
    const auto c = scratch("scan_c");
    REQUIRE(run({"curvature-scan", "--gamma", "2", "--trials", "200", "--seed", "7", "--backend", "serial",
                 "--output-dir", c.string()})
                .code == 0);
    CHECK(slurp(a / "curvature-scan.csv") == slurp(c / "curvature-scan.csv"));

    const auto d = scratch("scan_d");
    REQUIRE(run({"curvature-scan", "--gamma", "2", "--trials", "20", "--seed", "8", "--output-dir", d.string()}).code == 0);
    CHECK(slurp(a / "curvature-scan.csv").substr(0, 200) != slurp(d / "curvature-scan.csv").substr(0, 200));
}

TEST_CASE("usage errors exit 2") {
    auto r = run({"run"});
    CHECK(r.code == 2);
    CHECK(r.err.find("--config") != std::string::npos);
    auto doc = json::parse(r.out);
    CHECK(doc["status"] == "error");
    CHECK(doc["exit_code"] == 2);

    CHECK(run({}).code == 2);
    CHECK(run({"no-such-experiment"}).code == 2);
    CHECK(run({"conjugate", "--bogus", "1"}).code == 2);
    CHECK(run({"conjugate", "--n", "two"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("validation errors list the violated bound") {
    auto r = run({"conjugate", "--n", "0", "--m-max", "99", "--output-dir", scratch("invalid").string()});
    CHECK(r.code == 2);
    const auto doc = json::parse(r.out);
    CHECK(doc["kind"] == "validation");
    REQUIRE(doc["violations"].size() == 2);
    CHECK(doc["violations"][0]["parameter"] == "n");
    CHECK(doc["violations"][0]["bound"] == "[1, 32]");
    CHECK(doc["violations"][1]["parameter"] == "m-max");

    auto v = run({"disc-spectrum", "--omega", "2", "--rho0", "1", "--output-dir", scratch("vacuum").string()});
    CHECK(v.code == 2);
    CHECK(v.out.find("no vacuum") != std::string::npos);
}

TEST_CASE("numerical failures exit 1") {
    // u0 = sin x, rho0 = 1 shocks at t = 1
    auto r = run({"geodesic", "--t-end", "1.5", "--n-grid", "64", "--output-dir", scratch("shock").string()});
    CHECK(r.code == 1);
    CHECK(json::parse(r.out)["kind"] == "shock_reached");

    const auto dir = scratch("shock_recorded");
    auto s = run({"geodesic", "--t-end", "1.5", "--n-grid", "64", "--stop-at-shock", "--output-dir", dir.string()});
    CHECK(s.code == 0);
    const auto doc = json::parse(slurp(dir / "geodesic.json"));
    // the coarse grid resolves the steepening a little past T* = 1
    CHECK(doc["summary"]["shock_time"].get<double>() > 0.9);
    CHECK(doc["summary"]["shock_time"].get<double>() < 1.15);
}

TEST_CASE("config file, flag override and output directory precedence") {
    const auto base = scratch("config");
    fs::create_directories(base);
    const auto cfg = base / "scan.cfg";
    std::ofstream(cfg) << "# small scan\nexperiment = curvature-scan\ngamma=4\ntrials=30\nseed=3\nn_grid=32\n"
                       << "output-dir=" << (base / "from_config").string() << "\n";

    ::unsetenv(bflow::cli::output_dir_env);
    auto r = run({"run", "--config", cfg.string()});
    REQUIRE(r.code == 0);
    auto doc = json::parse(slurp(base / "from_config" / "curvature-scan.json"));
    CHECK(doc["parameters"]["gamma"] == 4.0);
    CHECK(doc["parameters"]["n-grid"] == 32);
    CHECK(doc["summary"]["nonnegativity_expected"] == false);

    ::setenv(bflow::cli::output_dir_env, (base / "from_env").string().c_str(), 1);
    REQUIRE(run({"run", "--config", cfg.string(), "--trials", "5"}).code == 0);
    doc = json::parse(slurp(base / "from_env" / "curvature-scan.json"));
    CHECK(doc["parameters"]["trials"] == 5);

    REQUIRE(run({"run", "--config", cfg.string(), "--output-dir", (base / "from_flag").string()}).code == 0);
    CHECK(fs::exists(base / "from_flag" / "curvature-scan.csv"));
    ::unsetenv(bflow::cli::output_dir_env);

    std::ofstream(base / "bad.cfg") << "gamma=2\n";
    CHECK(run({"run", "--config", (base / "bad.cfg").string()}).code == 2);
    std::ofstream(base / "junk.cfg") << "experiment=curvature-scan\nnot a pair\n";
    CHECK(run({"run", "--config", (base / "junk.cfg").string()}).code == 2);
    CHECK(run({"run", "--config", (base / "missing.cfg").string()}).code == 2);
}

TEST_CASE("remaining experiments run at small sizes") {
    const auto dir = scratch("others");
    CHECK(run({"geodesic", "--n-grid", "64", "--output-dir", dir.string()}).code == 0);
    CHECK(run({"jacobi", "--n-grid", "64", "--profile", "random", "--rho-amp", "0.3", "--u-amp", "0.5",
               "--output-dir", dir.string()})
              .code == 0);
    auto jac = json::parse(slurp(dir / "jacobi.json"));
    CHECK(jac["summary"]["max_ratio"].get<double>() <= 1.0 + 1e-6);
    CHECK(jac["summary"]["exact_max_ratio"].get<double>() <= 1.0 + 1e-6);
    CHECK(run({"jacobi", "--gamma", "2", "--A", "1", "--n-grid", "64", "--output-dir", dir.string()}).code == 2);
    CHECK(run({"jacobi", "--gamma", "2", "--A", "1", "--t-end", "0.3", "--n-grid", "64", "--output-dir", dir.string()})
              .code == 0);
    CHECK(run({"burgers-exact", "--n-grid", "32", "--frames", "2", "--output-dir", dir.string()}).code == 0);
    CHECK(read_csv(dir / "burgers-exact.csv").size() == 1 + 3 * 32);
    CHECK(run({"burgers-exact", "--t-end", "2", "--output-dir", dir.string()}).code == 1);

    CHECK(run({"torus-modes", "--kind", "gradient", "--n-grid", "16", "--output-dir", dir.string()}).code == 0);
    auto tor = json::parse(slurp(dir / "torus-modes.json"));
    CHECK(tor["summary"]["classification"] == "bounded");
    CHECK(tor["summary"]["bounded_by_series"] == true);
    CHECK(run({"torus-modes", "--kind", "rotational", "--n-grid", "16", "--output-dir", dir.string()}).code == 0);
    tor = json::parse(slurp(dir / "torus-modes.json"));
    CHECK(tor["summary"]["classification"] == "linear_growth");
    CHECK(tor["summary"]["slope_rel_error"].get<double>() < 0.01);

    CHECK(run({"disc-spectrum", "--k-max", "4", "--n-max", "4", "--initial", "swirl", "--output-dir", dir.string()})
              .code == 0);
    auto disc = json::parse(slurp(dir / "disc-spectrum.json"));
    CHECK(disc["summary"]["all_distinct_real"] == true);
    CHECK(disc["summary"]["classification"]["bounded"] == false);
    CHECK(read_csv(dir / "disc-spectrum.csv").size() == 1 + 9 * 4);
    CHECK(run({"disc-spectrum", "--initial", "swirl", "--mode", "1", "--output-dir", dir.string()}).code == 1);
}
