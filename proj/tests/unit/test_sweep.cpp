#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "qsl/errors.hpp"
#include "qsl/sweep.hpp"

using namespace qsl;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

SweepSpec small_spec(Topology t = Topology::IndependentBaths) {
    SweepSpec s;
    s.topology = t;
    s.gamma0 = {0.5, 6.0, 4};
    s.J = {0.0, 6.0, 5};
    return s;
}

std::string csv_of(const SweepGrid& g) {
    std::ostringstream out;
    write_csv(g, out);
    return out.str();
}

fs::path scratch_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("qsl_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("axis ranges") {
    const auto r = parse_range("0.1:10:50");
    CHECK(r.min == 0.1);
    CHECK(r.max == 10.0);
    CHECK(r.steps == 50);
    const auto v = r.values();
    REQUIRE(v.size() == 50);
    CHECK(v.front() == 0.1);
    CHECK(v.back() == 10.0);
    CHECK(v[1] - v[0] == doctest::Approx(9.9 / 49));
    CHECK_THROWS_AS((void)parse_range("1:2"), DomainError);
    CHECK_THROWS_AS((void)parse_range("a:2:3"), DomainError);
    CHECK_THROWS_AS((void)parse_range("1:2:-3"), DomainError);
    CHECK_THROWS_AS((void)parse_range("1:2:3:4"), DomainError);
}

TEST_CASE("oracle identifiers") {
    for (auto m : {OracleMode::Off, OracleMode::Kernel, OracleMode::Discrete}) CHECK(parse_oracle(oracle_id(m)) == m);
    CHECK_THROWS_AS((void)parse_oracle("exact"), DomainError);
}

TEST_CASE("config parsing") {
    std::istringstream in(R"(# reference run
[sweep]
topology = common   ; shared bath
gamma0 = 0.5:5:10
J=0:4:8
lambda = 1.5
tau = 2.5
oracle = kernel
threads = 3
out = results/a b
plot = false
hc_reading = cos

)");
    const auto s = parse_config(in);
    CHECK(s.topology == Topology::CommonBath);
    CHECK(s.gamma0.steps == 10);
    CHECK(s.J.max == 4.0);
    CHECK(s.lambda == 1.5);
    CHECK(s.tau == 2.5);
    CHECK(s.oracle == OracleMode::Kernel);
    CHECK(s.threads == 3);
    CHECK(s.out == "results/a b");
    CHECK_FALSE(s.plot_script);
    CHECK(s.hc_reading == HcReading::LiteralCos);
    // untouched keys keep their defaults
    CHECK(s.time_points == 2001);
    CHECK(s.safety_cap == 20.0);
}

TEST_CASE("config errors name the line") {
    std::istringstream unknown("lambda = 2\nwidth = 3\n");
    try {
        (void)parse_config(unknown);
        FAIL("expected an error");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        CHECK(std::string(e.what()).find("width") != std::string::npos);
    }
    std::istringstream no_equals("lambda 2\n");
    CHECK_THROWS_AS((void)parse_config(no_equals), DomainError);
    std::istringstream bad_number("tau = fast\n");
    CHECK_THROWS_AS((void)parse_config(bad_number), DomainError);
    CHECK_THROWS_AS((void)load_config("/nonexistent/qsl.cfg"), std::runtime_error);
}

TEST_CASE("later settings override earlier ones") {
    SweepSpec base;
    base.lambda = 4.0;
    base.tau = 9.0;
    std::istringstream file("lambda = 3\n");
    auto s = parse_config(file, base);
    CHECK(s.lambda == 3.0);  // file beats the base
    CHECK(s.tau == 9.0);
    apply_setting(s, "lambda", "2.5");  // command line beats the file
    CHECK(s.lambda == 2.5);
}

TEST_CASE("sweep settings validation") {
    CHECK_NOTHROW(SweepSpec{}.validate());
    auto s = small_spec();
    s.gamma0.steps = 1;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s = small_spec();
    s.J = {-1.0, 2.0, 3};
    CHECK_THROWS_AS(s.validate(), DomainError);
    s = small_spec();
    s.J = {0.0, 25.0, 3};
    CHECK_THROWS_AS(s.validate(), DomainError);
    s.safety_cap = 30.0;
    CHECK_NOTHROW(s.validate());
    s = small_spec();
    s.time_points = 500;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s = small_spec();
    s.tau = 0.0;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s = small_spec();
    s.gamma0 = {3.0, 3.0, 2};
    CHECK_THROWS_AS(s.validate(), DomainError);
    CHECK_THROWS_AS((void)run_sweep(s), DomainError);
}

TEST_CASE("flags") {
    CHECK(flag_string(kCellOk) == "ok");
    CHECK(flag_string(kDegenerateRoots | kOracleFallback) == "degenerate_roots|oracle_fallback");
    CHECK(flag_string(kFailed) == "failed");
    CellResult c;
    CHECK_FALSE(c.failed());
    c.flags = kZeroDynamics;
    CHECK_FALSE(c.failed());
    c.flags = kOutOfRange;
    CHECK(c.failed());
}

TEST_CASE("near closed-system grid") {
    // gamma0 = 1e-6 lands on the closed-system values: saturation for J tau <= pi/2
    // and a return to the initial state at J tau = pi.
    SweepSpec s;
    s.gamma0 = {1e-6, 2e-6, 2};
    s.J = {0.5, pi / 3.0, 2};
    const auto grid = run_sweep(s);
    REQUIRE(grid.cells.size() == 4);
    for (std::size_t g = 0; g < 2; ++g) {
        CHECK(grid.at(g, 0).result.ratio == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(grid.at(g, 1).result.ratio < 1e-4);
        CHECK(grid.at(g, 0).flags == kCellOk);
    }
}

TEST_CASE("grid layout and bounds") {
    const auto s = small_spec(Topology::SystemOnlyBath);
    const auto grid = run_sweep(s);
    CHECK(grid.gamma0_axis.size() == 4);
    CHECK(grid.J_axis.size() == 5);
    REQUIRE(grid.cells.size() == 20);
    CHECK(grid.at(2, 3).gamma0 == grid.gamma0_axis[2]);
    CHECK(grid.at(2, 3).J == grid.J_axis[3]);
    CHECK(grid.failed_count() == 0);
    CHECK(grid.failed_fraction() == 0.0);
    for (const auto& c : grid.cells) {
        CHECK(c.result.ratio >= 0.0);
        CHECK(c.result.ratio <= 1.0 + 1e-9);
        CHECK(c.time_points >= 2001);
        CHECK(c.oracle_amplitude_deviation == -1.0);
    }
}

TEST_CASE("thread count does not change the output") {
    auto s = small_spec(Topology::CommonBath);
    s.threads = 1;
    const auto one = csv_of(run_sweep(s));
    s.threads = 8;
    const auto eight = csv_of(run_sweep(s));
    CHECK(one == eight);
    CHECK(csv_of(run_sweep(s)) == eight);
}

TEST_CASE("oracle deviations per cell") {
    auto s = small_spec();
    s.oracle = OracleMode::Kernel;
    const auto grid = run_sweep(s);
    for (const auto& c : grid.cells) {
        CHECK(c.oracle_amplitude_deviation >= 0.0);
        CHECK(c.oracle_amplitude_deviation < 1e-7);
        CHECK(c.oracle_ratio_deviation < 1e-6);
    }
}

TEST_CASE("cell on a double cubic root") {
    // the solver separates the double root by ~2e-8, so the clustered-root
    // evaluation handles it without the oracle fallback
    SweepSpec s;
    s.topology = Topology::SystemOnlyBath;
    const auto cell = evaluate_cell(s, 1.125, std::sqrt(0.125));
    CHECK_FALSE(cell.failed());
    CHECK(cell.result.ratio >= 0.0);
    CHECK(cell.result.ratio <= 1.0);
    const auto reference = evaluate_cell(s, 1.125 + 1e-4, std::sqrt(0.125));
    CHECK(cell.result.ratio == doctest::Approx(reference.result.ratio).epsilon(1e-3));
}

TEST_CASE("csv format") {
    SweepSpec s;
    s.gamma0 = {1.0, 2.0, 2};
    s.J = {1.0, 2.0, 2};
    const auto text = csv_of(run_sweep(s));
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    CHECK(line == "topology,lambda,tau,gamma0,J,ratio,tau_qsl,tight_norm,flags");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(line.rfind("id,2.00000000000000000e+00,3.00000000000000000e+00,", 0) == 0);
        CHECK(line.find(",op,ok") != std::string::npos);
    }
    CHECK(rows == 4);
    CHECK(text.back() == '\n');
}

TEST_CASE("output files") {
    auto s = small_spec();
    s.oracle = OracleMode::Kernel;
    const auto grid = run_sweep(s);
    const auto dir = scratch_dir("outputs");
    const auto paths = emit_outputs(grid, dir / "nested");
    CHECK(fs::exists(paths.csv));
    CHECK(fs::exists(paths.plot));
    CHECK(fs::exists(paths.oracle_csv));
    CHECK(slurp(paths.csv) == csv_of(grid));
    CHECK(slurp(paths.plot).find("plot 'grid.csv'") != std::string::npos);

    const auto manifest = nlohmann::json::parse(slurp(paths.manifest));
    CHECK(manifest["version"] == std::string(version()));
    CHECK(manifest["settings"]["topology"] == "id");
    CHECK(manifest["settings"]["oracle"] == "kernel");
    CHECK(manifest["cells"] == 20);
    CHECK(manifest["failed_cells"] == 0);
    CHECK(manifest["timings"]["sweep_seconds"].get<double>() >= 0.0);

    // a second run writes the same CSV bytes
    const auto again = emit_outputs(run_sweep(s), dir / "again");
    CHECK(slurp(again.csv) == slurp(paths.csv));

    s.plot_script = false;
    s.oracle = OracleMode::Off;
    const auto bare = emit_outputs(run_sweep(s), dir / "bare");
    CHECK(bare.plot.empty());
    CHECK(bare.oracle_csv.empty());
    CHECK_FALSE(fs::exists(dir / "bare" / "heatmap.gp"));
    fs::remove_all(dir);
}

TEST_CASE("unwritable output directory") {
    const auto dir = scratch_dir("blocked");
    fs::create_directories(dir);
    { std::ofstream(dir / "file") << "x"; }
    const auto grid = run_sweep(small_spec());
    try {
        (void)emit_outputs(grid, dir / "file" / "sub");
        FAIL("expected an error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("file") != std::string::npos);
    }
    fs::remove_all(dir);
}

TEST_CASE("verification passes for every topology") {
    for (auto t : {Topology::IndependentBaths, Topology::CommonBath, Topology::SystemOnlyBath}) {
        SweepSpec s;
        s.topology = t;
        s.verify_samples = 3;
        const auto report = verify(s);
        CHECK(report.passed);
        CHECK(report.entries.size() == 9);
        CHECK(report.max_amplitude_deviation < 1e-7);
        CHECK(report.max_ratio_deviation < 1e-6);
        CHECK(report.arbitration.passed);
    }
}

TEST_CASE("verification fails for the literal cos reading") {
    SweepSpec s;
    s.topology = Topology::CommonBath;
    s.gamma0 = {1.0, 5.0, 2};
    s.J = {1.0, 5.0, 2};
    s.verify_samples = 2;
    s.hc_reading = HcReading::LiteralCos;
    const auto report = verify(s);
    CHECK_FALSE(report.passed);
    CHECK(report.max_amplitude_deviation > 1e-2);
    CHECK(report.worst.gamma0 > 0.0);
}

TEST_CASE("arbitration of the common-bath prefactor") {
    const auto arb = arbitrate_hc_reading();
    CHECK(arb.gamma0 == 1.0);
    CHECK(arb.J == 1.0);
    CHECK(arb.lambda == 2.0);
    CHECK(arb.t == 2.0);
    CHECK(arb.cosh_deviation <= 1e-7);
    CHECK(arb.cos_deviation > 1e-2);
    CHECK(arb.passed);
}

TEST_CASE("closed-system verification") {
    SweepSpec s;
    s.topology = Topology::SystemOnlyBath;
    s.gamma0 = {0.0, 1e-3, 2};
    s.J = {0.0, 5.0, 2};
    s.verify_samples = 2;
    const auto report = verify(s);
    CHECK(report.passed);
}

TEST_CASE("discrete-bath verification") {
    SweepSpec s;
    s.gamma0 = {0.5, 2.0, 2};
    s.J = {0.5, 2.0, 2};
    s.verify_samples = 2;
    s.oracle = OracleMode::Discrete;
    s.bath_modes = 256;
    const auto report = verify(s);
    CHECK(report.max_discrete_deviation >= 0.0);
    CHECK(report.max_discrete_deviation < 1e-3);
    CHECK(report.passed);
}

TEST_CASE("topology comparison") {
    const auto rows = compare_topologies(2.0, 3.0, {1.0, 5.0}, {1.0, 3.0});
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].gamma0 == 1.0);
    CHECK(rows[1].J == 3.0);
    for (const auto& r : rows) {
        for (double v : {r.ratio_independent, r.ratio_common, r.ratio_system_only}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    CHECK(rows[0].ratio_common < rows[0].ratio_independent);
}
