#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "pathsig/scan.hpp"

using namespace pathsig;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kPi = 3.14159265358979323846;

GridScanConfig small_config(int n, double lo, double hi) {
    GridScanConfig config;
    config.tau_range = {lo, hi};
    config.T_range = {lo, hi};
    config.n_tau = n;
    config.n_T = n;
    return config;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

} // namespace

TEST_CASE("grid nodes cover the range inclusively", "[scan]") {
    REQUIRE(grid_node(0.0, 2.0 * kPi, 512, 0) == 0.0);
    REQUIRE(grid_node(0.0, 2.0 * kPi, 512, 511) == 2.0 * kPi);
    REQUIRE_THAT(grid_node(0.0, 1.0, 5, 2), WithinAbs(0.5, 1e-15));
    REQUIRE_THAT(grid_node(1.0, 3.0, 3, 1), WithinAbs(2.0, 1e-15));
}

TEST_CASE("triangle constraint yields explicit nulls", "[scan]") {
    const GridScanResult result = scan_grid(small_config(3, 0.0, kPi));
    REQUIRE(result.points.size() == 9);
    REQUIRE(result.summary.evaluated_count == 6);
    REQUIRE(result.summary.null_count == 3);
    // row-major: T ascending outside, τ ascending inside
    REQUIRE(result.points[1].tau == kPi / 2.0);
    REQUIRE(result.points[1].T == 0.0);
    REQUIRE(!result.points[1].evaluated);
    REQUIRE(result.points[3].tau == 0.0);
    REQUIRE(result.points[3].T == kPi / 2.0);
    REQUIRE(result.points[3].evaluated);

    GridScanConfig unconstrained = small_config(3, 0.0, kPi);
    unconstrained.constrain_tau_le_T = false;
    REQUIRE_THROWS_AS(scan_grid(unconstrained), InvalidRange); // τ > T points now evaluate and reject
}

TEST_CASE("scan configs are validated", "[scan]") {
    GridScanConfig bad = small_config(3, 0.0, 1.0);
    bad.tau_range = {1.0, 1.0};
    REQUIRE_THROWS_AS(scan_grid(bad), InvalidRange);
    bad = small_config(1, 0.0, 1.0);
    REQUIRE_THROWS_AS(scan_grid(bad), InvalidRange);
    bad = small_config(3, 0.0, 1.0);
    bad.jobs = -2;
    REQUIRE_THROWS_AS(scan_grid(bad), InvalidRange);
}

TEST_CASE("csv output has the fixed schema and one row per grid point", "[scan]") {
    std::ostringstream out;
    write_csv(scan_grid(small_config(3, 0.0, kPi)), out);
    const std::vector<std::string> lines = split_lines(out.str());
    REQUIRE(lines.size() == 10);
    REQUIRE(lines[0] == "tau,T,delta_P,delta_p,delta_L,p1,p2,p3,p4,regime,lgi_violated");
    // (τ, T) = (π/2, 0) is a null row
    REQUIRE(lines[2].find("nan,nan,nan,nan,nan,nan,nan,null,0") != std::string::npos);
    // every evaluated row names a regime
    int named = 0;
    for (const std::string& line : lines)
        if (line.find("Classical") != std::string::npos ||
            line.find("Quantum") != std::string::npos)
            ++named;
    REQUIRE(named == 6);
}

TEST_CASE("csv reals survive a parse round-trip", "[scan]") {
    std::mt19937_64 rng(101);
    for (int i = 0; i < 200; ++i) {
        const double value = std::ldexp(testutil::uniform(rng, -1.0, 1.0),
                                        static_cast<int>(testutil::uniform(rng, -40.0, 40.0)));
        REQUIRE(std::strtod(format_real(value).c_str(), nullptr) == value);
    }
    REQUIRE(format_real(0.5) == "0.5");
    REQUIRE(format_real(0.0) == "0");
}

TEST_CASE("scans are deterministic across runs and worker counts", "[scan]") {
    GridScanConfig config = small_config(17, 0.0, 2.0 * kPi);
    std::ostringstream first, second, parallel;
    write_csv(scan_grid(config), first);
    write_csv(scan_grid(config), second);
    config.jobs = 4;
    write_csv(scan_grid(config), parallel);
    REQUIRE(first.str() == second.str());
    REQUIRE(first.str() == parallel.str());
}

TEST_CASE("a grid node hitting the deep-violation point reports its values", "[scan]") {
    const GridScanResult result = scan_grid(small_config(3, 0.0, 2.0 * kPi / 3.0));
    // node (i, j) = (1, 2) is (π/3, 2π/3)
    const GridScanPoint& point = result.points[2 * 3 + 1];
    REQUIRE_THAT(point.tau, WithinAbs(kPi / 3.0, 1e-15));
    REQUIRE_THAT(point.T, WithinAbs(2.0 * kPi / 3.0, 1e-15));
    REQUIRE(point.evaluated);
    REQUIRE_THAT(point.report.delta_L, WithinAbs(-0.5, 1e-12));
    REQUIRE(point.report.lgi_violated);
}

TEST_CASE("summary fractions count evaluated points", "[scan]") {
    const GridScanResult result = scan_grid(small_config(9, 0.0, 2.0 * kPi));
    const ScanSummary& s = result.summary;
    REQUIRE(s.evaluated_count + s.null_count == result.points.size());
    REQUIRE_THAT(s.fraction_quantum_stochastic + s.fraction_classical_stochastic +
                     s.fraction_classical_deterministic,
                 WithinAbs(1.0, 1e-12));
    std::size_t lgi = 0, negativity = 0, signalling = 0;
    for (const GridScanPoint& point : result.points) {
        if (!point.evaluated) continue;
        lgi += point.report.lgi_violated;
        negativity += point.report.negativity_detected;
        signalling += point.report.signalling_detected;
    }
    const double denom = static_cast<double>(s.evaluated_count);
    REQUIRE_THAT(s.fraction_lgi_violated, WithinAbs(static_cast<double>(lgi) / denom, 1e-15));
    REQUIRE_THAT(s.fraction_negativity, WithinAbs(static_cast<double>(negativity) / denom, 1e-15));
    REQUIRE_THAT(s.fraction_signalling, WithinAbs(static_cast<double>(signalling) / denom, 1e-15));
}

TEST_CASE("pgm maps scale into reserved pixel ranges", "[scan]") {
    GridScanConfig config = small_config(3, 0.0, kPi / 2.0);
    const GridScanResult result = scan_grid(config);
    std::ostringstream out;
    write_pgm(result, WitnessField::DeltaP, out);
    const std::string pgm = out.str();
    REQUIRE(pgm.rfind("P5\n3 3\n255\n", 0) == 0);
    const std::string pixels = pgm.substr(11);
    REQUIRE(pixels.size() == 9);
    // top row is T = π/2: shifts (0, 1/2, 0) → pixels (1, 255, 1); nulls are 0
    const std::vector<unsigned char> expected = {1, 255, 1, 1, 1, 0, 1, 0, 0};
    for (std::size_t i = 0; i < 9; ++i)
        REQUIRE(static_cast<unsigned char>(pixels[i]) == expected[i]);

    const nlohmann::json sidecar = nlohmann::json::parse(pgm_sidecar_json(result, WitnessField::DeltaP));
    REQUIRE(sidecar.at("field") == "delta_P");
    REQUIRE_THAT(sidecar.at("min").get<double>(), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(sidecar.at("max").get<double>(), WithinAbs(0.5, 1e-12));
    REQUIRE(sidecar.at("n_tau") == 3);
    REQUIRE(sidecar.at("null_pixel") == 0);
    REQUIRE(sidecar.at("row_order") == "T descending");

    // a fully null grid has nothing to scale
    GridScanConfig empty;
    empty.tau_range = {2.0, 3.0};
    empty.T_range = {0.0, 1.0};
    empty.n_tau = empty.n_T = 2;
    const GridScanResult nulls = scan_grid(empty);
    REQUIRE(nulls.summary.evaluated_count == 0);
    std::ostringstream sink;
    REQUIRE_THROWS_AS(write_pgm(nulls, WitnessField::DeltaP, sink), InvalidRange);
}

TEST_CASE("witness field names round-trip", "[scan]") {
    for (WitnessField field : {WitnessField::DeltaP, WitnessField::DeltaQuasi, WitnessField::DeltaL,
                               WitnessField::RegimeIndex})
        REQUIRE(parse_witness_field(to_string(field)) == field);
    REQUIRE_THROWS_AS(parse_witness_field("delta_Q"), InvalidRange);
    for (OutputFormat format : {OutputFormat::Csv, OutputFormat::Json, OutputFormat::Pgm})
        REQUIRE(parse_output_format(to_string(format)) == format);
    REQUIRE_THROWS_AS(parse_output_format("bmp"), InvalidRange);
}

TEST_CASE("failed writes surface as errors", "[scan]") {
    std::ostringstream out;
    out.setstate(std::ios::badbit);
    REQUIRE_THROWS_AS(write_csv(scan_grid(small_config(2, 0.0, 1.0)), out), OutputWriteFailure);
}

TEST_CASE("ensemble dumps list records and amplitudes", "[scan]") {
    const std::string text = dump_ensemble(kPi / 4.0, kPi / 2.0, {true, true, true});
    REQUIRE(text.find("real paths: 4") != std::string::npos);
    REQUIRE(text.find("virtual paths: 8") != std::string::npos);
    REQUIRE(text.find("probability = 0.25") != std::string::npos);
    REQUIRE(text.find("[+1 +1 +1]") != std::string::npos);
    REQUIRE(text.find("[-1 -1 -1]") != std::string::npos);

    const std::string still = dump_ensemble(0.0, 0.0, {true, false, true});
    REQUIRE(still.find("real paths: 1") != std::string::npos);
    REQUIRE(still.find("probability = 1") != std::string::npos);
}

TEST_CASE("point classification prints the regime in words", "[scan]") {
    REQUIRE(classify_point(kPi / 2.0, kPi).find("classical deterministic") != std::string::npos);
    REQUIRE(classify_point(kPi / 2.0, 3.0 * kPi / 4.0).find("classical stochastic") !=
            std::string::npos);
    REQUIRE(classify_point(kPi / 4.0, kPi / 2.0).find("quantum stochastic") != std::string::npos);
    REQUIRE(classify_point(kPi / 4.0, kPi / 2.0).find("model: infeasible") != std::string::npos);
    REQUIRE(classify_point(kPi / 2.0, kPi).find("model: feasible") != std::string::npos);
}
