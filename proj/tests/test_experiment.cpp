#include "qwalk/experiment.hpp"

#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

using namespace qwalk;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string &name)
{
    const auto p = fs::temp_directory_path() / ("qwalk_test_" + name);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST_CASE("angle expressions")
{
    CHECK(parse_angle("0.5") == 0.5);
    CHECK(parse_angle("pi") == pi);
    CHECK(parse_angle("pi/4") == pi / 4);
    CHECK(parse_angle("3*pi/2") == 3 * pi / 2);
    CHECK(parse_angle(" -pi / 6 ") == -pi / 6);
    CHECK_THROWS_AS(parse_angle("pi/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_angle("3pi"), std::invalid_argument);
    CHECK_THROWS_AS(parse_angle("nan"), std::invalid_argument);
}

TEST_CASE("config parsing is strict")
{
    const auto c = parse_config("# comment\nsequence = thue-morse\nmode=temporal  # trailing\n"
                                "theta2 = pi/2\nsteps = 1000\nseed = 12\noperator_steps = 30, 500\n");
    CHECK(c.sequence == SequenceKind::thue_morse);
    CHECK(c.mode == CoinMode::temporal);
    CHECK(c.theta1 == doctest::Approx(pi / 4));
    CHECK(c.theta2 == pi / 2);
    CHECK(c.steps == 1000);
    CHECK(c.seed == 12);
    CHECK(c.operator_steps == std::vector<std::size_t>{30, 500});

    CHECK_THROWS_AS(parse_config("colour = blue\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("steps = ten\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("steps = 0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("sequence\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("boundary = reflecting\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("t_f = 1\n"), std::invalid_argument);
    try {
        parse_config("steps = 10\nbogus = 1\n");
    } catch (const std::invalid_argument &e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("documented defaults")
{
    ExperimentConfig c;
    CHECK(c.theta1 == doctest::Approx(pi / 4));
    CHECK(c.theta2 == doctest::Approx(pi / 6));
    CHECK(c.steps == 500);
    CHECK(c.t_f == 500);
    CHECK(c.sweep_points == 128);
    CHECK(resolved_half_width(c, Experiment::spread) == 502);
    c.steps = 1000;
    CHECK(resolved_half_width(c, Experiment::survival) == 1002);
    CHECK(resolved_half_width(c, Experiment::spectrum) == 500);
    c.half_width = 77;
    CHECK(resolved_half_width(c, Experiment::spread) == 77);
    CHECK(resolved_initial_spin(c, Experiment::survival) == InitialSpin::up);
    CHECK(resolved_initial_spin(c, Experiment::spread) == InitialSpin::symmetric);
}

TEST_CASE("experiment names")
{
    for (auto e : {Experiment::spread, Experiment::spectrum, Experiment::survival, Experiment::diffraction})
        CHECK(parse_experiment(to_string(e)) == e);
    CHECK_THROWS_AS(parse_experiment("transport"), std::invalid_argument);
}

TEST_CASE("float formatting round-trips")
{
    for (double v : {0.1, pi, -1e-300, 123456789.125})
        CHECK(std::stod(format_double(v)) == v);
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("spread runs are deterministic and write a manifest")
{
    auto c = parse_config("sequence = fibonacci\nsteps = 60\nsweep = true\nsweep_points = 8\nsnapshot_every = 20\n"
                          "dump_state = true\ngnuplot = true\n");
    c.output_dir = scratch("spread_a");
    const auto a = run_experiment(Experiment::spread, c);
    c.output_dir = scratch("spread_b");
    const auto b = run_experiment(Experiment::spread, c);
    REQUIRE(a.files.size() == b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) {
        CHECK(a.files[i].filename() == b.files[i].filename());
        CHECK(slurp(a.files[i]) == slurp(b.files[i]));
    }

    const auto dir = fs::temp_directory_path() / "qwalk_test_spread_a";
    for (const char *f : {"distribution.csv", "spread.csv", "sweep.csv", "snapshots.csv", "snapshots.json",
                          "state.csv", "plot.gp", "manifest.json"})
        CHECK(fs::exists(dir / f));
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["experiment"] == "spread");
    CHECK(manifest["version"] == std::string(tool_version));
    CHECK(manifest["config_hash"].get<std::string>().size() == 16);

    // one row per grid point, one column per sequence
    std::istringstream sweep(slurp(dir / "sweep.csv"));
    std::string line;
    std::getline(sweep, line);
    CHECK(line == "theta2,two-periodic,fibonacci,thue-morse,rudin-shapiro");
    int rows = 0;
    while (std::getline(sweep, line))
        ++rows;
    CHECK(rows == 8);
}

TEST_CASE("invalid config is rejected before any output is written")
{
    ExperimentConfig c;
    c.steps = 0;
    c.output_dir = scratch("invalid");
    CHECK_THROWS_AS(run_experiment(Experiment::spread, c), std::invalid_argument);
    CHECK_FALSE(fs::exists(c.output_dir));
}

TEST_CASE("survival, spectrum and diffraction runs produce their files")
{
    SUBCASE("survival")
    {
        auto c = parse_config("sequence = rudin-shapiro\nsteps = 200\n");
        c.output_dir = scratch("survival");
        run_experiment(Experiment::survival, c);
        for (const char *f : {"echo.csv", "cesaro.csv", "echo_spectrum.csv", "fits.json", "classification.json"})
            CHECK(fs::exists(c.output_dir / f));
        const auto fits = nlohmann::json::parse(slurp(c.output_dir / "fits.json"));
        CHECK(fits["candidates"].size() == 3);
    }
    SUBCASE("temporal spectrum with stabilization distances")
    {
        auto c = parse_config("sequence = fibonacci\nmode = temporal\nhalf_width = 20\noperator_steps = 5, 10\n");
        c.output_dir = scratch("spectrum");
        run_experiment(Experiment::spectrum, c);
        for (const char *f : {"spectrum_t5.csv", "dos_t5.csv", "spectrum_t10.csv", "dos_t10.csv",
                              "spectrum_summary.json"})
            CHECK(fs::exists(c.output_dir / f));
        const auto s = nlohmann::json::parse(slurp(c.output_dir / "spectrum_summary.json"));
        CHECK(s["hausdorff"].size() == 1);
    }
    SUBCASE("spectra refuse open boundaries")
    {
        auto c = parse_config("half_width = 5\nboundary = open-truncated\n");
        c.output_dir = scratch("spectrum_open");
        CHECK_THROWS_AS(run_experiment(Experiment::spectrum, c), std::invalid_argument);
    }
    SUBCASE("diffraction")
    {
        auto c = parse_config("half_width = 50\n");
        c.output_dir = scratch("diffraction");
        run_experiment(Experiment::diffraction, c);
        for (const char *f : {"diffraction_two-periodic.csv", "diffraction_fibonacci.csv",
                              "diffraction_thue-morse.csv", "diffraction_rudin-shapiro.csv", "peaks.json"})
            CHECK(fs::exists(c.output_dir / f));
        const auto peaks = nlohmann::json::parse(slurp(c.output_dir / "peaks.json"));
        CHECK(std::abs(std::abs(peaks["two-periodic"]["peaks"][0]["q"].get<double>()) - 2 * pi * 50 / 101) < 1e-12);
    }
}

TEST_CASE("diffraction statistics")
{
    // Fibonacci peaks stay put when the lattice grows; Rudin-Shapiro stays flat.
    auto run = [](int N) {
        auto c = parse_config("half_width = " + std::to_string(N) + "\n");
        c.output_dir = scratch("diff_" + std::to_string(N));
        run_experiment(Experiment::diffraction, c);
        return nlohmann::json::parse(slurp(c.output_dir / "peaks.json"));
    };
    const auto small = run(500);
    const auto large = run(1000);
    CHECK(small["rudin-shapiro"]["max_over_mean"].get<double>() < 10.0);
    CHECK(large["rudin-shapiro"]["max_over_mean"].get<double>() < 10.0);
    const double grid = 2 * pi / 1001;
    for (int r = 0; r < 4; ++r) {
        const double q_small = small["fibonacci"]["peaks"][r]["q"].get<double>();
        bool matched = false;
        for (int s = 0; s < 10; ++s)
            matched |= std::abs(large["fibonacci"]["peaks"][s]["q"].get<double>() - q_small) <= grid;
        CHECK(matched);
    }
}
