#include "qwalk/fitting.hpp"
#include "qwalk/observables.hpp"
#include "qwalk/sequences.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace qwalk;

namespace {

constexpr double pi = std::numbers::pi;

EchoSeries phase_series(std::size_t T, double eps)
{
    EchoSeries e;
    for (std::size_t t = 0; t < T; ++t)
        e.nu.push_back(std::polar(1.0, -eps * static_cast<double>(t)));
    return e;
}

EchoSeries delta_series(std::size_t T)
{
    EchoSeries e;
    e.nu.assign(T, complex(0.0));
    e.nu[0] = 1.0;
    return e;
}

} // namespace

TEST_CASE("probability distributions")
{
    const auto p0 = probability_distribution(initial_state(5, InitialSpin::symmetric));
    CHECK(p0.at(0) == doctest::Approx(1.0));
    CHECK(p0.total() == doctest::Approx(1.0));

    auto s = initial_state(5, InitialSpin::symmetric);
    step_inplace(s, pi / 4, Boundary::periodic);
    const auto p1 = probability_distribution(s);
    CHECK(p1.at(-1) == doctest::Approx(0.5));
    CHECK(p1.at(1) == doctest::Approx(0.5));
    const auto [mean, var] = moments(p1);
    CHECK(std::abs(mean) < 1e-15);
    CHECK(var == doctest::Approx(1.0));
}

TEST_CASE("property: distributions stay normalized")
{
    const int N = 502;
    CoinConfig cfg{pi / 4, pi / 6, CoinMode::spatial, generate_fibonacci(2 * N + 1)};
    RecordOptions rec;
    rec.distributions = true;
    const auto tr = evolve(cfg, N, 500, Boundary::periodic, initial_state(N, InitialSpin::symmetric), rec);
    for (const auto &d : tr.distributions) {
        double s = 0.0;
        for (double p : d) {
            REQUIRE(p >= 0.0);
            s += p;
        }
        REQUIRE(std::abs(s - 1.0) < 1e-12);
    }
}

TEST_CASE("spread series respects the light cone")
{
    const int N = 120;
    CoinConfig cfg{pi / 4, 1.0, CoinMode::spatial, generate_thue_morse(2 * N + 1)};
    const auto sp = spread(evolve(cfg, N, 100, Boundary::periodic, initial_state(N, InitialSpin::symmetric)));
    REQUIRE(sp.t.size() == 101);
    CHECK(sp.sigma[0] == 0.0);
    for (std::size_t t = 0; t < sp.t.size(); ++t) {
        CHECK(sp.variance[t] >= 0.0);
        CHECK(sp.sigma[t] <= static_cast<double>(t) + 1e-12);
    }
}

TEST_CASE("hadamard walk spreads ballistically at the known rate")
{
    // sigma(t)/t -> sqrt(1 - 1/sqrt 2) for the symmetric Hadamard walk.
    const int N = 2002;
    CoinConfig cfg{pi / 4, 0.0, CoinMode::homogeneous, {}};
    const auto sp = spread(evolve(cfg, N, 2000, Boundary::periodic, initial_state(N, InitialSpin::symmetric)));
    const double ratio = sp.sigma.back() / 2000.0;
    CHECK(std::abs(ratio / std::sqrt(1.0 - 1.0 / std::sqrt(2.0)) - 1.0) < 0.01);
}

TEST_CASE("survival amplitude")
{
    const int N = 40;
    CoinConfig cfg{pi / 4, 0.0, CoinMode::homogeneous, {}};
    for (auto spin : {InitialSpin::up, InitialSpin::symmetric}) {
        const auto init = initial_state(N, spin);
        RecordOptions rec;
        rec.states = true;
        const auto tr = evolve(cfg, N, 30, Boundary::periodic, init, rec);
        const auto e = survival_series(tr);
        REQUIRE(e.size() == 30);
        CHECK(std::abs(e.nu[0] - 1.0) < 1e-15);
        CHECK(std::abs(e.nu[1]) == 0.0);
        for (std::size_t t = 0; t < e.size(); ++t)
            CHECK(e.echo(t) <= 1.0 + 1e-15);

        // the on-the-fly overlaps agree with the full-history variant
        const auto full = survival_series(tr.states, init);
        REQUIRE(full.size() == 31);
        for (std::size_t t = 0; t < e.size(); ++t)
            CHECK(std::abs(full.nu[t] - e.nu[t]) < 1e-15);
    }
}

TEST_CASE("cesaro averages")
{
    EchoSeries ones;
    ones.nu.assign(10, complex(0.6, 0.8));
    for (double v : cesaro_average(ones).values)
        CHECK(v == doctest::Approx(1.0));

    const auto c = cesaro_average(delta_series(50));
    CHECK(c.at(1) == 1.0);
    for (std::size_t T = 1; T <= 50; ++T)
        CHECK(c.at(T) == doctest::Approx(1.0 / static_cast<double>(T)));
    for (std::size_t T = 2; T <= 50; ++T)
        CHECK(c.at(T) < c.at(T - 1));

    CHECK_THROWS_AS(cesaro_average(EchoSeries{}), std::invalid_argument);
}

TEST_CASE("property: cesaro running mean equals brute-force summation")
{
    const int N = 302;
    CoinConfig cfg{pi / 4, pi / 6, CoinMode::spatial, generate_rudin_shapiro(2 * N + 1)};
    const auto e = survival_series(evolve(cfg, N, 300, Boundary::periodic, initial_state(N, InitialSpin::up)));
    const auto c = cesaro_average(e);
    for (std::size_t T = 1; T <= e.size(); ++T) {
        double s = 0.0;
        for (std::size_t t = 0; t < T; ++t)
            s += std::norm(e.nu[t]);
        REQUIRE(std::abs(c.at(T) - s / static_cast<double>(T)) < 1e-14);
        REQUIRE(c.at(T) >= 0.0);
        REQUIRE(c.at(T) <= 1.0);
    }
}

TEST_CASE("echo fourier transform")
{
    SUBCASE("pure phase peaks at its quasi-energy")
    {
        const std::size_t T = 64;
        const double eps = 2.0 * pi * 5.0 / T;
        const auto f = echo_fourier(phase_series(T, eps));
        REQUIRE(f.u.size() == T);
        for (std::size_t k = 0; k < T; ++k) {
            if (std::abs(f.u[k] - eps) < 1e-12)
                CHECK(std::abs(f.amplitude[k]) == doctest::Approx(1.0));
            else
                CHECK(std::abs(f.amplitude[k]) < 1e-13);
        }
    }
    SUBCASE("grid is ascending inside (-pi, pi]")
    {
        for (std::size_t T : {7u, 8u, 101u}) {
            const auto f = echo_fourier(delta_series(T));
            CHECK(f.u.front() > -pi);
            CHECK(f.u.back() <= pi + 1e-15);
            for (std::size_t k = 1; k < T; ++k)
                CHECK(f.u[k] > f.u[k - 1]);
        }
    }
    SUBCASE("delta series is flat")
    {
        const auto f = echo_fourier(delta_series(40));
        for (auto a : f.amplitude)
            CHECK(std::abs(a) == doctest::Approx(1.0 / 40));
    }
    SUBCASE("parseval and direct-sum oracle")
    {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> g;
        EchoSeries e;
        for (int t = 0; t < 97; ++t)
            e.nu.emplace_back(g(rng), g(rng));
        const auto f = echo_fourier(e);
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t k = 0; k < f.u.size(); ++k) {
            lhs += std::norm(f.amplitude[k]);
            complex direct = 0.0;
            for (std::size_t t = 0; t < e.size(); ++t)
                direct += e.nu[t] * std::polar(1.0, f.u[k] * static_cast<double>(t));
            CHECK(std::abs(f.amplitude[k] - direct / 97.0) < 1e-12);
        }
        for (auto v : e.nu)
            rhs += std::norm(v);
        CHECK(std::abs(lhs - rhs / 97.0) < 1e-12);
    }
    CHECK_THROWS_AS(echo_fourier(delta_series(1)), std::invalid_argument);
}

TEST_CASE("spectral class report on synthetic series")
{
    const std::size_t T = 400;
    SUBCASE("pure point")
    {
        const auto e = phase_series(T, 0.7);
        const auto c = cesaro_average(e);
        const auto sel = model_select(c.values, default_window(c.size()));
        const auto r = spectral_class_report(e, c, sel.candidates, 0.1);
        CHECK_FALSE(r.amplitude_vanishes);
        CHECK_FALSE(r.cesaro_vanishes);
        CHECK_FALSE(r.singular_continuous);
        CHECK_FALSE(r.evidence.empty());
    }
    SUBCASE("flat measure")
    {
        auto e = delta_series(T);
        for (std::size_t t = 1; t < T; ++t)
            e.nu[t] = 1e-9; // keep the Cesaro series strictly positive for log fits
        const auto c = cesaro_average(e);
        const auto sel = model_select(c.values, default_window(c.size()));
        const auto r = spectral_class_report(e, c, sel.candidates, 0.1);
        CHECK(r.amplitude_vanishes);
        CHECK(r.cesaro_vanishes);
        CHECK_FALSE(r.singular_continuous);
    }
    SUBCASE("non-vanishing amplitude with decaying average is singular continuous")
    {
        EchoSeries e;
        for (std::size_t t = 0; t < T; ++t)
            e.nu.push_back(std::pow(static_cast<double>(t + 1), -0.3));
        const auto c = cesaro_average(e);
        const auto sel = model_select(c.values, default_window(c.size()));
        const auto r = spectral_class_report(e, c, sel.candidates, 0.05);
        CHECK_FALSE(r.amplitude_vanishes);
        CHECK(r.cesaro_vanishes);
        CHECK(r.singular_continuous);
    }
    SUBCASE("short series are rejected")
    {
        const auto e = phase_series(50, 0.1);
        const auto c = cesaro_average(e);
        const auto sel = model_select(c.values, default_window(c.size()));
        CHECK_THROWS_AS(spectral_class_report(e, c, sel.candidates, 0.1), std::invalid_argument);
    }
}

TEST_CASE("fibonacci walk: amplitude persists while the average decays")
{
    const int N = 502;
    const std::size_t T = 500;
    const auto init = initial_state(N, InitialSpin::up);
    auto run = [&](SequenceKind k) {
        CoinConfig cfg{pi / 4, pi / 6, CoinMode::spatial, generate(k, 2 * N + 1)};
        return survival_series(evolve(cfg, N, T, Boundary::periodic, init));
    };
    const auto fib = run(SequenceKind::fibonacci);
    const double threshold = reference_tail_factor * tail_mean_abs(run(SequenceKind::two_periodic));
    const auto c = cesaro_average(fib);
    const auto sel = model_select(c.values, default_window(c.size()));
    const auto r = spectral_class_report(fib, c, sel.candidates, threshold);
    CHECK_FALSE(r.amplitude_vanishes);
    CHECK(r.cesaro_vanishes);
    CHECK(r.singular_continuous);
}
