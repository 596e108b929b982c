#pragma once

#include "qwalk/fitting.hpp"
#include "qwalk/walk.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qwalk {

/// p_x = |a(up, x)|^2 + |a(down, x)|^2 on x = -N..N.
struct ProbabilityDistribution {
    int half_width = 0;
    std::vector<double> p;

    double at(int x) const { return p[static_cast<std::size_t>(x + half_width)]; }
    double total() const;
};

struct SpreadSeries {
    std::vector<std::size_t> t;
    std::vector<double> mean;
    std::vector<double> variance;
    std::vector<double> sigma;
};

/// Survival amplitude nu(t) = <psi(0)|psi(t)>, t = 0..T-1.
struct EchoSeries {
    std::vector<complex> nu;

    std::size_t size() const { return nu.size(); }
    double echo(std::size_t t) const { return std::norm(nu[t]); }
};

/// Running time average of |nu|^2; values[T-1] = (1/T) sum_{t<T} |nu(t)|^2.
struct CesaroSeries {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double at(std::size_t T) const { return values[T - 1]; }
};

/// nu~(u) = (1/T) sum_t nu(t) exp(+i u t) on u = 2 pi m / T within (-pi, pi], ascending.
/// A pure phase exp(-i e t) peaks at u = e.
struct EchoSpectrum {
    std::vector<double> u;
    std::vector<complex> amplitude;
};

struct SpectralClassReport {
    double tail_mean_abs_nu = 0.0; // mean |nu| over the final 10% of steps
    double vanishing_threshold = 0.0;
    bool amplitude_vanishes = false; // nu(t) -> 0
    bool cesaro_vanishes = false;    // <|nu|^2>_T -> 0
    bool singular_continuous = false;
    FitResult decay_fit;
    std::string evidence;
};

/// Multiple of the two-periodic reference tail that still counts as vanishing.
inline constexpr double reference_tail_factor = 1.5;

ProbabilityDistribution probability_distribution(const WalkState &state);

/// Mean and variance of one distribution.
std::pair<double, double> moments(const ProbabilityDistribution &dist);

/// <x>, sigma^2 and sigma for t = 0..steps.
SpreadSeries spread(const Trajectory &trajectory);

/// nu(t) for t = 0..steps-1 from the overlaps accumulated during evolution.
EchoSeries survival_series(const Trajectory &trajectory);

/// Full-history variant: nu(t) = <initial|states[t]>.
EchoSeries survival_series(std::span<const WalkState> states, const WalkState &initial);

CesaroSeries cesaro_average(const EchoSeries &echo);

EchoSpectrum echo_fourier(const EchoSeries &echo);

/// Mean |nu(t)| over the last 10% of the series.
double tail_mean_abs(const EchoSeries &echo);

/// Evaluates the two asymptotic conditions. `vanishing_threshold` is the tail level below which
/// nu(t) counts as vanishing; pass reference_tail_factor times the two-periodic tail mean.
/// The Cesaro average counts as vanishing when the lowest-residual fit in `fits` decays.
SpectralClassReport spectral_class_report(const EchoSeries &echo, const CesaroSeries &cesaro,
                                          std::span<const FitResult> fits, double vanishing_threshold);

} // namespace qwalk
