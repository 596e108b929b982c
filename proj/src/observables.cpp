#include "qwalk/observables.hpp"

#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qwalk {

double ProbabilityDistribution::total() const
{
    double s = 0.0;
    for (double v : p)
        s += v;
    return s;
}

ProbabilityDistribution probability_distribution(const WalkState &state)
{
    ProbabilityDistribution d{state.half_width(), std::vector<double>(static_cast<std::size_t>(state.sites()))};
    for (int i = 0; i < state.sites(); ++i)
        d.p[static_cast<std::size_t>(i)] = std::norm(state.up()[i]) + std::norm(state.down()[i]);
    return d;
}

std::pair<double, double> moments(const ProbabilityDistribution &dist)
{
    double m1 = 0.0;
    double m2 = 0.0;
    for (int x = -dist.half_width; x <= dist.half_width; ++x) {
        const double px = dist.at(x);
        m1 += x * px;
        m2 += static_cast<double>(x) * x * px;
    }
    return {m1, m2 - m1 * m1};
}

SpreadSeries spread(const Trajectory &trajectory)
{
    SpreadSeries s;
    const auto n = trajectory.mean.size();
    s.t.resize(n);
    s.mean = trajectory.mean;
    s.variance.resize(n);
    s.sigma.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        s.t[t] = t;
        // clamp cancellation noise; the variance of a distribution is never negative
        const double var = std::max(0.0, trajectory.second_moment[t] - trajectory.mean[t] * trajectory.mean[t]);
        s.variance[t] = var;
        s.sigma[t] = std::sqrt(var);
    }
    return s;
}

EchoSeries survival_series(const Trajectory &trajectory)
{
    if (trajectory.overlap.size() < 2)
        throw std::invalid_argument("trajectory has no recorded steps");
    return {std::vector<complex>(trajectory.overlap.begin(), trajectory.overlap.end() - 1)};
}

EchoSeries survival_series(std::span<const WalkState> states, const WalkState &initial)
{
    EchoSeries e;
    e.nu.reserve(states.size());
    for (const auto &s : states)
        e.nu.push_back(initial.overlap(s));
    return e;
}

CesaroSeries cesaro_average(const EchoSeries &echo)
{
    if (echo.size() == 0)
        throw std::invalid_argument("empty echo series");
    CesaroSeries c;
    c.values.reserve(echo.size());
    double sum = 0.0;
    for (std::size_t t = 0; t < echo.size(); ++t) {
        sum += echo.echo(t);
        c.values.push_back(sum / static_cast<double>(t + 1));
    }
    return c;
}

EchoSpectrum echo_fourier(const EchoSeries &echo)
{
    const auto T = static_cast<long>(echo.size());
    if (T < 2)
        throw std::invalid_argument("echo spectrum needs at least two samples");
    const auto sums = detail::dft_positive(echo.nu);

    EchoSpectrum out;
    const long m_lo = -((T - 1) / 2);
    const long m_hi = T / 2;
    out.u.reserve(static_cast<std::size_t>(T));
    out.amplitude.reserve(static_cast<std::size_t>(T));
    for (long m = m_lo; m <= m_hi; ++m) {
        out.u.push_back(2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(T));
        out.amplitude.push_back(sums[static_cast<std::size_t>((m + T) % T)] / static_cast<double>(T));
    }
    return out;
}

double tail_mean_abs(const EchoSeries &echo)
{
    if (echo.size() == 0)
        throw std::invalid_argument("empty echo series");
    const auto n = echo.size();
    const auto tail = std::max<std::size_t>(1, n / 10);
    double s = 0.0;
    for (std::size_t t = n - tail; t < n; ++t)
        s += std::abs(echo.nu[t]);
    return s / static_cast<double>(tail);
}

SpectralClassReport spectral_class_report(const EchoSeries &echo, const CesaroSeries &cesaro,
                                          std::span<const FitResult> fits, double vanishing_threshold)
{
    if (echo.size() < 100 || cesaro.size() < 100)
        throw std::invalid_argument("spectral classification needs at least 100 samples");
    if (fits.empty())
        throw std::invalid_argument("spectral classification needs at least one fit");

    SpectralClassReport r;
    r.tail_mean_abs_nu = tail_mean_abs(echo);
    r.vanishing_threshold = vanishing_threshold;
    r.amplitude_vanishes = r.tail_mean_abs_nu < vanishing_threshold;

    const FitResult *best = nullptr;
    for (const auto &f : fits) {
        if (f.degenerate || !f.converged)
            continue;
        if (best == nullptr || f.residual < best->residual)
            best = &f;
    }
    if (best == nullptr)
        throw std::invalid_argument("no usable fit for the Cesaro series");
    r.decay_fit = *best;
    r.cesaro_vanishes = best->decays();
    r.singular_continuous = !r.amplitude_vanishes && r.cesaro_vanishes;

    std::ostringstream ev;
    ev.precision(6);
    ev << "tail mean |nu| = " << r.tail_mean_abs_nu << (r.amplitude_vanishes ? " < " : " >= ")
       << "threshold " << vanishing_threshold << "; Cesaro average " << cesaro.values.back() << " at T = "
       << cesaro.size() << ", best fit " << to_string(best->model) << " (residual " << best->residual << ")"
       << (r.cesaro_vanishes ? " decays" : " does not decay");
    r.evidence = ev.str();
    return r;
}

} // namespace qwalk
