#include "qwalk/spectral.hpp"

#include "fft.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace qwalk {

namespace {

constexpr double pi = std::numbers::pi;

double circular_distance(double a, double b)
{
    double d = std::fmod(std::abs(a - b), 2.0 * pi);
    return std::min(d, 2.0 * pi - d);
}

// Largest distance from a point of `from` to its nearest neighbour in sorted `to`.
double directed_distance(std::span<const double> from, const std::vector<double> &to)
{
    double worst = 0.0;
    for (double a : from) {
        auto it = std::lower_bound(to.begin(), to.end(), a);
        const double hi = it == to.end() ? to.front() : *it;
        const double lo = it == to.begin() ? to.back() : *(it - 1);
        worst = std::max(worst, std::min(circular_distance(a, hi), circular_distance(a, lo)));
    }
    return worst;
}

} // namespace

double UnitaryOperator::unitarity_defect() const
{
    const auto n = matrix.rows();
    return (matrix.adjoint() * matrix - Eigen::MatrixXcd::Identity(n, n)).norm();
}

double quasi_energy(complex lambda)
{
    const double e = -std::arg(lambda);
    return e <= -pi ? pi : e;
}

UnitaryOperator assemble_step_operator(std::span<const double> theta_of_x, Boundary boundary)
{
    const auto L = static_cast<Eigen::Index>(theta_of_x.size());
    if (L < 3 || L % 2 == 0)
        throw std::invalid_argument("coin assignment must cover 2N+1 sites with N >= 1");

    UnitaryOperator op;
    op.boundary = boundary;
    op.half_width = static_cast<int>((L - 1) / 2);
    op.provenance = "single-step";
    op.matrix = Eigen::MatrixXcd::Zero(2 * L, 2 * L);
    auto &m = op.matrix;
    const bool periodic = boundary == Boundary::periodic;
    for (Eigen::Index i = 0; i < L; ++i) {
        const double c = std::cos(theta_of_x[static_cast<std::size_t>(i)]);
        const double s = std::sin(theta_of_x[static_cast<std::size_t>(i)]);
        // up component of C|psi_x> lands on x-1, down component on x+1
        if (i > 0 || periodic) {
            const auto l = (i + L - 1) % L;
            m(l, i) += c;
            m(l, L + i) += -s;
        }
        if (i < L - 1 || periodic) {
            const auto r = (i + 1) % L;
            m(L + r, i) += s;
            m(L + r, L + i) += c;
        }
    }
    return op;
}

UnitaryOperator assemble_step_operator(const CoinConfig &config, int half_width, Boundary boundary,
                                       std::size_t t)
{
    config.validate(half_width, config.mode == CoinMode::temporal ? t + 1 : 0);
    std::vector<double> angles;
    std::string provenance;
    switch (config.mode) {
    case CoinMode::spatial:
        angles = config.site_angles(half_width);
        provenance = "single-step spatial (" + std::string(to_string(config.sequence.kind)) + ")";
        break;
    case CoinMode::homogeneous:
        angles = config.site_angles(half_width);
        provenance = "single-step homogeneous";
        break;
    case CoinMode::temporal:
        angles.assign(static_cast<std::size_t>(2 * half_width + 1), config.step_angle(t));
        provenance = "single-step temporal (step " + std::to_string(t) + ")";
        break;
    }
    auto op = assemble_step_operator(angles, boundary);
    op.provenance = std::move(provenance);
    return op;
}

QuasiEnergySpectrum quasi_energies_from_eigenvalues(std::span<const complex> eigenvalues, double unitarity_tolerance)
{
    double worst = 0.0;
    for (auto l : eigenvalues)
        worst = std::max(worst, std::abs(std::abs(l) - 1.0));
    if (worst > unitarity_tolerance)
        throw NumericalFailure("operator is not unitary: max ||lambda| - 1| = " + std::to_string(worst));

    std::vector<std::size_t> order(eigenvalues.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> eps(eigenvalues.size());
    for (std::size_t n = 0; n < eigenvalues.size(); ++n)
        eps[n] = quasi_energy(eigenvalues[n]);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return eps[a] < eps[b]; });

    QuasiEnergySpectrum out;
    out.energies.reserve(order.size());
    out.eigenvalues.reserve(order.size());
    for (auto n : order) {
        out.energies.push_back(eps[n]);
        out.eigenvalues.push_back(eigenvalues[n]);
    }
    return out;
}

QuasiEnergySpectrum quasi_energies(const UnitaryOperator &op, double unitarity_tolerance)
{
    const auto n = op.matrix.rows();
    if (n == 0 || op.matrix.cols() != n)
        throw std::invalid_argument("operator must be a non-empty square matrix");

    Eigen::MatrixXcd a = op.matrix;
    std::vector<complex> w(static_cast<std::size_t>(n));
    const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', static_cast<lapack_int>(n),
                                          reinterpret_cast<lapack_complex_double *>(a.data()),
                                          static_cast<lapack_int>(n),
                                          reinterpret_cast<lapack_complex_double *>(w.data()), nullptr, 1,
                                          nullptr, 1);
    if (info != 0)
        throw NumericalFailure("zgeev failed (info " + std::to_string(info) + ") for " + op.provenance);
    try {
        return quasi_energies_from_eigenvalues(w, unitarity_tolerance);
    } catch (const NumericalFailure &e) {
        throw NumericalFailure(std::string(e.what()) + " [" + op.provenance + "]");
    }
}

UnitaryOperator asymptotic_operator(const CoinConfig &config, int half_width, std::size_t steps)
{
    if (config.mode != CoinMode::temporal)
        throw std::invalid_argument("asymptotic operator requires a temporal coin config");
    if (steps < 1)
        throw std::invalid_argument("asymptotic operator needs at least one step");
    config.validate(half_width, steps);

    const Eigen::Index L = 2 * half_width + 1;
    const Eigen::Index n = 2 * L;
    UnitaryOperator op;
    op.boundary = Boundary::periodic;
    op.half_width = half_width;
    op.provenance = "temporal product U(" + std::to_string(steps) + ") (" +
                    std::string(to_string(config.sequence.kind)) + ")";
    op.matrix = Eigen::MatrixXcd::Identity(n, n);

    // Each column is a walker state; step all of them at once.
    Eigen::MatrixXcd up(L, n), down(L, n);
    auto &m = op.matrix;
    for (std::size_t t = 0; t < steps; ++t) {
        const double theta = config.step_angle(t);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        up.noalias() = c * m.topRows(L) - s * m.bottomRows(L);
        down.noalias() = s * m.topRows(L) + c * m.bottomRows(L);
        m.topRows(L - 1) = up.bottomRows(L - 1);
        m.row(L - 1) = up.row(0);
        m.bottomRows(L - 1) = down.topRows(L - 1);
        m.row(L) = down.row(L - 1);
    }
    return op;
}

DensityOfStates dos(const QuasiEnergySpectrum &spectrum, std::size_t t_f)
{
    if (t_f < 2)
        throw std::invalid_argument("t_f must be >= 2");
    if (spectrum.energies.empty())
        throw std::invalid_argument("empty spectrum");

    DensityOfStates d;
    d.bin_width = 2.0 * pi / static_cast<double>(t_f);
    d.bin_edges.resize(t_f + 1);
    for (std::size_t k = 0; k <= t_f; ++k)
        d.bin_edges[k] = -pi + static_cast<double>(k) * d.bin_width;
    d.weights.assign(t_f, 0.0);

    const double unit = 1.0 / static_cast<double>(spectrum.size());
    for (double e : spectrum.energies) {
        double pos = (e + pi) / d.bin_width;
        // energies within rounding of an edge belong to the bin on its left
        const double nearest = std::round(pos);
        if (std::abs(pos - nearest) < 1e-9)
            pos = nearest;
        auto k = static_cast<long>(std::ceil(pos)) - 1;
        k = std::clamp(k, 0L, static_cast<long>(t_f) - 1);
        d.weights[static_cast<std::size_t>(k)] += unit;
    }
    return d;
}

DiffractionSpectrum diffraction_spectrum(const WeightFunction &w)
{
    const auto L = w.size();
    if (L == 0 || L % 2 == 0)
        throw std::invalid_argument("weight function must cover 2N+1 sites");
    const auto N = static_cast<long>((L - 1) / 2);

    std::vector<complex> signal(w.signs.begin(), w.signs.end());
    const auto sums = detail::dft_positive(signal);

    // sums[k] = sum_i w_i exp(+2 pi i k i / L); site x = i - N adds the phase exp(-i q N).
    DiffractionSpectrum out;
    out.q.reserve(L);
    out.amplitude.reserve(L);
    const double scale = 1.0 / static_cast<double>(L);
    for (long m = -N; m <= N; ++m) {
        const auto k = static_cast<std::size_t>((m + static_cast<long>(L)) % static_cast<long>(L));
        const double q = 2.0 * pi * static_cast<double>(m) / static_cast<double>(L);
        out.q.push_back(q);
        out.amplitude.push_back(scale * sums[k] * std::polar(1.0, -q * static_cast<double>(N)));
    }
    return out;
}

CoinDecomposition coin_decomposition(double theta1, double theta2)
{
    const auto c1 = coin_matrix(theta1);
    const auto c2 = coin_matrix(theta2);
    return {(c1 + c2) / 2.0, (c1 - c2) / 2.0};
}

double hausdorff_distance(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty())
        throw std::invalid_argument("Hausdorff distance of an empty set");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    return std::max(directed_distance(sa, sb), directed_distance(sb, sa));
}

} // namespace qwalk
