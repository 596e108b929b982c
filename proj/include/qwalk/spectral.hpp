#pragma once

#include "qwalk/errors.hpp"
#include "qwalk/sequences.hpp"
#include "qwalk/walk.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace qwalk {

/// Dense 2L x 2L operator in the stacked [up; down] basis.
struct UnitaryOperator {
    Eigen::MatrixXcd matrix;
    Boundary boundary = Boundary::periodic;
    std::string provenance;
    int half_width = 0;

    /// Frobenius norm of U^dagger U - I.
    double unitarity_defect() const;
};

/// Quasi-energies eps = i log(lambda) on the principal branch (-pi, pi], sorted ascending.
/// eigenvalues[n] is the source of energies[n].
struct QuasiEnergySpectrum {
    std::vector<double> energies;
    std::vector<complex> eigenvalues;
    std::size_t size() const { return energies.size(); }
};

/// Histogram over (-pi, pi] with bins (-pi + k w, -pi + (k+1) w], w = 2 pi / t_f,
/// weights normalized to sum 1.
struct DensityOfStates {
    double bin_width = 0.0;
    std::vector<double> bin_edges; // size bins + 1
    std::vector<double> weights;

    double bin_center(std::size_t k) const { return 0.5 * (bin_edges[k] + bin_edges[k + 1]); }
};

/// f(q) = (1/L) sum_x exp(i q x) w(x) at q = 2 pi m / L, m = -N..N.
struct DiffractionSpectrum {
    std::vector<double> q;
    std::vector<complex> amplitude;
};

struct CoinDecomposition {
    Eigen::Matrix2cd mean;  // (C(theta1) + C(theta2)) / 2
    Eigen::Matrix2cd delta; // (C(theta1) - C(theta2)) / 2
};

/// Principal-branch quasi-energy of a unit-modulus eigenvalue: -arg(lambda), with -pi mapped to +pi.
double quasi_energy(complex lambda);

/// Shift times block-diagonal coin for the given per-site angles (site index i = x + N).
UnitaryOperator assemble_step_operator(std::span<const double> theta_of_x, Boundary boundary);

/// Single-step operator of `config` at step `t` (0-based; only temporal configs depend on it).
UnitaryOperator assemble_step_operator(const CoinConfig &config, int half_width, Boundary boundary,
                                       std::size_t t = 0);

/// Eigenvalues through LAPACK zgeev. Throws NumericalFailure if any |lambda| deviates from 1 by
/// more than `unitarity_tolerance`.
QuasiEnergySpectrum quasi_energies(const UnitaryOperator &op, double unitarity_tolerance = 1e-6);

/// Same branch and ordering for a list of eigenvalues obtained elsewhere.
QuasiEnergySpectrum quasi_energies_from_eigenvalues(std::span<const complex> eigenvalues,
                                                    double unitarity_tolerance = 1e-6);

/// U(t) = W(theta(t-1)) ... W(theta(0)) for a temporal config on a periodic lattice.
UnitaryOperator asymptotic_operator(const CoinConfig &config, int half_width, std::size_t steps);

DensityOfStates dos(const QuasiEnergySpectrum &spectrum, std::size_t t_f);

DiffractionSpectrum diffraction_spectrum(const WeightFunction &w);

CoinDecomposition coin_decomposition(double theta1, double theta2);

/// Hausdorff distance between two quasi-energy sets, measured along the circle.
double hausdorff_distance(std::span<const double> a, std::span<const double> b);

} // namespace qwalk
