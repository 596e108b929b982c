#pragma once

#include "qwalk/errors.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qwalk {

/// Decay laws for a positive series v(T), T = 1, 2, ...
///   power_law:             v = T^alpha
///   scaled_power_law:      v = alpha T^beta
///   stretched_exponential: v = exp(alpha T^beta)
enum class FitModel { power_law, scaled_power_law, stretched_exponential };

std::string_view to_string(FitModel model);

struct FitParameter {
    std::string name;
    double value = 0.0;
    double uncertainty = 0.0; // one sigma
};

/// Inclusive range of T values (1-based) used by a fit.
struct FitWindow {
    std::size_t first = 1;
    std::size_t last = 1;
    std::size_t size() const { return last - first + 1; }
};

/// Last 80% of a series of length n.
FitWindow default_window(std::size_t n);

struct FitResult {
    FitModel model = FitModel::power_law;
    std::vector<FitParameter> params;
    double residual = 0.0; // RMS of log-space residuals
    FitWindow window;
    bool degenerate = false;
    bool converged = true;
    std::size_t iterations = 0;

    double param(std::string_view name) const;
    double evaluate(double T) const;
    /// True when the fitted law tends to zero as T grows.
    bool decays() const;
};

/// Nonlinear fit did not converge; `last` holds the final iterate.
class FitFailure : public NumericalFailure {
public:
    FitFailure(const std::string &what, FitResult last)
        : NumericalFailure(what), last(std::move(last))
    {}
    FitResult last;
};

/// Log-log linear least squares. values[T-1] is v(T).
FitResult fit_power_law(std::span<const double> values, FitWindow window);
FitResult fit_scaled_power_law(std::span<const double> values, FitWindow window);

/// Levenberg-damped Gauss-Newton on log v = alpha T^beta, started from the linearization
/// log(-log v) = log(-alpha) + beta log T. Throws FitFailure after 500 iterations.
FitResult fit_stretched_exponential(std::span<const double> values, FitWindow window);

struct ModelSelection {
    FitResult best;
    std::vector<FitResult> candidates; // power law, scaled power law, stretched exponential
};

/// Fits all three models and picks the lowest residual among non-degenerate, converged fits.
ModelSelection model_select(std::span<const double> values, FitWindow window);

} // namespace qwalk
