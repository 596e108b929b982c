#include "qwalk/fitting.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qwalk {

namespace {

constexpr std::size_t max_iterations = 500;
constexpr double relative_tolerance = 1e-10;

struct LogData {
    Eigen::VectorXd logT;
    Eigen::VectorXd logv;
};

LogData prepare(std::span<const double> values, FitWindow window, std::size_t min_points)
{
    if (window.first < 1 || window.last < window.first || window.last > values.size())
        throw std::invalid_argument("fit window [" + std::to_string(window.first) + ", " +
                                    std::to_string(window.last) + "] outside data range 1.." +
                                    std::to_string(values.size()));
    if (window.size() < min_points)
        throw std::invalid_argument("fit window has " + std::to_string(window.size()) + " points, need " +
                                    std::to_string(min_points));
    LogData d{Eigen::VectorXd(static_cast<Eigen::Index>(window.size())),
              Eigen::VectorXd(static_cast<Eigen::Index>(window.size()))};
    for (std::size_t T = window.first; T <= window.last; ++T) {
        const double v = values[T - 1];
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("fit requires strictly positive values (T = " + std::to_string(T) + ")");
        const auto k = static_cast<Eigen::Index>(T - window.first);
        d.logT[k] = std::log(static_cast<double>(T));
        d.logv[k] = std::log(v);
    }
    return d;
}

double rms(const Eigen::VectorXd &r) { return std::sqrt(r.squaredNorm() / static_cast<double>(r.size())); }

// Ordinary least squares y = a + b x with standard errors.
struct Line {
    double a, b, sa, sb, residual;
};

Line fit_line(const Eigen::VectorXd &x, const Eigen::VectorXd &y)
{
    const auto n = static_cast<double>(x.size());
    const double mx = x.mean();
    const double my = y.mean();
    const double sxx = (x.array() - mx).square().sum();
    if (!(sxx > 0.0))
        throw std::invalid_argument("degenerate fit window");
    const double b = ((x.array() - mx) * (y.array() - my)).sum() / sxx;
    const double a = my - b * mx;
    const Eigen::VectorXd r = y - (Eigen::VectorXd::Constant(x.size(), a) + b * x);
    const double s2 = n > 2 ? r.squaredNorm() / (n - 2) : 0.0;
    const double sb = std::sqrt(s2 / sxx);
    const double sa = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
    return {a, b, sa, sb, rms(r)};
}

} // namespace

std::string_view to_string(FitModel model)
{
    switch (model) {
    case FitModel::power_law: return "power-law";
    case FitModel::scaled_power_law: return "scaled-power-law";
    case FitModel::stretched_exponential: return "stretched-exponential";
    }
    return "unknown";
}

FitWindow default_window(std::size_t n)
{
    if (n == 0)
        throw std::invalid_argument("empty series");
    const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(0.8 * static_cast<double>(n)));
    return {n - keep + 1, n};
}

double FitResult::param(std::string_view name) const
{
    for (const auto &p : params)
        if (p.name == name)
            return p.value;
    throw std::invalid_argument("fit has no parameter '" + std::string(name) + "'");
}

double FitResult::evaluate(double T) const
{
    switch (model) {
    case FitModel::power_law: return std::pow(T, param("alpha"));
    case FitModel::scaled_power_law: return param("alpha") * std::pow(T, param("beta"));
    case FitModel::stretched_exponential: return std::exp(param("alpha") * std::pow(T, param("beta")));
    }
    return std::numeric_limits<double>::quiet_NaN();
}

bool FitResult::decays() const
{
    if (degenerate)
        return false;
    switch (model) {
    case FitModel::power_law: return param("alpha") < 0.0;
    case FitModel::scaled_power_law: return param("beta") < 0.0;
    case FitModel::stretched_exponential: return param("alpha") < 0.0 && param("beta") > 0.0;
    }
    return false;
}

FitResult fit_power_law(std::span<const double> values, FitWindow window)
{
    const auto d = prepare(values, window, 10);
    const double suu = d.logT.squaredNorm();
    if (!(suu > 0.0))
        throw std::invalid_argument("degenerate fit window");
    const double alpha = d.logT.dot(d.logv) / suu;
    const Eigen::VectorXd r = d.logv - alpha * d.logT;
    const auto n = static_cast<double>(r.size());
    const double s2 = r.squaredNorm() / (n - 1.0);

    FitResult f;
    f.model = FitModel::power_law;
    f.params = {{"alpha", alpha, std::sqrt(s2 / suu)}};
    f.residual = rms(r);
    f.window = window;
    return f;
}

FitResult fit_scaled_power_law(std::span<const double> values, FitWindow window)
{
    const auto d = prepare(values, window, 10);
    const auto line = fit_line(d.logT, d.logv);
    const double alpha = std::exp(line.a);

    FitResult f;
    f.model = FitModel::scaled_power_law;
    f.params = {{"alpha", alpha, alpha * line.sa}, {"beta", line.b, line.sb}};
    f.residual = line.residual;
    f.window = window;
    return f;
}

FitResult fit_stretched_exponential(std::span<const double> values, FitWindow window)
{
    const auto d = prepare(values, window, 20);
    const auto &u = d.logT;
    const auto &y = d.logv;
    const auto n = u.size();

    FitResult f;
    f.model = FitModel::stretched_exponential;
    f.window = window;

    // log v == 0 everywhere: alpha = 0 and beta is unidentifiable
    if (y.cwiseAbs().maxCoeff() == 0.0) {
        f.params = {{"alpha", 0.0, 0.0}, {"beta", 0.0, std::numeric_limits<double>::infinity()}};
        f.residual = 0.0;
        f.degenerate = true;
        return f;
    }

    double alpha, beta;
    if ((y.array() < 0.0).all() || (y.array() > 0.0).all()) {
        const double sign = y[0] < 0.0 ? -1.0 : 1.0;
        const Eigen::VectorXd z = (sign * y).array().log().matrix();
        const auto line = fit_line(u, z);
        alpha = sign * std::exp(line.a);
        beta = line.b;
    } else {
        beta = 0.5;
        const Eigen::ArrayXd g = (beta * u.array()).exp();
        alpha = (g * y.array()).sum() / g.square().sum();
    }

    auto residuals = [&](double a, double b) -> Eigen::VectorXd {
        return (a * (b * u.array()).exp()).matrix() - y;
    };

    Eigen::VectorXd r = residuals(alpha, beta);
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    bool converged = false;
    std::size_t it = 0;
    Eigen::Matrix2d jtj;
    for (; it < max_iterations && !converged; ++it) {
        Eigen::MatrixXd J(n, 2);
        const Eigen::ArrayXd g = (beta * u.array()).exp();
        J.col(0) = g.matrix();
        J.col(1) = (alpha * u.array() * g).matrix();
        jtj = J.transpose() * J;
        const Eigen::Vector2d grad = J.transpose() * r;

        Eigen::Matrix2d damped = jtj;
        damped.diagonal() += lambda * jtj.diagonal();
        const Eigen::Vector2d delta = -damped.ldlt().solve(grad);
        if (!delta.allFinite())
            break;

        const double rel = std::max(std::abs(delta[0]) / std::max(std::abs(alpha), 1e-300),
                                    std::abs(delta[1]) / std::max(std::abs(beta), 1e-300));
        const Eigen::VectorXd r_trial = residuals(alpha + delta[0], beta + delta[1]);
        const double cost_trial = r_trial.squaredNorm();
        if (std::isfinite(cost_trial) && cost_trial <= cost) {
            alpha += delta[0];
            beta += delta[1];
            r = r_trial;
            cost = cost_trial;
            lambda = std::max(lambda / 10.0, 1e-15);
        } else {
            lambda *= 10.0;
        }
        // accepted or not, a negligible step means we sit at the minimum
        if (rel < relative_tolerance)
            converged = true;
    }

    {
        Eigen::MatrixXd J(n, 2);
        const Eigen::ArrayXd g = (beta * u.array()).exp();
        J.col(0) = g.matrix();
        J.col(1) = (alpha * u.array() * g).matrix();
        jtj = J.transpose() * J;
    }
    const double s2 = n > 2 ? cost / static_cast<double>(n - 2) : 0.0;
    Eigen::Vector2d sigma = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
    Eigen::FullPivLU<Eigen::Matrix2d> lu(jtj);
    if (lu.isInvertible())
        sigma = (s2 * lu.inverse().diagonal()).cwiseAbs().cwiseSqrt();

    f.params = {{"alpha", alpha, sigma[0]}, {"beta", beta, sigma[1]}};
    f.residual = rms(r);
    f.iterations = it;
    f.converged = converged;
    f.degenerate = std::abs(beta) < 1e-12 || std::abs(beta) <= 3.0 * sigma[1];
    if (!converged)
        throw FitFailure("stretched-exponential fit did not converge in " + std::to_string(max_iterations) +
                             " iterations",
                         f);
    return f;
}

ModelSelection model_select(std::span<const double> values, FitWindow window)
{
    ModelSelection sel;
    sel.candidates.push_back(fit_power_law(values, window));
    sel.candidates.push_back(fit_scaled_power_law(values, window));
    try {
        sel.candidates.push_back(fit_stretched_exponential(values, window));
    } catch (const FitFailure &e) {
        sel.candidates.push_back(e.last);
    }

    const FitResult *best = nullptr;
    for (const auto &c : sel.candidates) {
        if (c.degenerate || !c.converged)
            continue;
        if (best == nullptr || c.residual < best->residual)
            best = &c;
    }
    sel.best = *best; // the power law is never degenerate
    return sel;
}

} // namespace qwalk
