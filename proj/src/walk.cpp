#include "qwalk/walk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qwalk {

Eigen::Matrix2cd coin_matrix(double theta)
{
    if (!std::isfinite(theta))
        throw std::invalid_argument("coin angle must be finite");
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Eigen::Matrix2cd m;
    m << c, -s, s, c;
    return m;
}

WalkState::WalkState(int half_width)
    : half_width_(half_width)
{
    if (half_width < 1)
        throw std::invalid_argument("lattice half-width must be >= 1");
    up_ = Eigen::VectorXcd::Zero(sites());
    down_ = Eigen::VectorXcd::Zero(sites());
}

complex WalkState::overlap(const WalkState &other) const
{
    if (other.half_width_ != half_width_)
        throw std::invalid_argument("overlap of states on different lattices");
    return up_.dot(other.up_) + down_.dot(other.down_);
}

Eigen::VectorXcd WalkState::stacked() const
{
    Eigen::VectorXcd v(2 * sites());
    v << up_, down_;
    return v;
}

WalkState WalkState::from_stacked(const Eigen::VectorXcd &v)
{
    if (v.size() < 6 || v.size() % 2 != 0 || (v.size() / 2) % 2 != 1)
        throw std::invalid_argument("stacked vector must have length 2(2N+1)");
    const auto L = static_cast<int>(v.size() / 2);
    WalkState s((L - 1) / 2);
    s.up_ = v.head(L);
    s.down_ = v.tail(L);
    return s;
}

WalkState initial_state(int half_width, InitialSpin spin)
{
    WalkState s(half_width);
    if (spin == InitialSpin::up) {
        s.amplitude(Spin::up, 0) = 1.0;
    } else {
        const double r = 1.0 / std::sqrt(2.0);
        s.amplitude(Spin::up, 0) = r;
        s.amplitude(Spin::down, 0) = complex(0.0, r);
    }
    return s;
}

std::vector<double> CoinConfig::site_angles(int half_width) const
{
    const auto L = static_cast<std::size_t>(2 * half_width + 1);
    if (mode == CoinMode::spatial) {
        if (sequence.size() != L)
            throw std::invalid_argument("spatial sequence length " + std::to_string(sequence.size()) +
                                        " does not match lattice size " + std::to_string(L));
        std::vector<double> out(L);
        for (std::size_t i = 0; i < L; ++i)
            out[i] = angle(sequence[i]);
        return out;
    }
    return std::vector<double>(L, theta1);
}

double CoinConfig::step_angle(std::size_t t) const
{
    if (mode != CoinMode::temporal)
        return theta1;
    if (t >= sequence.size())
        throw std::invalid_argument("temporal sequence shorter than the number of steps");
    return angle(sequence[t]);
}

void CoinConfig::validate(int half_width, std::size_t steps) const
{
    if (!std::isfinite(theta1) || !std::isfinite(theta2))
        throw std::invalid_argument("coin angles must be finite");
    if (half_width < 1)
        throw std::invalid_argument("lattice half-width must be >= 1");
    const auto L = static_cast<std::size_t>(2 * half_width + 1);
    if (mode == CoinMode::spatial && sequence.size() != L)
        throw std::invalid_argument("spatial sequence length " + std::to_string(sequence.size()) +
                                    " != 2N+1 = " + std::to_string(L));
    if (mode == CoinMode::temporal && sequence.size() < steps)
        throw std::invalid_argument("temporal sequence length " + std::to_string(sequence.size()) +
                                    " < steps " + std::to_string(steps));
}

namespace {

void shift(WalkState &state, Boundary boundary)
{
    auto &up = state.up();
    auto &down = state.down();
    const auto L = up.size();
    // up: x -> x-1, i.e. rotate left; down: x -> x+1, rotate right
    std::rotate(up.begin(), up.begin() + 1, up.end());
    std::rotate(down.begin(), down.begin() + (L - 1), down.end());
    if (boundary == Boundary::open_truncated) {
        up[L - 1] = 0.0;
        down[0] = 0.0;
    }
}

} // namespace

void step_inplace(WalkState &state, std::span<const double> theta_of_x, Boundary boundary)
{
    const auto L = static_cast<std::size_t>(state.sites());
    if (theta_of_x.size() != L)
        throw std::invalid_argument("coin assignment has " + std::to_string(theta_of_x.size()) +
                                    " sites, lattice has " + std::to_string(L));
    auto &up = state.up();
    auto &down = state.down();
    for (std::size_t i = 0; i < L; ++i) {
        const double c = std::cos(theta_of_x[i]);
        const double s = std::sin(theta_of_x[i]);
        const complex u = up[i];
        const complex d = down[i];
        up[i] = c * u - s * d;
        down[i] = s * u + c * d;
    }
    shift(state, boundary);
}

void step_inplace(WalkState &state, double theta, Boundary boundary)
{
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    auto &up = state.up();
    auto &down = state.down();
    const Eigen::VectorXcd u = up;
    up = c * u - s * down;
    down = s * u + c * down;
    shift(state, boundary);
}

WalkState step(WalkState state, std::span<const double> theta_of_x, Boundary boundary)
{
    step_inplace(state, theta_of_x, boundary);
    return state;
}

namespace {

void record_point(Trajectory &traj, const WalkState &initial, const WalkState &state, RecordOptions record)
{
    const int N = state.half_width();
    double total = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    std::vector<double> p;
    if (record.distributions)
        p.resize(static_cast<std::size_t>(state.sites()));
    for (int x = -N; x <= N; ++x) {
        const int i = state.index(x);
        const double px = std::norm(state.up()[i]) + std::norm(state.down()[i]);
        total += px;
        m1 += x * px;
        m2 += static_cast<double>(x) * x * px;
        if (record.distributions)
            p[static_cast<std::size_t>(i)] = px;
    }
    traj.norm.push_back(total);
    traj.mean.push_back(m1);
    traj.second_moment.push_back(m2);
    traj.overlap.push_back(initial.overlap(state));
    if (record.distributions)
        traj.distributions.push_back(std::move(p));
    if (record.states)
        traj.states.push_back(state);
}

} // namespace

Trajectory evolve(const CoinConfig &config, int half_width, std::size_t steps, Boundary boundary,
                  const WalkState &initial, RecordOptions record)
{
    if (steps < 1)
        throw std::invalid_argument("number of steps must be >= 1");
    config.validate(half_width, steps);
    if (initial.half_width() != half_width)
        throw std::invalid_argument("initial state lives on a different lattice");

    Trajectory traj;
    traj.half_width = half_width;
    traj.steps = steps;
    for (auto *v : {&traj.norm, &traj.mean, &traj.second_moment})
        v->reserve(steps + 1);
    traj.overlap.reserve(steps + 1);

    WalkState state = initial;
    record_point(traj, initial, state, record);

    const std::vector<double> sites =
        config.mode == CoinMode::spatial ? config.site_angles(half_width) : std::vector<double>{};
    for (std::size_t t = 0; t < steps; ++t) {
        if (config.mode == CoinMode::spatial)
            step_inplace(state, sites, boundary);
        else
            step_inplace(state, config.step_angle(t), boundary);
        record_point(traj, initial, state, record);
    }
    traj.final_state = std::move(state);
    return traj;
}

} // namespace qwalk
