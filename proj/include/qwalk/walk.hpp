#pragma once

#include "qwalk/sequences.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qwalk {

using complex = std::complex<double>;

enum class Spin { up, down };
enum class InitialSpin { up, symmetric };
enum class Boundary { periodic, open_truncated };
enum class CoinMode { homogeneous, spatial, temporal };

/// Real rotation [[cos, -sin], [sin, cos]]. Throws std::invalid_argument for non-finite angles.
Eigen::Matrix2cd coin_matrix(double theta);

/// Walker amplitudes on sites x = -N..N, stored as two contiguous arrays (spin up, spin down).
class WalkState {
public:
    explicit WalkState(int half_width);

    int half_width() const { return half_width_; }
    int sites() const { return 2 * half_width_ + 1; }
    int index(int x) const { return x + half_width_; }

    complex amplitude(Spin s, int x) const { return s == Spin::up ? up_[index(x)] : down_[index(x)]; }
    complex &amplitude(Spin s, int x) { return s == Spin::up ? up_[index(x)] : down_[index(x)]; }

    Eigen::VectorXcd &up() { return up_; }
    Eigen::VectorXcd &down() { return down_; }
    const Eigen::VectorXcd &up() const { return up_; }
    const Eigen::VectorXcd &down() const { return down_; }

    double norm_squared() const { return up_.squaredNorm() + down_.squaredNorm(); }

    /// <this|other>
    complex overlap(const WalkState &other) const;

    /// Stacked [up; down] vector, the basis ordering used by dense operators.
    Eigen::VectorXcd stacked() const;
    static WalkState from_stacked(const Eigen::VectorXcd &v);

private:
    int half_width_;
    Eigen::VectorXcd up_;
    Eigen::VectorXcd down_;
};

/// Walker at x = 0 with coin state |up> or (|up> + i|down>)/sqrt(2).
WalkState initial_state(int half_width, InitialSpin spin);

/// Coin angles plus the rule that distributes them. Letter A selects theta1, B selects theta2.
struct CoinConfig {
    double theta1 = 0.0;
    double theta2 = 0.0;
    CoinMode mode = CoinMode::homogeneous;
    LetterString sequence; // unused for homogeneous walks

    double angle(Letter l) const { return l == Letter::A ? theta1 : theta2; }

    /// Per-site angles for a spatial (or homogeneous) walk on 2N+1 sites.
    std::vector<double> site_angles(int half_width) const;

    /// Angle applied at step t (0-based) of a temporal (or homogeneous) walk.
    double step_angle(std::size_t t) const;

    /// Throws std::invalid_argument if the config cannot drive `steps` steps on 2N+1 sites.
    void validate(int half_width, std::size_t steps) const;
};

/// One walk step in place: coin C(theta(x)) on every site, then spin up moves to x-1 and
/// spin down to x+1.
void step_inplace(WalkState &state, std::span<const double> theta_of_x, Boundary boundary);
void step_inplace(WalkState &state, double theta, Boundary boundary);

WalkState step(WalkState state, std::span<const double> theta_of_x, Boundary boundary);

struct RecordOptions {
    bool states = false;
    bool distributions = false;
};

/// Time series of one run. Index t = 0 is the initial state, t = steps the final one.
struct Trajectory {
    int half_width = 0;
    std::size_t steps = 0;
    std::vector<double> norm;          // sum_x p_x
    std::vector<double> mean;          // sum_x x p_x
    std::vector<double> second_moment; // sum_x x^2 p_x
    std::vector<complex> overlap;      // <psi(0)|psi(t)>
    std::vector<std::vector<double>> distributions;
    std::vector<WalkState> states;
    WalkState final_state{1};
};

Trajectory evolve(const CoinConfig &config, int half_width, std::size_t steps, Boundary boundary,
                  const WalkState &initial, RecordOptions record = {});

} // namespace qwalk
