#pragma once

#include "qwalk/sequences.hpp"
#include "qwalk/walk.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qwalk {

enum class Experiment { spread, spectrum, survival, diffraction };

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view name);

/// Every knob of a run. Keys of the config file match the field names.
struct ExperimentConfig {
    SequenceKind sequence = SequenceKind::fibonacci;
    CoinMode mode = CoinMode::spatial;
    double theta1 = 0.785398163397448309616; // pi/4
    double theta2 = 0.523598775598298873077; // pi/6
    std::size_t steps = 500;
    std::optional<int> half_width;           // see resolved_half_width
    std::optional<InitialSpin> initial_spin; // symmetric, except up for survival runs
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "out";
    std::size_t t_f = 500;
    Boundary boundary = Boundary::periodic;
    bool sweep = false;
    std::size_t sweep_points = 128;
    std::vector<std::size_t> operator_steps; // temporal spectra; empty means {steps}
    std::optional<std::size_t> fit_first;
    std::optional<std::size_t> fit_last;
    std::size_t snapshot_every = 0; // 0 disables distribution snapshots
    bool dump_state = false;
    bool gnuplot = false;

    /// Throws std::invalid_argument on inconsistent values.
    void validate() const;
};

/// Parses `value` for `key` into `config`. Unknown keys and malformed values throw
/// std::invalid_argument. Angles accept plain numbers and forms like "pi/4", "3*pi/2".
void apply_setting(ExperimentConfig &config, std::string_view key, std::string_view value);

/// Flat "key = value" text, '#' starts a comment.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path &path);

/// Canonical "key = value" listing of every field, used for hashing and the manifest.
std::map<std::string, std::string> config_entries(const ExperimentConfig &config, Experiment experiment);

double parse_angle(std::string_view text);

/// Explicit half_width, else 500 for spectra and the smallest even N >= steps+1 otherwise.
/// An even N puts letter A of the lattice word on site x = 0.
int resolved_half_width(const ExperimentConfig &config, Experiment experiment);
InitialSpin resolved_initial_spin(const ExperimentConfig &config, Experiment experiment);

/// Coin config for `kind` on the lattice of `half_width` sites (spatial) or `steps` steps (temporal).
CoinConfig make_coin_config(SequenceKind kind, CoinMode mode, double theta1, double theta2, int half_width,
                            std::size_t steps, std::uint64_t seed);

struct RunOutput {
    std::vector<std::filesystem::path> files;
};

RunOutput run_spread(const ExperimentConfig &config);
RunOutput run_spectrum(const ExperimentConfig &config);
RunOutput run_survival(const ExperimentConfig &config);
RunOutput run_diffraction(const ExperimentConfig &config);

/// Dispatches to the run_* function and writes manifest.json next to the outputs.
RunOutput run_experiment(Experiment experiment, const ExperimentConfig &config);

/// %.17g
std::string format_double(double v);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view data);

inline constexpr std::string_view tool_version = "1.0.0";

} // namespace qwalk
