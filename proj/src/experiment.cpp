#include "qwalk/experiment.hpp"

#include "qwalk/fitting.hpp"
#include "qwalk/observables.hpp"
#include "qwalk/spectral.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace qwalk {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr SequenceKind deterministic_kinds[] = {SequenceKind::two_periodic, SequenceKind::fibonacci,
                                                SequenceKind::thue_morse, SequenceKind::rudin_shapiro};

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected)
{
    throw std::invalid_argument("invalid value '" + std::string(value) + "' for key '" + std::string(key) +
                                "' (expected " + std::string(expected) + ")");
}

double parse_double(std::string_view key, std::string_view text)
{
    text = trim(text);
    double v = 0.0;
    const auto *end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
        bad_value(key, text, "a finite number");
    return v;
}

template <class Int>
Int parse_integer(std::string_view key, std::string_view text)
{
    text = trim(text);
    Int v{};
    const auto *end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end)
        bad_value(key, text, "an integer");
    return v;
}

bool parse_bool(std::string_view key, std::string_view text)
{
    text = trim(text);
    if (text == "true" || text == "1" || text == "yes")
        return true;
    if (text == "false" || text == "0" || text == "no")
        return false;
    bad_value(key, text, "true or false");
}

std::string_view to_string(CoinMode m)
{
    switch (m) {
    case CoinMode::homogeneous: return "homogeneous";
    case CoinMode::spatial: return "spatial";
    case CoinMode::temporal: return "temporal";
    }
    return "unknown";
}

std::string_view to_string(Boundary b) { return b == Boundary::periodic ? "periodic" : "open-truncated"; }
std::string_view to_string(InitialSpin s) { return s == InitialSpin::up ? "up" : "symmetric"; }

// Writes rows of numbers with %.17g and '\n' line endings.
class CsvWriter {
public:
    CsvWriter(const fs::path &path, std::string_view header)
        : path_(path), out_(path, std::ios::binary)
    {
        if (!out_)
            throw std::runtime_error("cannot open '" + path.string() + "' for writing");
        out_ << header << '\n';
    }

    void row(std::initializer_list<double> values)
    {
        bool first = true;
        for (double v : values) {
            if (!first)
                out_ << ',';
            out_ << format_double(v);
            first = false;
        }
        out_ << '\n';
    }

    void close()
    {
        out_.close();
        if (!out_)
            throw std::runtime_error("failed writing '" + path_.string() + "'");
    }

private:
    fs::path path_;
    std::ofstream out_;
};

void write_text(const fs::path &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << text;
    out.close();
    if (!out)
        throw std::runtime_error("failed writing '" + path.string() + "'");
}

void write_json(const fs::path &path, const json &j) { write_text(path, j.dump(2) + "\n"); }

fs::path prepare_output_dir(const ExperimentConfig &config)
{
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory '" + config.output_dir.string() +
                                 "': " + ec.message());
    return config.output_dir;
}

// Runs f(0..n-1) on a small thread pool. Each index must touch only its own data.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &f)
{
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, n == 0 ? 1 : n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto body = [&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
            try {
                f(i);
            } catch (...) {
                if (!failed.exchange(true))
                    error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w)
        pool.emplace_back(body);
    body();
    for (auto &t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

json fit_to_json(const FitResult &f)
{
    json params = json::array();
    for (const auto &p : f.params)
        params.push_back({{"name", p.name}, {"value", p.value}, {"uncertainty", p.uncertainty}});
    return {{"model", to_string(f.model)},
            {"params", params},
            {"residual", f.residual},
            {"window", {f.window.first, f.window.last}},
            {"degenerate", f.degenerate},
            {"converged", f.converged},
            {"iterations", f.iterations}};
}

struct GapSummary {
    double mean_spacing;
    double largest_gap;
    std::size_t wide_gaps; // gaps wider than two DOS bins
    double gapped_measure; // their total width
};

GapSummary gap_summary(const QuasiEnergySpectrum &s, std::size_t t_f)
{
    const auto n = s.size();
    const double wide = 2.0 * 2.0 * std::numbers::pi / static_cast<double>(t_f);
    GapSummary g{2.0 * std::numbers::pi / static_cast<double>(n), 0.0, 0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
        const double next = k + 1 < n ? s.energies[k + 1] : s.energies[0] + 2.0 * std::numbers::pi;
        const double gap = next - s.energies[k];
        g.largest_gap = std::max(g.largest_gap, gap);
        if (gap > wide) {
            ++g.wide_gaps;
            g.gapped_measure += gap;
        }
    }
    return g;
}

void write_spectrum(const fs::path &dir, const std::string &stem, const QuasiEnergySpectrum &s, std::size_t t_f,
                    RunOutput &out)
{
    const auto spec_path = dir / (stem + ".csv");
    CsvWriter sw(spec_path, "n,re_lambda,im_lambda,epsilon");
    for (std::size_t n = 0; n < s.size(); ++n)
        sw.row({static_cast<double>(n), s.eigenvalues[n].real(), s.eigenvalues[n].imag(), s.energies[n]});
    sw.close();
    out.files.push_back(spec_path);

    const auto d = dos(s, t_f);
    auto dos_name = stem;
    dos_name.replace(0, std::string("spectrum").size(), "dos");
    const auto dos_path = dir / (dos_name + ".csv");
    CsvWriter dw(dos_path, "bin_center,weight");
    for (std::size_t k = 0; k < d.weights.size(); ++k)
        dw.row({d.bin_center(k), d.weights[k]});
    dw.close();
    out.files.push_back(dos_path);
}

void write_gnuplot(const fs::path &dir, const std::string &script, RunOutput &out)
{
    const auto path = dir / "plot.gp";
    write_text(path, "set datafile separator ','\nset key autotitle columnhead\n" + script);
    out.files.push_back(path);
}

std::string kind_name(SequenceKind k) { return std::string(to_string(k)); }

} // namespace

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fnv1a_hex(std::string_view data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string_view to_string(Experiment e)
{
    switch (e) {
    case Experiment::spread: return "spread";
    case Experiment::spectrum: return "spectrum";
    case Experiment::survival: return "survival";
    case Experiment::diffraction: return "diffraction";
    }
    return "unknown";
}

Experiment parse_experiment(std::string_view name)
{
    for (auto e : {Experiment::spread, Experiment::spectrum, Experiment::survival, Experiment::diffraction})
        if (name == to_string(e))
            return e;
    throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

double parse_angle(std::string_view text)
{
    const std::string_view key = "angle";
    auto s = trim(text);
    const auto p = s.find("pi");
    if (p == std::string_view::npos)
        return parse_double(key, s);

    double factor = 1.0;
    auto head = trim(s.substr(0, p));
    if (!head.empty()) {
        if (head == "-") {
            factor = -1.0;
        } else {
            if (head.back() != '*')
                bad_value(key, text, "a number or [k*]pi[/d]");
            factor = parse_double(key, head.substr(0, head.size() - 1));
        }
    }
    auto tail = trim(s.substr(p + 2));
    double divisor = 1.0;
    if (!tail.empty()) {
        if (tail.front() != '/')
            bad_value(key, text, "a number or [k*]pi[/d]");
        divisor = parse_double(key, tail.substr(1));
        if (divisor == 0.0)
            bad_value(key, text, "a non-zero divisor");
    }
    return factor * std::numbers::pi / divisor;
}

void apply_setting(ExperimentConfig &c, std::string_view key, std::string_view raw)
{
    const auto value = trim(raw);
    if (key == "sequence") {
        c.sequence = parse_sequence_kind(value);
    } else if (key == "mode") {
        if (value == "spatial")
            c.mode = CoinMode::spatial;
        else if (value == "temporal")
            c.mode = CoinMode::temporal;
        else if (value == "homogeneous")
            c.mode = CoinMode::homogeneous;
        else
            bad_value(key, value, "spatial, temporal or homogeneous");
    } else if (key == "theta1") {
        c.theta1 = parse_angle(value);
    } else if (key == "theta2") {
        c.theta2 = parse_angle(value);
    } else if (key == "steps") {
        c.steps = parse_integer<std::size_t>(key, value);
    } else if (key == "half_width") {
        if (value == "auto")
            c.half_width.reset();
        else
            c.half_width = parse_integer<int>(key, value);
    } else if (key == "initial_spin") {
        if (value == "up")
            c.initial_spin = InitialSpin::up;
        else if (value == "symmetric")
            c.initial_spin = InitialSpin::symmetric;
        else if (value == "auto")
            c.initial_spin.reset();
        else
            bad_value(key, value, "up, symmetric or auto");
    } else if (key == "seed") {
        c.seed = parse_integer<std::uint64_t>(key, value);
    } else if (key == "output_dir") {
        if (value.empty())
            bad_value(key, value, "a path");
        c.output_dir = std::string(value);
    } else if (key == "t_f") {
        c.t_f = parse_integer<std::size_t>(key, value);
    } else if (key == "boundary") {
        if (value == "periodic")
            c.boundary = Boundary::periodic;
        else if (value == "open-truncated")
            c.boundary = Boundary::open_truncated;
        else
            bad_value(key, value, "periodic or open-truncated");
    } else if (key == "sweep") {
        c.sweep = parse_bool(key, value);
    } else if (key == "sweep_points") {
        c.sweep_points = parse_integer<std::size_t>(key, value);
    } else if (key == "operator_steps") {
        c.operator_steps.clear();
        std::string_view rest = value;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            c.operator_steps.push_back(parse_integer<std::size_t>(key, rest.substr(0, comma)));
            if (comma == std::string_view::npos)
                break;
            rest = rest.substr(comma + 1);
        }
    } else if (key == "fit_first") {
        c.fit_first = parse_integer<std::size_t>(key, value);
    } else if (key == "fit_last") {
        c.fit_last = parse_integer<std::size_t>(key, value);
    } else if (key == "snapshot_every") {
        c.snapshot_every = parse_integer<std::size_t>(key, value);
    } else if (key == "dump_state") {
        c.dump_state = parse_bool(key, value);
    } else if (key == "gnuplot") {
        c.gnuplot = parse_bool(key, value);
    } else {
        throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
    }
}

void ExperimentConfig::validate() const
{
    if (!std::isfinite(theta1) || !std::isfinite(theta2))
        throw std::invalid_argument("coin angles must be finite");
    if (steps < 1)
        throw std::invalid_argument("steps must be >= 1");
    if (half_width && *half_width < 1)
        throw std::invalid_argument("half_width must be >= 1");
    if (t_f < 2)
        throw std::invalid_argument("t_f must be >= 2");
    if (sweep_points < 1)
        throw std::invalid_argument("sweep_points must be >= 1");
    for (auto t : operator_steps)
        if (t < 1)
            throw std::invalid_argument("operator_steps entries must be >= 1");
    if (fit_first && fit_last && *fit_first > *fit_last)
        throw std::invalid_argument("fit_first exceeds fit_last");
}

ExperimentConfig parse_config(std::string_view text)
{
    ExperimentConfig c;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 'key = value'");
        try {
            apply_setting(c, trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const std::invalid_argument &e) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const fs::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

int resolved_half_width(const ExperimentConfig &config, Experiment experiment)
{
    if (config.half_width)
        return *config.half_width;
    if (experiment == Experiment::spectrum || experiment == Experiment::diffraction)
        return 500;
    const auto n = static_cast<int>(config.steps) + 1;
    return n % 2 == 0 ? n : n + 1;
}

InitialSpin resolved_initial_spin(const ExperimentConfig &config, Experiment experiment)
{
    if (config.initial_spin)
        return *config.initial_spin;
    return experiment == Experiment::survival ? InitialSpin::up : InitialSpin::symmetric;
}

std::map<std::string, std::string> config_entries(const ExperimentConfig &c, Experiment experiment)
{
    std::map<std::string, std::string> m;
    m["sequence"] = kind_name(c.sequence);
    m["mode"] = std::string(to_string(c.mode));
    m["theta1"] = format_double(c.theta1);
    m["theta2"] = format_double(c.theta2);
    m["steps"] = std::to_string(c.steps);
    m["half_width"] = std::to_string(resolved_half_width(c, experiment));
    m["initial_spin"] = std::string(to_string(resolved_initial_spin(c, experiment)));
    m["seed"] = std::to_string(c.seed);
    m["output_dir"] = c.output_dir.string();
    m["t_f"] = std::to_string(c.t_f);
    m["boundary"] = std::string(to_string(c.boundary));
    m["sweep"] = c.sweep ? "true" : "false";
    m["sweep_points"] = std::to_string(c.sweep_points);
    std::string ops;
    for (auto t : c.operator_steps.empty() ? std::vector<std::size_t>{c.steps} : c.operator_steps)
        ops += (ops.empty() ? "" : ",") + std::to_string(t);
    m["operator_steps"] = ops;
    m["fit_first"] = c.fit_first ? std::to_string(*c.fit_first) : "auto";
    m["fit_last"] = c.fit_last ? std::to_string(*c.fit_last) : "auto";
    m["snapshot_every"] = std::to_string(c.snapshot_every);
    m["dump_state"] = c.dump_state ? "true" : "false";
    m["gnuplot"] = c.gnuplot ? "true" : "false";
    return m;
}

CoinConfig make_coin_config(SequenceKind kind, CoinMode mode, double theta1, double theta2, int half_width,
                            std::size_t steps, std::uint64_t seed)
{
    CoinConfig cc;
    cc.theta1 = theta1;
    cc.theta2 = theta2;
    cc.mode = mode;
    if (mode == CoinMode::spatial)
        cc.sequence = generate(kind, static_cast<std::size_t>(2 * half_width + 1), seed);
    else if (mode == CoinMode::temporal)
        cc.sequence = generate(kind, steps, seed);
    else
        cc.sequence.kind = kind;
    return cc;
}

RunOutput run_spread(const ExperimentConfig &config)
{
    config.validate();
    const auto dir = prepare_output_dir(config);
    const int N = resolved_half_width(config, Experiment::spread);
    const auto spin = resolved_initial_spin(config, Experiment::spread);
    RunOutput out;

    const auto coin =
        make_coin_config(config.sequence, config.mode, config.theta1, config.theta2, N, config.steps, config.seed);
    const auto initial = initial_state(N, spin);
    RecordOptions rec;
    rec.distributions = config.snapshot_every > 0;
    const auto traj = evolve(coin, N, config.steps, config.boundary, initial, rec);

    const auto final_dist = probability_distribution(traj.final_state);
    {
        const auto path = dir / "distribution.csv";
        CsvWriter w(path, "x,p_x");
        for (int x = -N; x <= N; ++x)
            w.row({static_cast<double>(x), final_dist.at(x)});
        w.close();
        out.files.push_back(path);
    }
    {
        const auto s = spread(traj);
        const auto path = dir / "spread.csv";
        CsvWriter w(path, "t,mean,sigma");
        for (std::size_t t = 0; t < s.t.size(); ++t)
            w.row({static_cast<double>(s.t[t]), s.mean[t], s.sigma[t]});
        w.close();
        out.files.push_back(path);
    }
    if (config.snapshot_every > 0) {
        const auto path = dir / "snapshots.csv";
        CsvWriter w(path, "t,x,p_x");
        json snaps = json::array();
        for (std::size_t t = 0; t < traj.distributions.size(); t += config.snapshot_every) {
            const auto &p = traj.distributions[t];
            for (int x = -N; x <= N; ++x)
                w.row({static_cast<double>(t), static_cast<double>(x), p[static_cast<std::size_t>(x + N)]});
            snaps.push_back({{"t", t}, {"x_min", -N}, {"p", p}});
        }
        w.close();
        out.files.push_back(path);
        const auto jpath = dir / "snapshots.json";
        write_json(jpath, snaps);
        out.files.push_back(jpath);
    }
    if (config.dump_state) {
        const auto path = dir / "state.csv";
        CsvWriter w(path, "x,re_up,im_up,re_down,im_down");
        for (int x = -N; x <= N; ++x) {
            const auto u = traj.final_state.amplitude(Spin::up, x);
            const auto d = traj.final_state.amplitude(Spin::down, x);
            w.row({static_cast<double>(x), u.real(), u.imag(), d.real(), d.imag()});
        }
        w.close();
        out.files.push_back(path);
    }

    if (config.sweep) {
        const auto points = config.sweep_points;
        const std::size_t kinds = std::size(deterministic_kinds);
        std::vector<double> sigma(points * kinds, 0.0);
        parallel_for(points * kinds, [&](std::size_t task) {
            const auto k = task / points;
            const auto j = task % points;
            const double theta2 = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(points);
            const auto cc = make_coin_config(deterministic_kinds[k], config.mode, config.theta1, theta2, N,
                                             config.steps, config.seed);
            const auto tr = evolve(cc, N, config.steps, config.boundary, initial);
            sigma[task] = spread(tr).sigma.back();
        });
        const auto path = dir / "sweep.csv";
        CsvWriter w(path, "theta2,two-periodic,fibonacci,thue-morse,rudin-shapiro");
        for (std::size_t j = 0; j < points; ++j) {
            const double theta2 = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(points);
            w.row({theta2, sigma[j], sigma[points + j], sigma[2 * points + j], sigma[3 * points + j]});
        }
        w.close();
        out.files.push_back(path);
    }

    if (config.gnuplot) {
        std::string script = "set terminal pngcairo size 900,600\n"
                             "set output 'distribution.png'\nplot 'distribution.csv' using 1:2 with lines\n"
                             "set output 'spread.png'\nplot 'spread.csv' using 1:3 with lines\n";
        if (config.sweep)
            script += "set output 'sweep.png'\nplot for [c=2:5] 'sweep.csv' using 1:c with linespoints\n";
        write_gnuplot(dir, script, out);
    }
    return out;
}

RunOutput run_spectrum(const ExperimentConfig &config)
{
    config.validate();
    if (config.boundary != Boundary::periodic)
        throw std::invalid_argument("spectra are computed with periodic boundary only");
    const auto dir = prepare_output_dir(config);
    const int N = resolved_half_width(config, Experiment::spectrum);
    RunOutput out;
    json summary = json::object();

    auto describe = [&](const QuasiEnergySpectrum &s) {
        const auto g = gap_summary(s, config.t_f);
        return json{{"count", s.size()},
                    {"mean_spacing", g.mean_spacing},
                    {"largest_gap", g.largest_gap},
                    {"wide_gaps", g.wide_gaps},
                    {"gapped_measure", g.gapped_measure}};
    };

    if (config.mode == CoinMode::temporal) {
        auto ops = config.operator_steps.empty() ? std::vector<std::size_t>{config.steps} : config.operator_steps;
        const auto longest = *std::max_element(ops.begin(), ops.end());
        const auto coin =
            make_coin_config(config.sequence, config.mode, config.theta1, config.theta2, N, longest, config.seed);
        std::vector<QuasiEnergySpectrum> spectra;
        for (auto t : ops) {
            const auto s = quasi_energies(asymptotic_operator(coin, N, t));
            write_spectrum(dir, "spectrum_t" + std::to_string(t), s, config.t_f, out);
            summary["t" + std::to_string(t)] = describe(s);
            spectra.push_back(s);
        }
        json dist = json::array();
        for (std::size_t i = 1; i < spectra.size(); ++i)
            dist.push_back({{"from", ops[i - 1]},
                            {"to", ops[i]},
                            {"hausdorff", hausdorff_distance(spectra[i - 1].energies, spectra[i].energies)}});
        summary["hausdorff"] = dist;
    } else {
        const auto coin =
            make_coin_config(config.sequence, config.mode, config.theta1, config.theta2, N, config.steps, config.seed);
        const auto s = quasi_energies(assemble_step_operator(coin, N, Boundary::periodic));
        write_spectrum(dir, "spectrum", s, config.t_f, out);
        summary["single_step"] = describe(s);
    }
    summary["dos_bin_width"] = 2.0 * std::numbers::pi / static_cast<double>(config.t_f);
    const auto path = dir / "spectrum_summary.json";
    write_json(path, summary);
    out.files.push_back(path);

    if (config.gnuplot)
        write_gnuplot(dir,
                      "set terminal pngcairo size 900,600\nset output 'spectrum.png'\n"
                      "plot for [f in system('ls spectrum*.csv')] f using 1:4 with points pt 7 ps 0.3\n"
                      "set output 'dos.png'\nplot for [f in system('ls dos*.csv')] f using 1:2 with steps\n",
                      out);
    return out;
}

RunOutput run_survival(const ExperimentConfig &config)
{
    config.validate();
    const auto dir = prepare_output_dir(config);
    const int N = resolved_half_width(config, Experiment::survival);
    const auto spin = resolved_initial_spin(config, Experiment::survival);
    RunOutput out;

    const auto initial = initial_state(N, spin);
    const auto coin =
        make_coin_config(config.sequence, config.mode, config.theta1, config.theta2, N, config.steps, config.seed);
    const auto echo = survival_series(evolve(coin, N, config.steps, config.boundary, initial));
    const auto ces = cesaro_average(echo);
    const auto ft = echo_fourier(echo);

    {
        const auto path = dir / "echo.csv";
        CsvWriter w(path, "t,re_nu,im_nu,abs_nu2");
        for (std::size_t t = 0; t < echo.size(); ++t)
            w.row({static_cast<double>(t), echo.nu[t].real(), echo.nu[t].imag(), echo.echo(t)});
        w.close();
        out.files.push_back(path);
    }
    {
        const auto path = dir / "cesaro.csv";
        CsvWriter w(path, "T,value");
        for (std::size_t T = 1; T <= ces.size(); ++T)
            w.row({static_cast<double>(T), ces.at(T)});
        w.close();
        out.files.push_back(path);
    }
    {
        const auto path = dir / "echo_spectrum.csv";
        CsvWriter w(path, "u,abs_nu_tilde");
        for (std::size_t k = 0; k < ft.u.size(); ++k)
            w.row({ft.u[k], std::abs(ft.amplitude[k])});
        w.close();
        out.files.push_back(path);
    }

    auto window = default_window(ces.size());
    if (config.fit_first)
        window.first = *config.fit_first;
    if (config.fit_last)
        window.last = *config.fit_last;
    const auto sel = model_select(ces.values, window);
    {
        json fits = json::array();
        for (const auto &f : sel.candidates)
            fits.push_back(fit_to_json(f));
        const auto path = dir / "fits.json";
        write_json(path, {{"selected", fit_to_json(sel.best)}, {"candidates", fits}});
        out.files.push_back(path);
    }

    // Vanishing threshold relative to the two-periodic walk with identical parameters.
    const auto ref_coin = make_coin_config(SequenceKind::two_periodic, config.mode, config.theta1, config.theta2, N,
                                           config.steps, config.seed);
    const double ref_tail = tail_mean_abs(survival_series(evolve(ref_coin, N, config.steps, config.boundary, initial)));
    const auto report = spectral_class_report(echo, ces, sel.candidates, reference_tail_factor * ref_tail);
    {
        const auto path = dir / "classification.json";
        write_json(path, {{"sequence", kind_name(config.sequence)},
                          {"mode", to_string(config.mode)},
                          {"tail_mean_abs_nu", report.tail_mean_abs_nu},
                          {"reference_tail_mean_abs_nu", ref_tail},
                          {"vanishing_threshold", report.vanishing_threshold},
                          {"amplitude_vanishes", report.amplitude_vanishes},
                          {"cesaro_vanishes", report.cesaro_vanishes},
                          {"not_absolutely_continuous", !report.amplitude_vanishes},
                          {"not_pure_point", report.cesaro_vanishes},
                          {"singular_continuous", report.singular_continuous},
                          {"decay_fit", fit_to_json(report.decay_fit)},
                          {"evidence", report.evidence}});
        out.files.push_back(path);
    }

    if (config.gnuplot)
        write_gnuplot(dir,
                      "set terminal pngcairo size 900,600\n"
                      "set output 'echo.png'\nplot 'echo.csv' using 1:2 with lines, '' using 1:3 with lines\n"
                      "set output 'cesaro.png'\nset logscale xy\nplot 'cesaro.csv' using 1:2 with lines\n"
                      "unset logscale\nset output 'echo_spectrum.png'\nplot 'echo_spectrum.csv' using 1:2 with lines\n",
                      out);
    return out;
}

RunOutput run_diffraction(const ExperimentConfig &config)
{
    config.validate();
    const auto dir = prepare_output_dir(config);
    const int N = resolved_half_width(config, Experiment::diffraction);
    const auto L = static_cast<std::size_t>(2 * N + 1);
    RunOutput out;

    std::vector<SequenceKind> kinds(std::begin(deterministic_kinds), std::end(deterministic_kinds));
    if (config.sequence == SequenceKind::random)
        kinds.push_back(SequenceKind::random);

    json peaks = json::object();
    for (auto kind : kinds) {
        const auto f = diffraction_spectrum(weight_function(generate(kind, L, config.seed)));
        const auto path = dir / ("diffraction_" + kind_name(kind) + ".csv");
        CsvWriter w(path, "q,re_f,im_f,abs_f2");
        std::vector<double> intensity(f.q.size());
        double mean = 0.0;
        for (std::size_t k = 0; k < f.q.size(); ++k) {
            intensity[k] = std::norm(f.amplitude[k]);
            mean += intensity[k];
            w.row({f.q[k], f.amplitude[k].real(), f.amplitude[k].imag(), intensity[k]});
        }
        w.close();
        out.files.push_back(path);
        mean /= static_cast<double>(intensity.size());

        std::vector<std::size_t> order(intensity.size());
        for (std::size_t k = 0; k < order.size(); ++k)
            order[k] = k;
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return intensity[a] > intensity[b]; });
        json top = json::array();
        for (std::size_t r = 0; r < std::min<std::size_t>(10, order.size()); ++r)
            top.push_back({{"q", f.q[order[r]]}, {"intensity", intensity[order[r]]}});
        peaks[kind_name(kind)] = {{"max_over_mean", intensity[order[0]] / mean}, {"peaks", top}};
    }
    const auto path = dir / "peaks.json";
    write_json(path, peaks);
    out.files.push_back(path);

    if (config.gnuplot)
        write_gnuplot(dir,
                      "set terminal pngcairo size 900,600\nset output 'diffraction.png'\n"
                      "plot for [f in system('ls diffraction_*.csv')] f using 1:4 with impulses\n",
                      out);
    return out;
}

RunOutput run_experiment(Experiment experiment, const ExperimentConfig &config)
{
    RunOutput out;
    switch (experiment) {
    case Experiment::spread: out = run_spread(config); break;
    case Experiment::spectrum: out = run_spectrum(config); break;
    case Experiment::survival: out = run_survival(config); break;
    case Experiment::diffraction: out = run_diffraction(config); break;
    }

    static const std::map<Experiment, std::string> description = {
        {Experiment::spread, "probability distribution, sigma(t) and sigma(theta2) sweep"},
        {Experiment::spectrum, "quasi-energy spectrum and density of states"},
        {Experiment::survival, "survival amplitude, Cesaro average, decay fits and spectral classification"},
        {Experiment::diffraction, "diffraction amplitudes of the coin weight function"},
    };

    const auto entries = config_entries(config, experiment);
    std::string canonical;
    json cfg = json::object();
    for (const auto &[k, v] : entries) {
        if (k == "output_dir")
            continue; // where results land does not change them
        canonical += k + " = " + v + "\n";
        cfg[k] = v;
    }
    json files = json::array();
    for (const auto &f : out.files)
        files.push_back(f.filename().string());
    const auto path = config.output_dir / "manifest.json";
    write_json(path, {{"tool", "qwalk"},
                      {"version", tool_version},
                      {"experiment", to_string(experiment)},
                      {"description", description.at(experiment)},
                      {"config_hash", fnv1a_hex(canonical)},
                      {"config", cfg},
                      {"files", files}});
    out.files.push_back(path);
    return out;
}

} // namespace qwalk
