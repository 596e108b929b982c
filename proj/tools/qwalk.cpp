#include "qwalk/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

int main(int argc, char **argv)
{
    CLI::App app{"Discrete-time quantum walks with aperiodic coin sequences"};
    app.set_version_flag("--version", std::string(qwalk::tool_version));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;

    for (auto e : {qwalk::Experiment::spread, qwalk::Experiment::spectrum, qwalk::Experiment::survival,
                   qwalk::Experiment::diffraction}) {
        auto *sub = app.add_subcommand(std::string(qwalk::to_string(e)));
        sub->add_option("--config", config_path, "flat key = value config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
        sub->add_option("--override", overrides, "key=value applied after the config file");
        sub->add_option("--seed", seed, "seed for random sequences");
    }

    CLI11_PARSE(app, argc, argv);

    const auto *sub = app.get_subcommands().front();
    try {
        const auto experiment = qwalk::parse_experiment(sub->get_name());
        auto config = qwalk::load_config(config_path);
        for (const auto &kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("override '" + kv + "' is not key=value");
            qwalk::apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (sub->count("--seed"))
            config.seed = seed;
        if (!out_dir.empty())
            config.output_dir = out_dir;
        config.validate();

        const auto result = qwalk::run_experiment(experiment, config);
        for (const auto &f : result.files)
            std::printf("%s\n", f.string().c_str());
    } catch (const std::invalid_argument &e) {
        std::fprintf(stderr, "qwalk: invalid argument: %s\n", e.what());
        return 2;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "qwalk: %s\n", e.what());
        return 1;
    }
    return 0;
}
