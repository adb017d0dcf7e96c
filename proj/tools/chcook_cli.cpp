// chcook — batch driver for the spectral Cahn-Hilliard-Cook laboratory.
//
// One subcommand per experiment; each takes a flat key=value config file and
// writes <experiment>.csv, <experiment>.summary.json and run.meta.json into
// the output directory. Reruns with the same config and seed reproduce the
// CSV bodies byte for byte, for any --threads value.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "chcook/config.hpp"
#include "chcook/runner.hpp"

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read config file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral laboratory for the conservative stochastic Cahn-Hilliard equation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "./out";
    std::int64_t seed_override = -1;
    unsigned threads_override = 0;

    for (const auto& name : chcook::experiment_names()) {
        CLI::App* sub = app.add_subcommand(name, "run the '" + name + "' experiment");
        sub->add_option("--config", config_path, "key=value config file")->required();
        sub->add_option("--out", out_dir, "output directory (default ./out)");
        sub->add_option("--seed", seed_override, "override the config seed");
        sub->add_option("--threads", threads_override,
                        "worker count (must not affect results)");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string subcommand = app.get_subcommands().front()->get_name();
        chcook::RunConfig cfg = chcook::parse_config(read_file(config_path));
        if (cfg.experiment != subcommand)
            throw chcook::ConfigError("config sets experiment='" + cfg.experiment +
                                      "' but the subcommand is '" + subcommand + "'");
        if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
        if (threads_override > 0) cfg.threads = threads_override;
        return chcook::run_experiment(cfg, out_dir);
    } catch (const chcook::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
