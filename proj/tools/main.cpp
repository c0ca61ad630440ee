#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vmcyl/runner.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Confined steady states of a collisionless plasma in a cylinder"};
    std::string config_path, mode_str = "solve", out_dir;
    long long grid_n = -1, seed = -1, threads = -1;
    app.add_option("--config", config_path, "run configuration file")->required();
    app.add_option("--mode", mode_str, "solve|verify|confine|extend|sweep");
    app.add_option("--out", out_dir, "output directory override");
    app.add_option("--grid", grid_n, "grid size override");
    app.add_option("--seed", seed, "seed override");
    app.add_option("--threads", threads, "worker thread override");
    CLI11_PARSE(app, argc, argv);

    vmcyl::RunConfig cfg;
    vmcyl::RunMode mode;
    try {
        cfg = vmcyl::RunConfig::parse_file(config_path);
        mode = vmcyl::parse_run_mode(mode_str);
        if (!out_dir.empty())
            cfg.out_dir = out_dir;
        if (grid_n > 0)
            cfg.grid_n = std::size_t(grid_n);
        if (seed >= 0) {
            cfg.seed = std::uint64_t(seed);
            cfg.verify.seed = cfg.seed;
        }
        if (threads > 0) {
            cfg.threads = int(threads);
            cfg.solve.threads = int(threads);
            cfg.verify.threads = int(threads);
        }
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return vmcyl::exit_config_error;
    }

    try {
        return vmcyl::run(cfg, mode);
    } catch (const vmcyl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return vmcyl::exit_config_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return vmcyl::exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return vmcyl::exit_numerical_failure;
    }
}
