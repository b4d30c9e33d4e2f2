#include "hartree/commands.hpp"
#include "hartree/config.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <exception>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"spectral mean-field Schrodinger simulator and verification harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int (*command)(const hartree::SimulationConfig&) = nullptr;

    auto add = [&](const char* name, const char* desc,
                   int (*fn)(const hartree::SimulationConfig&)) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
        sub->callback([&command, fn] { command = fn; });
    };
    add("run", "propagate the coupled mean-field system", hartree::cmd_run);
    add("picard", "fixed-point iteration with contraction report", hartree::cmd_picard);
    add("compare", "mean-field evolution against the full 2D reference", hartree::cmd_compare);
    add("check-assumptions", "verify the potential hypotheses on the grid", hartree::cmd_check);
    add("ground-state", "imaginary-time ground state of each factor", hartree::cmd_ground_state);

    CLI11_PARSE(app, argc, argv);

    try {
        hartree::SimulationConfig cfg = hartree::load_config(config_path);
        if (!out_dir.empty()) hartree::set_output_dir(cfg, out_dir);
        return command(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
