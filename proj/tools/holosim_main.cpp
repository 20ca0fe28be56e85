// holosim: holonomic Hadamard gate under stochastic squeezing-control noise.
//
// Subcommands:
//   gate-check   verify the loop geometry and the composed holonomy
//   analytic     closed-form averaged density matrix, purity and fidelity
//   mc-run       Monte Carlo ensemble at one parameter point
//   sweep        parameter sweep with CSV/JSON output (--sweep VAR:START:STOP:COUNT)
//   ou-selftest  statistical checks of the noise sampler
//
// Exit codes: 0 success/pass, 1 check failed, 2 usage or configuration error.

#include <exception>
#include <iostream>

#include "CLI11.hpp"

#include "holosim/cli.hpp"

namespace {

void add_config_options(CLI::App& app, holosim::cli::RunConfig& cfg) {
    app.add_option("--lx", cfg.lx, "x-plane loop side length (> pi/4)");
    app.add_option("--ly", cfg.ly, "y-plane loop side length (> 0)");
    app.add_option("--sigma_x,--sigma-x", cfg.sigma_x, "x-noise variance");
    app.add_option("--gamma_x,--gamma-x", cfg.gamma_x, "x-noise bandwidth");
    app.add_option("--sigma_y,--sigma-y", cfg.sigma_y, "y-noise variance");
    app.add_option("--gamma_y,--gamma-y", cfg.gamma_y, "y-noise bandwidth");
    app.add_option("--phi", cfg.phi, "initial state angle phi");
    app.add_option("--xi", cfg.xi, "phase angle of c0");
    app.add_option("--chi", cfg.chi, "phase angle of c1");
    app.add_option("--c0_re", cfg.c0_re, "Re c0 (amplitude form)");
    app.add_option("--c0_im", cfg.c0_im, "Im c0 (amplitude form)");
    app.add_option("--c1_re", cfg.c1_re, "Re c1 (amplitude form)");
    app.add_option("--c1_im", cfg.c1_im, "Im c1 (amplitude form)");
    app.add_option("--trajectories", cfg.trajectories, "Monte Carlo trajectory count");
    app.add_option("--grid_steps,--grid-steps", cfg.grid_steps, "noise grid steps per loop side");
    app.add_option("--seed", cfg.seed, "master seed");
    app.add_option("--workers", cfg.workers, "worker threads (0 = all cores)");
    app.add_option("--output_path,--out", cfg.output_path, "output file (default stdout)");
    app.add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
    holosim::cli::RunConfig cfg;
    std::string sweep_text;

    CLI::App app{"simulator for a holonomic Hadamard gate with squeezing control noise"};
    app.require_subcommand(1);
    app.set_config("--config")->description("flat key=value configuration file");
    app.allow_config_extras(false);
    add_config_options(app, cfg);

    CLI::App* gate_check = app.add_subcommand("gate-check", "verify loops and composed gate");
    CLI::App* analytic = app.add_subcommand("analytic", "closed-form purity and fidelity");
    CLI::App* mc_run = app.add_subcommand("mc-run", "Monte Carlo ensemble at one point");
    CLI::App* sweep = app.add_subcommand("sweep", "sweep one variable, emit CSV/JSON rows");
    sweep->add_option("--sweep", sweep_text, "VAR:START:STOP:COUNT")->required();
    CLI::App* selftest = app.add_subcommand("ou-selftest", "noise sampler statistics");
    for (CLI::App* sub : {gate_check, analytic, mc_run, sweep, selftest}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*gate_check) return holosim::cli::cmd_gate_check(cfg, std::cout);
        if (*analytic) return holosim::cli::cmd_analytic(cfg, std::cout);
        if (*mc_run) return holosim::cli::cmd_mc_run(cfg, std::cout);
        if (*sweep)
            return holosim::cli::cmd_sweep(cfg, holosim::cli::parse_sweep(sweep_text), std::cerr);
        if (*selftest) return holosim::cli::cmd_ou_selftest(cfg, std::cout);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
