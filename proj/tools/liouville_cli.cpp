// Command-line front end: thin argument parsing over run_command.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <liouville/runner.hpp>

int main(int argc, char** argv) {
    CLI::App app{
        "liouville: triviality criteria, certified counterexample solutions, and "
        "mass-doubling simulations for radial absorption inequalities"};
    app.require_subcommand(1);

    liouville::RunConfig cfg;

    const struct {
        const char* name;
        const char* help;
    } commands[] = {
        {"criterion", "classify whether the forcing data admits only the trivial solution"},
        {"counterexample", "construct and certify a nontrivial decaying solution"},
        {"verify", "re-check a constructed solution against the weak inequality"},
        {"proofsim", "simulate the mass-doubling machinery on concrete data"},
        {"lemma34", "randomized minimum-envelope inequality harness"},
    };
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--spec", cfg.spec_path, "JSON input file");
        sub->add_option("--out", cfg.out_dir, "output directory (default: out)");
        sub->add_option("--preset", cfg.preset,
                        "named example, optionally with arguments: name:key=value,...");
        sub->add_option("--seed", cfg.seed, "random seed for randomized harnesses");
        sub->add_option("--tol", cfg.tol, "tolerance override (command-specific)");
        sub->add_option("--grid", cfg.grid_count, "grid node count override");
    }

    CLI11_PARSE(app, argc, argv);
    cfg.command = app.get_subcommands().front()->get_name();
    return liouville::run_command(cfg, std::cout, std::cerr);
}
