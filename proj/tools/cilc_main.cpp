#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "cilc/harness.hpp"

namespace {

void add_common_flags(CLI::App* cmd, cilc::HarnessOptions& opts) {
    cmd->add_option("--config", opts.config_file, "Scenario config file (JSON)");
    cmd->add_option("--seed", opts.seed, "Seed for all randomized sampling");
    cmd->add_option("--out", opts.out_dir, "Output directory");
    cmd->add_option("--trials", opts.trials, "Number of trials to run");
    cmd->add_flag("--hold", opts.hold,
                  "Only update inputs when some agent can improve");
    cmd->add_flag("--distributed", opts.distributed,
                  "Run the election over the network topology");
    cmd->add_option("--topology", opts.topology_file,
                    "Topology edge-list file");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collective iterative learning control toolkit"};
    app.require_subcommand(1);

    cilc::HarnessOptions opts;
    CLI::App* appendix_a = app.add_subcommand(
        "appendix-a", "Two-agent reference example: loci, norms, certificates");
    CLI::App* twipr = app.add_subcommand(
        "twipr", "Inverted-pendulum study: isolated agents and collectives");
    CLI::App* certify =
        app.add_subcommand("certify", "Convergence certificates for a scenario");
    CLI::App* perf_eval = app.add_subcommand(
        "perf-eval", "Well-performing scores and verdict for a scenario");
    CLI::App* consensus = app.add_subcommand(
        "consensus", "Distributed election trace and equivalence check");
    for (CLI::App* cmd : {appendix_a, twipr, certify, perf_eval, consensus})
        add_common_flags(cmd, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (appendix_a->parsed()) return cilc::cmd_appendix_a(opts, std::cout);
        if (twipr->parsed()) return cilc::cmd_twipr(opts, std::cout);
        if (certify->parsed()) return cilc::cmd_certify(opts, std::cout);
        if (perf_eval->parsed()) return cilc::cmd_perf_eval(opts, std::cout);
        if (consensus->parsed()) return cilc::cmd_consensus(opts, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
