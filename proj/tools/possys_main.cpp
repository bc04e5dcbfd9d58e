// Command-line front end: analyze | trajectory | verify | hourglass.
// Reports go to stdout as JSON documents, diagnostics to stderr.
// Exit codes: 0 success, 2 parse/validation/usage, 3 budget exceeded,
// 4 no dominant matrix.

#include "possys/system_io.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"possys: constructive stability and stabilizability analysis of positive "
                 "linear switching systems built from series-parallel block compositions"};
    app.require_subcommand(1);

    std::string path;

    possys::AnalyzeArgs analyze_args;
    CLI::App* analyze = app.add_subcommand("analyze", "Spectral extrema, stability verdicts and H-set status");
    analyze->add_option("file", path, "system description file")->required();
    analyze->add_option("--oracle-depth", analyze_args.oracle_depth,
                        "attach brute-force product bounds at this depth");
    analyze->add_option("--norm", analyze_args.norm, "norm for product bounds: one|inf|frobenius");
    analyze->add_option("--samples", analyze_args.samples, "hourglass samples for non-family sets");
    analyze->add_option("--seed", analyze_args.seed, "sampling seed");
    analyze->add_option("--limit", analyze_args.limit, "member enumeration limit");
    analyze->add_option("--budget", analyze_args.budget, "product enumeration budget");
    analyze->add_flag("--greedy", analyze_args.greedy, "cross-check extrema with greedy row selection");
    analyze->add_option("--include-witness", analyze_args.forced_witnesses,
                        "extra hourglass probe vector, e.g. \"1,1\" (repeatable)");

    possys::TrajectoryArgs trajectory_args;
    CLI::App* trajectory = app.add_subcommand("trajectory", "Greedy extremal switching trajectory");
    trajectory->add_option("file", path, "system description file")->required();
    trajectory->add_option("--x0", trajectory_args.x0, "start vector, e.g. \"1,2\"")->required();
    trajectory->add_option("--steps", trajectory_args.steps, "number of switching steps")->required();
    trajectory->add_option("--direction", trajectory_args.direction, "max|min (min attaches stabilization info)");
    trajectory->add_option("--nu", trajectory_args.nu, "objectives to trace, comma-separated l1|l2|linf");
    trajectory->add_option("--seed", trajectory_args.seed, "seed recorded in the report");
    trajectory->add_option("--limit", trajectory_args.limit, "member enumeration limit");
    trajectory->add_flag("--renormalize", trajectory_args.renormalize,
                         "rescale states to unit 1-norm between steps");

    possys::VerifyArgs verify_args;
    CLI::App* verify = app.add_subcommand("verify", "Brute-force cross-checks of the constructive claims");
    verify->add_option("file", path, "system description file")->required();
    verify->add_option("--max-depth", verify_args.max_depth, "check product bounds at depths 1..d");
    verify->add_option("--trials", verify_args.trials, "greedy-vs-exhaustive trajectory trials");
    verify->add_option("--seed", verify_args.seed, "sampling seed");
    verify->add_option("--norm", verify_args.norm, "norm for product bounds: one|inf|frobenius");
    verify->add_option("--budget", verify_args.budget, "product enumeration budget");
    verify->add_option("--limit", verify_args.limit, "member enumeration limit");
    verify->add_option("--samples", verify_args.samples, "hourglass samples for the H-status");

    possys::HourglassArgs hourglass_args;
    CLI::App* hourglass = app.add_subcommand("hourglass", "Sampled check of the hourglass alternative");
    hourglass->add_option("file", path, "system description file")->required();
    hourglass->add_option("--samples", hourglass_args.samples, "number of random probes");
    hourglass->add_option("--seed", hourglass_args.seed, "sampling seed");
    hourglass->add_option("--limit", hourglass_args.limit, "member enumeration limit");
    hourglass->add_option("--include-witness", hourglass_args.include_witness,
                          "probe vector tested before the random samples (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (analyze->parsed()) return possys::cmd_analyze(path, analyze_args, std::cout, std::cerr);
    if (trajectory->parsed()) return possys::cmd_trajectory(path, trajectory_args, std::cout, std::cerr);
    if (verify->parsed()) return possys::cmd_verify(path, verify_args, std::cout, std::cerr);
    if (hourglass->parsed()) return possys::cmd_hourglass(path, hourglass_args, std::cout, std::cerr);
    return 2;
}
