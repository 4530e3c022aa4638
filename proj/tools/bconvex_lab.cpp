// bconvex-lab: solve nonlinear-pricing problems over b-convex menus, fuzz the
// generalized-convexity conditions, and scan solved utilities for C^{1,1}
// diagnostics.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bconvex/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for principal-agent pricing over b-convex utilities"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", which = "b3", solution_dir;
    int samples = 1000, points = 9;
    std::uint64_t seed = 1;
    std::vector<double> radii;
    double audit_tol = 1e-4;
    std::string scan_out;

    auto* solve = app.add_subcommand("solve", "minimize the principal's loss");
    solve->add_option("config", config_path, "problem config (JSON)")->required();
    solve->add_option("-o,--out", out_dir, "output directory");

    auto* check = app.add_subcommand("check", "fuzz a generalized-convexity condition");
    check->add_option("config", config_path, "problem config (JSON)")->required();
    check->add_option("--which", which, "b3 | loeper | bstar-convexity | lemma2")->required();
    check->add_option("--samples", samples, "sample count");
    check->add_option("--seed", seed, "rng seed");

    auto* scan = app.add_subcommand("scan", "regularity scan of solve artifacts");
    scan->add_option("dir", solution_dir, "directory with solve artifacts")->required();
    scan->add_option("--radii", radii, "probe radii")->delimiter(',');
    scan->add_option("--points", points, "probe points per axis");
    scan->add_option("--audit-tol", audit_tol, "energy-margin tolerance");
    scan->add_option("-o,--out", scan_out, "scan output directory (defaults to dir)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 1 : 0;
    }

    if (solve->parsed()) return bconvex::cmd_solve(config_path, out_dir, std::cerr);
    if (check->parsed()) return bconvex::cmd_check(config_path, which, samples, seed, std::cout, std::cerr);
    if (scan->parsed()) {
        bconvex::ScanArgs args;
        args.radii = radii;
        args.points = points;
        args.audit_tol = audit_tol;
        args.out_dir = scan_out;
        return bconvex::cmd_scan(solution_dir, args, std::cerr);
    }
    return 1;
}
