#pragma once

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace bconvex {

// Exit codes: 0 success, 1 usage/config error, 2 non-converged, 3 property violation.

/// Solves the config and writes menu.json, u_grid.csv, assignment.csv,
/// v_grid.csv, report.json into out_dir.
int cmd_solve(const std::string& config_path, const std::string& out_dir,
              std::ostream& log = std::cout);

/// Runs one fuzzing harness: which in {b3, loeper, bstar-convexity, lemma2}.
/// Emits a JSON report to `report_out`.
int cmd_check(const std::string& config_path, const std::string& which, int samples,
              std::uint64_t seed, std::ostream& report_out, std::ostream& log = std::cout);

struct ScanArgs {
    std::vector<double> radii;
    int points = 9;
    double audit_tol = 1e-4;
    std::string out_dir; // defaults to the solution dir
};

/// Loads solve artifacts from solution_dir and emits scan.csv plus
/// scan_summary.json. Exit 0 iff worst height defect <= 1e-8 and worst energy
/// margin >= -audit_tol.
int cmd_scan(const std::string& solution_dir, const ScanArgs& args, std::ostream& log = std::cout);

} // namespace bconvex
