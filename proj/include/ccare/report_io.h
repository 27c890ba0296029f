#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ccare/iteration.h"

namespace ccare {

/// Header `sweep,delta,residual,mode,eig_min,eig_max,closed_loop_abscissa,
/// monotone_up,monotone_down`; one row per (sweep, mode), modes one-based.
std::string trace_csv(const SolveReport& rep);

/// Plain-text summary: converged flag, iterations, shifts, final residual and
/// the solution matrices at 8 decimal places.
std::string report_text(const SolveReport& rep);

/// Header `sweep,mode,relation`.
std::string ordering_csv(const CompareResult& cmp);

/// Header `rho,variant,iterations,residual,converged`.
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Writes through a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);

}  // namespace ccare
