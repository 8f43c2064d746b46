#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>

#include "dkg/config.hpp"
#include "dkg/error.hpp"
#include "dkg/solver.hpp"

namespace dkg {

/// Trajectory directory:
///   config.txt        the full configuration of the run
///   diagnostics.csv   one row per snapshot (kDiagnosticsHeader)
///   boundary.csv      t, seam-band mass fraction of psi and phi
///   validation.json   the accepted validation report, warnings included
///   snapshots/step_<k>_{psi,phi,phit}.dkg
std::filesystem::path snapshot_path(const std::filesystem::path& dir, long step, const char* field);

/// Reads a trajectory written by cmd_run, states included.
/// Throws DkgError(IoError) on missing or inconsistent files.
Trajectory load_trajectory(const std::filesystem::path& dir, RunConfig* cfg_out = nullptr);

int cmd_run(const RunConfig& cfg, std::ostream& out);
int cmd_normalform_check(const RunConfig& cfg, std::ostream& out);
/// Output goes to <output_dir>/scatter; cfg normally comes from the trajectory's config.txt.
int cmd_scatter(const RunConfig& cfg, const std::filesystem::path& trajectory_dir, std::ostream& out);
int cmd_resonance_sweep(const RunConfig& cfg, std::ostream& out);
int cmd_selftest(std::uint64_t seed, std::ostream& out);

/// 2 ConfigError, 3 ResonantMass, 4 TailNotConverged, 5 BlowupDetected, 6 IoError.
int exit_code(ErrorCategory c);

/// Runs `body`, turning DkgError into `<Category>: message` on `err` plus the
/// category's exit code, and any other exception into exit code 1.
int guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace dkg
