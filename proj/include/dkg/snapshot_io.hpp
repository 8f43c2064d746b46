#pragma once

#include <filesystem>
#include <variant>

#include "dkg/field.hpp"

namespace dkg {

/// Binary snapshot: little-endian header
///   "DKG1" | n:u32 | L:f64 | t:f64 | kind:u8 (0 scalar, 1 spinor)
/// followed by row-major f64 values; spinors are component-major with
/// real/imag interleaved.
enum class SnapshotKind : unsigned char { Scalar = 0, Spinor = 1 };

inline constexpr size_t kSnapshotHeaderBytes = 4 + 4 + 8 + 8 + 1;

void write_snapshot(const std::filesystem::path& path, const ScalarField& f, double t);
void write_snapshot(const std::filesystem::path& path, const SpinorField& f, double t);

struct ScalarSnapshot {
    ScalarField field;
    double t;
};
struct SpinorSnapshot {
    SpinorField field;
    double t;
};

/// Throws DkgError(IoError) on a missing file, bad magic, wrong kind or a
/// truncated payload.
ScalarSnapshot read_scalar_snapshot(const std::filesystem::path& path);
SpinorSnapshot read_spinor_snapshot(const std::filesystem::path& path);

}  // namespace dkg
