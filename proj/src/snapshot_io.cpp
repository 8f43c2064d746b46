#include "dkg/snapshot_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "dkg/error.hpp"

namespace dkg {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

template <class V>
void put(std::ostream& os, V v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(V));
}

template <class V>
V get(std::istream& is, const std::filesystem::path& path) {
    V v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(V))) {
        fail(ErrorCategory::IoError, "truncated snapshot header: " + path.string());
    }
    return v;
}

std::ofstream open_out(const std::filesystem::path& path, const Grid& g, double t, SnapshotKind kind) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorCategory::IoError, "cannot open for writing: " + path.string());
    os.write("DKG1", 4);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(g.n()));
    put<double>(os, g.length());
    put<double>(os, t);
    put<std::uint8_t>(os, static_cast<std::uint8_t>(kind));
    return os;
}

struct Header {
    int n;
    double length;
    double t;
    SnapshotKind kind;
};

Header read_header(std::ifstream& is, const std::filesystem::path& path) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "DKG1", 4) != 0) {
        fail(ErrorCategory::IoError, "bad snapshot magic: " + path.string());
    }
    Header h{};
    h.n = static_cast<int>(get<std::uint32_t>(is, path));
    h.length = get<double>(is, path);
    h.t = get<double>(is, path);
    h.kind = static_cast<SnapshotKind>(get<std::uint8_t>(is, path));
    return h;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorCategory::IoError, "cannot open snapshot: " + path.string());
    return is;
}

void read_doubles(std::ifstream& is, double* dst, size_t count, const std::filesystem::path& path) {
    if (!is.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(count * sizeof(double)))) {
        fail(ErrorCategory::IoError, "truncated snapshot payload: " + path.string());
    }
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const ScalarField& f, double t) {
    auto os = open_out(path, f.grid(), t, SnapshotKind::Scalar);
    os.write(reinterpret_cast<const char*>(f.values().data()),
             static_cast<std::streamsize>(f.values().size() * sizeof(double)));
    if (!os) fail(ErrorCategory::IoError, "write failed: " + path.string());
}

void write_snapshot(const std::filesystem::path& path, const SpinorField& f, double t) {
    auto os = open_out(path, f.grid(), t, SnapshotKind::Spinor);
    // std::complex<double> is layout-compatible with double[2] (re, im).
    os.write(reinterpret_cast<const char*>(f.values().data()),
             static_cast<std::streamsize>(f.values().size() * sizeof(cplx)));
    if (!os) fail(ErrorCategory::IoError, "write failed: " + path.string());
}

ScalarSnapshot read_scalar_snapshot(const std::filesystem::path& path) {
    auto is = open_in(path);
    const Header h = read_header(is, path);
    if (h.kind != SnapshotKind::Scalar) fail(ErrorCategory::IoError, "expected scalar snapshot: " + path.string());
    Grid g(h.n, h.length);
    ScalarField f(g);
    read_doubles(is, f.values().data(), f.values().size(), path);
    return {std::move(f), h.t};
}

SpinorSnapshot read_spinor_snapshot(const std::filesystem::path& path) {
    auto is = open_in(path);
    const Header h = read_header(is, path);
    if (h.kind != SnapshotKind::Spinor) fail(ErrorCategory::IoError, "expected spinor snapshot: " + path.string());
    Grid g(h.n, h.length);
    SpinorField f(g);
    read_doubles(is, reinterpret_cast<double*>(f.values().data()), 2 * f.values().size(), path);
    return {std::move(f), h.t};
}

}  // namespace dkg
