#include "mimodoa/snapshot_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "mimodoa/errors.hpp"

namespace mimodoa {
namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
    std::array<unsigned char, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const char* what) {
    std::array<unsigned char, sizeof(T)> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
        throw IoError(std::string("snapshot file truncated while reading ") + what);
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

}  // namespace

void write_snapshots(std::ostream& out, const SnapshotSet& snapshots) {
    const auto& g = snapshots.geometry;
    out.write(kSnapshotMagic, sizeof(kSnapshotMagic));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.n_tx));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.n_rx));
    put_le<std::uint64_t>(out, snapshots.samples.size());
    put_le<double>(out, g.d_over_lambda);
    put_le<double>(out, g.phi_trx_deg);
    for (const auto& x : snapshots.samples) {
        if (x.size() != g.virtual_size())
            throw DimensionMismatch("snapshot length does not match the geometry");
        for (const auto& z : x) {
            put_le<double>(out, z.real());
            put_le<double>(out, z.imag());
        }
    }
    if (!out) throw IoError("failed writing snapshot stream");
}

void write_snapshots(const std::string& path, const SnapshotSet& snapshots) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_snapshots(out, snapshots);
}

SnapshotSet read_snapshots(std::istream& in) {
    char magic[sizeof(kSnapshotMagic)];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kSnapshotMagic, sizeof(magic)) != 0)
        throw IoError("not a snapshot file (bad magic)");

    SnapshotSet s;
    s.geometry.n_tx = get_le<std::uint32_t>(in, "n_tx");
    s.geometry.n_rx = get_le<std::uint32_t>(in, "n_rx");
    const auto m = get_le<std::uint64_t>(in, "M");
    s.geometry.d_over_lambda = get_le<double>(in, "d_over_lambda");
    s.geometry.phi_trx_deg = get_le<double>(in, "phi_trx_deg");
    try {
        s.geometry.validate();
    } catch (const ValidationError& e) {
        throw IoError(std::string("snapshot header invalid: ") + e.what());
    }
    if (m == 0 || m > (std::uint64_t{1} << 32)) throw IoError("snapshot header has implausible M");

    const std::size_t n = s.geometry.virtual_size();
    s.samples.reserve(static_cast<std::size_t>(m));
    for (std::uint64_t k = 0; k < m; ++k) {
        ComplexVector x(n);
        for (auto& z : x) {
            const double re = get_le<double>(in, "samples");
            const double im = get_le<double>(in, "samples");
            z = {re, im};
        }
        s.samples.push_back(std::move(x));
    }
    if (in.peek() != std::char_traits<char>::eof()) throw IoError("trailing bytes after snapshot data");
    return s;
}

SnapshotSet read_snapshots(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return read_snapshots(in);
}

}  // namespace mimodoa
