#pragma once

#include <filesystem>
#include <iosfwd>

#include <nlohmann/json.hpp>

#include "hlc/grid.hpp"

namespace hlc {

// PSIWF1 layout, little-endian:
//   8 bytes  magic "PSIWF1\0\0"
//   u32      dim
//   u32      n (points per axis)
//   f64      L (box length)
//   n^dim    (re, im) f64 pairs in row-major order

inline constexpr char kSnapshotMagic[8] = {'P', 'S', 'I', 'W', 'F', '1', '\0', '\0'};
inline constexpr std::size_t kSnapshotHeaderBytes = 8 + 4 + 4 + 8;

void write_snapshot(std::ostream& out, const WaveFunction& psi);
void write_snapshot(const std::filesystem::path& path, const WaveFunction& psi);

/// Validates magic, header sizes, payload length and finiteness; throws
/// FormatError carrying the offending byte offset.
WaveFunction read_snapshot(std::istream& in);
WaveFunction read_snapshot(const std::filesystem::path& path);

/// <snapshot>.json next to the binary: config hash, time, build version.
void write_sidecar(const std::filesystem::path& snapshot, const nlohmann::json& fields);
nlohmann::json read_sidecar(const std::filesystem::path& snapshot);
std::filesystem::path sidecar_path(const std::filesystem::path& snapshot);

}  // namespace hlc
