#include "hlc/snapshot.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include "hlc/errors.hpp"

namespace hlc {

static_assert(std::endian::native == std::endian::little, "PSIWF1 I/O assumes a little-endian host");

namespace {

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <class T>
T get(const std::vector<char>& bytes, std::size_t offset) {
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof value);
  return value;
}

}  // namespace

void write_snapshot(std::ostream& out, const WaveFunction& psi) {
  const Grid& g = psi.grid();
  out.write(kSnapshotMagic, sizeof kSnapshotMagic);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n()));
  put<double>(out, g.box_length());
  for (const cplx& z : psi.values()) {
    put<double>(out, z.real());
    put<double>(out, z.imag());
  }
  if (!out) throw Error("snapshot write failed");
}

void write_snapshot(const std::filesystem::path& path, const WaveFunction& psi) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_snapshot(out, psi);
}

WaveFunction read_snapshot(std::istream& in) {
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < kSnapshotHeaderBytes)
    throw FormatError("truncated header: expected " + std::to_string(kSnapshotHeaderBytes) + " bytes, got " +
                          std::to_string(bytes.size()),
                      bytes.size());
  if (std::memcmp(bytes.data(), kSnapshotMagic, sizeof kSnapshotMagic) != 0)
    throw FormatError("bad magic, not a PSIWF1 file", 0);
  const auto dim = get<std::uint32_t>(bytes, 8);
  const auto n = get<std::uint32_t>(bytes, 12);
  const double L = get<double>(bytes, 16);
  if (dim < 1 || dim > 3) throw FormatError("dim must be 1, 2 or 3, got " + std::to_string(dim), 8);
  if (n < 2) throw FormatError("n must be >= 2, got " + std::to_string(n), 12);
  if (!(std::isfinite(L) && L > 0.0)) throw FormatError("box length must be finite and positive", 16);

  std::size_t points = 1;
  for (std::uint32_t d = 0; d < dim; ++d) points *= n;
  const std::size_t expected = kSnapshotHeaderBytes + 16 * points;
  if (bytes.size() != expected)
    throw FormatError("size mismatch: expected " + std::to_string(expected) + " bytes, got " +
                          std::to_string(bytes.size()),
                      std::min(bytes.size(), expected));

  const Grid grid(static_cast<int>(dim), n, L);
  std::vector<cplx> values(points);
  for (std::size_t i = 0; i < points; ++i) {
    const std::size_t at = kSnapshotHeaderBytes + 16 * i;
    const double re = get<double>(bytes, at);
    const double im = get<double>(bytes, at + 8);
    if (!std::isfinite(re) || !std::isfinite(im)) throw FormatError("non-finite amplitude", at);
    values[i] = {re, im};
  }
  return WaveFunction(grid, std::move(values));
}

WaveFunction read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_snapshot(in);
}

std::filesystem::path sidecar_path(const std::filesystem::path& snapshot) {
  auto p = snapshot;
  p += ".json";
  return p;
}

void write_sidecar(const std::filesystem::path& snapshot, const nlohmann::json& fields) {
  std::ofstream out(sidecar_path(snapshot));
  if (!out) throw Error("cannot write sidecar for " + snapshot.string());
  out << fields.dump(2) << "\n";
}

nlohmann::json read_sidecar(const std::filesystem::path& snapshot) {
  std::ifstream in(sidecar_path(snapshot));
  if (!in) throw Error("missing sidecar for " + snapshot.string());
  return nlohmann::json::parse(in);
}

}  // namespace hlc
