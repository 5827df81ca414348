#include "wkbsplit/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "wkbsplit/errors.hpp"

namespace wkbsplit {

namespace {

constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kEndianTag = 0x01020304u;
constexpr std::size_t kHeaderBytes = 64;

std::uint32_t bswap32(std::uint32_t v) {
  return ((v & 0xff) << 24) | ((v & 0xff00) << 8) | ((v >> 8) & 0xff00) |
         (v >> 24);
}

double bswap_f64(double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  u = ((u & 0x00000000000000ffull) << 56) | ((u & 0x000000000000ff00ull) << 40) |
      ((u & 0x0000000000ff0000ull) << 24) | ((u & 0x00000000ff000000ull) << 8) |
      ((u & 0x000000ff00000000ull) >> 8) | ((u & 0x0000ff0000000000ull) >> 24) |
      ((u & 0x00ff000000000000ull) >> 40) | ((u & 0xff00000000000000ull) >> 56);
  double out;
  std::memcpy(&out, &u, 8);
  return out;
}

void write_header(std::ofstream& out, const Grid& g, std::uint32_t kind,
                  double time) {
  char header[kHeaderBytes] = {};
  std::memcpy(header, "WKBF", 4);
  const std::uint32_t version = kVersion;
  const std::uint32_t dim = static_cast<std::uint32_t>(g.dim());
  const std::uint32_t pts = static_cast<std::uint32_t>(g.points_per_axis());
  const double half = g.half_length();
  const std::uint32_t endian = kEndianTag;
  std::memcpy(header + 4, &version, 4);
  std::memcpy(header + 8, &dim, 4);
  std::memcpy(header + 12, &pts, 4);
  std::memcpy(header + 16, &half, 8);
  std::memcpy(header + 24, &kind, 4);
  std::memcpy(header + 28, &endian, 4);
  std::memcpy(header + 32, &time, 8);
  out.write(header, kHeaderBytes);
}

void write_pairs(std::ofstream& out, std::span<const Complex> values) {
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(Complex)));
}

void write_real_pairs(std::ofstream& out, std::span<const double> values) {
  std::vector<Complex> pairs(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    pairs[i] = Complex(values[i], 0.0);
  write_pairs(out, pairs);
}

std::vector<Complex> read_pairs(std::ifstream& in, std::size_t count,
                                bool swapped, const char* what) {
  std::vector<Complex> out(count);
  in.read(reinterpret_cast<char*>(out.data()),
          static_cast<std::streamsize>(count * sizeof(Complex)));
  if (!in)
    throw IoError(std::string(what) + ": payload truncated");
  if (swapped) {
    for (Complex& v : out)
      v = Complex(bswap_f64(v.real()), bswap_f64(v.imag()));
  }
  return out;
}

DumpHeader parse_header(std::ifstream& in, const std::string& name) {
  char header[kHeaderBytes];
  in.read(header, kHeaderBytes);
  if (!in) throw IoError(name + ": file too short for header");
  if (std::memcmp(header, "WKBF", 4) != 0)
    throw IoError(name + ": bad magic (not a field dump)");

  DumpHeader h;
  std::uint32_t endian;
  std::memcpy(&h.version, header + 4, 4);
  std::memcpy(&h.dim, header + 8, 4);
  std::memcpy(&h.points, header + 12, 4);
  std::memcpy(&h.half_length, header + 16, 8);
  std::memcpy(&h.kind, header + 24, 4);
  std::memcpy(&endian, header + 28, 4);
  std::memcpy(&h.time, header + 32, 8);

  if (endian == kEndianTag) {
    h.swapped = false;
  } else if (bswap32(endian) == kEndianTag) {
    h.swapped = true;
    h.version = bswap32(h.version);
    h.dim = bswap32(h.dim);
    h.points = bswap32(h.points);
    h.kind = bswap32(h.kind);
    h.half_length = bswap_f64(h.half_length);
    h.time = bswap_f64(h.time);
  } else {
    throw IoError(name + ": unrecognizable endianness tag");
  }
  if (h.version != kVersion)
    throw IoError(name + ": unsupported version " + std::to_string(h.version));
  return h;
}

void check_grid(const DumpHeader& h, const Grid& g, const std::string& name) {
  if (h.dim != static_cast<std::uint32_t>(g.dim()) ||
      h.points != static_cast<std::uint32_t>(g.points_per_axis()) ||
      h.half_length != g.half_length())
    throw IoError(name + ": dump grid (dim " + std::to_string(h.dim) + ", n " +
                  std::to_string(h.points) + ") does not match target grid");
}

}  // namespace

void dump_field(const ComplexField& f, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("dump_field: cannot open " + path.string());
  write_header(out, f.grid(), kDumpKindField, 0.0);
  write_pairs(out, f.values());
  if (!out) throw IoError("dump_field: write failed for " + path.string());
}

void dump_state(const WkbState& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("dump_state: cannot open " + path.string());
  write_header(out, s.amplitude.grid(), kDumpKindState, s.time);
  write_real_pairs(out, s.phase.values());
  write_pairs(out, s.amplitude.values());
  if (!out) throw IoError("dump_state: write failed for " + path.string());
}

DumpHeader read_dump_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_dump_header: cannot open " + path.string());
  return parse_header(in, path.string());
}

ComplexField load_field(const Grid& g, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_field: cannot open " + path.string());
  const DumpHeader h = parse_header(in, path.string());
  if (h.kind != kDumpKindField)
    throw IoError("load_field: dump holds kind " + std::to_string(h.kind) +
                  ", not a complex field");
  check_grid(h, g, "load_field");
  return ComplexField::from_values(
      g, read_pairs(in, g.size(), h.swapped, "load_field"));
}

WkbState load_state(const Grid& g, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_state: cannot open " + path.string());
  const DumpHeader h = parse_header(in, path.string());
  if (h.kind != kDumpKindState)
    throw IoError("load_state: dump holds kind " + std::to_string(h.kind) +
                  ", not a WKB state");
  check_grid(h, g, "load_state");
  auto phase_pairs = read_pairs(in, g.size(), h.swapped, "load_state");
  auto amp = read_pairs(in, g.size(), h.swapped, "load_state");
  std::vector<double> phase(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) phase[i] = phase_pairs[i].real();
  return WkbState(RealField(g, std::move(phase)),
                  ComplexField::from_values(g, std::move(amp)), h.time);
}

}  // namespace wkbsplit
