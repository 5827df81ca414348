#pragma once

#include <cstdint>
#include <filesystem>

#include "wkbsplit/wkb_state.hpp"

namespace wkbsplit {

// Binary field dumps: a 64-byte header followed by little-endian float64
// (re, im) pairs in row-major order.  WkbState dumps store phi (im = 0)
// then a.  Round trips are bit-exact.
//
//   offset  size  content
//        0     4  magic "WKBF"
//        4     4  u32 version (= 1)
//        8     4  u32 dim
//       12     4  u32 points per axis
//       16     8  f64 half_length
//       24     4  u32 kind (1 = complex field, 2 = wkb state)
//       28     4  u32 endianness tag (0x01020304 in file byte order)
//       32     8  f64 model time (0 for bare fields)
//       40    24  reserved, zero
struct DumpHeader {
  std::uint32_t version = 0;
  std::uint32_t dim = 0;
  std::uint32_t points = 0;
  double half_length = 0.0;
  std::uint32_t kind = 0;
  double time = 0.0;
  bool swapped = false;  // file was written on an opposite-endian host
};

constexpr std::uint32_t kDumpKindField = 1;
constexpr std::uint32_t kDumpKindState = 2;

void dump_field(const ComplexField& f, const std::filesystem::path& path);
void dump_state(const WkbState& s, const std::filesystem::path& path);

DumpHeader read_dump_header(const std::filesystem::path& path);
ComplexField load_field(const Grid& g, const std::filesystem::path& path);
WkbState load_state(const Grid& g, const std::filesystem::path& path);

}  // namespace wkbsplit
