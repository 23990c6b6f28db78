#pragma once

#include <filesystem>
#include <iosfwd>

#include "etsc/conversion.hpp"
#include "etsc/toeplitz.hpp"

namespace etsc {

// Kernel and modes files come in two interchangeable forms:
//
//   JSON   {"format":"etsc-kernel","version":1,"n":...,
//           "extension":{"kind":"zeros"|"decay","gamma":...},"coeffs":[...]}
//          {"format":"etsc-modes","version":1,"h":...,"gamma":...,
//           "origin_length":...,"lambda":[[re,im],...],"b":[[re,im],...]}
//
//   binary magic "ETSC", u32 LE version=1, u8 kind (0 kernel / 1 modes),
//          kernel: u32 n, n f64 coeffs
//          modes:  u32 h, f64 gamma, u32 origin_length, h*(re,im) f64 lambda,
//                  h*(re,im) f64 b
//          (all little-endian)
//
// The binary kernel form carries coefficients only, so only zeros-extension
// kernels may be written to it; loading one yields the zeros policy.
//
// save_* pick the form from the extension (".json" vs anything else =
// binary); load_* sniff the magic bytes, so either form loads regardless of
// its name. Malformed input raises parse_error with a byte offset (binary)
// or JSON path (text).

void save_kernel(const std::filesystem::path& path, const ToeplitzKernel& k);
void save_modes(const std::filesystem::path& path, const SsmModes& m);

ToeplitzKernel load_kernel(const std::filesystem::path& path);
SsmModes load_modes(const std::filesystem::path& path);

// Stream-level primitives (used by the file functions and the tests).
void write_kernel_json(std::ostream& os, const ToeplitzKernel& k);
void write_kernel_binary(std::ostream& os, const ToeplitzKernel& k);
void write_modes_json(std::ostream& os, const SsmModes& m);
void write_modes_binary(std::ostream& os, const SsmModes& m);

ToeplitzKernel read_kernel(std::istream& is);
SsmModes read_modes(std::istream& is);

}  // namespace etsc
