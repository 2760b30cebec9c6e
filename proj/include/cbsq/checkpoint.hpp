#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cbsq/solver.hpp"

namespace cbsq::checkpoint {

/// Binary little-endian layout:
///   "CBSQ1" (5 bytes), version u8 = 1,
///   u32 kmax, u32 jmax, f64 ly, f64 t, f64 nu, f64 mu, u8 sigma, f64 b,
///   omega coefficients then theta coefficients as f64 (re, im) pairs in
///   row-major k-then-eta order.
inline constexpr std::uint8_t version = 1;

std::vector<std::uint8_t> encode(const SimState& state);

/// Decodes a checkpoint. params supplies the fields the file does not carry
/// (beta, alpha, delta); nu, mu, sigma, b are taken from the file.
/// Error(io) on bad magic, version mismatch or truncation.
SimState decode(std::span<const std::uint8_t> bytes, const PhysicsParams& params = {});

void write(const std::filesystem::path& path, const SimState& state);
SimState read(const std::filesystem::path& path, const PhysicsParams& params = {});

/// Git-style SHA-1 of the encoded state.
std::string state_hash(const SimState& state);

}  // namespace cbsq::checkpoint
