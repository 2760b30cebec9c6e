#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cbsq::io {

/// SHA-1 of "blob <size>\0" + bytes, as lowercase hex (what `git hash-object` prints).
std::string git_blob_hash(std::span<const std::uint8_t> bytes);
std::string git_blob_hash(std::string_view text);

/// Writes via a temporary file in the same directory and renames it into
/// place. Error(io) on failure.
void write_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_atomic(const std::filesystem::path& path, std::string_view text);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);

}  // namespace cbsq::io
