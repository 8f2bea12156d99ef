#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace fairaudit {

// FNV-1a 64-bit. Used for dataset fingerprints and fixture checksums
// (provenance, not security).
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string to_hex(std::uint64_t value);

// "fnv1a64:<16 hex digits>"
std::string fingerprint(std::string_view bytes);

// Fingerprint of a file's raw contents. Throws DataError if unreadable.
std::string fingerprint_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace fairaudit
