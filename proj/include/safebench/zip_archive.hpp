#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace safebench::zip {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Member {
  std::string name;
  std::vector<std::uint8_t> data;
};

struct EntryInfo {
  std::string name;
  std::uint16_t method = 0;  // 0 stored, 8 deflate
  std::uint64_t compressed_size = 0;
  std::uint64_t uncompressed_size = 0;
  std::uint64_t local_header_offset = 0;
  std::uint64_t data_offset = 0;  // absolute offset of the member bytes
  std::uint32_t crc32 = 0;
};

/// Builds a ZIP archive with every member stored uncompressed, in the given
/// order, with a fixed 1980-01-01 timestamp.
std::vector<std::uint8_t> write_stored(std::span<const Member> members);

/// Lists the central directory (zip64 extensions understood).
std::vector<EntryInfo> list(std::span<const std::uint8_t> archive);

/// Extracts every member. Stored and deflate members are supported; CRCs are
/// verified.
std::vector<Member> read_all(std::span<const std::uint8_t> archive);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

}  // namespace safebench::zip
