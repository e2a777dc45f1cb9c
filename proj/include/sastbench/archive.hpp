#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sastbench {

enum class ArchiveFormat { zip, tar_gz };

std::string_view to_string(ArchiveFormat format);

/// Sniffs the magic bytes; nullopt for anything that is neither zip nor gzip.
std::optional<ArchiveFormat> detect_archive_format(std::string_view bytes);

struct ArchiveEntry {
  std::string path;  // normalized, relative
  std::string data;
};

/// Decodes every regular file in a zip or tar.gz archive. Throws
/// Error{rejected_input} for malformed archives, encrypted or zip64 entries,
/// paths escaping the root, or when the unpacked size exceeds `max_unpacked`.
std::vector<ArchiveEntry> read_archive(std::string_view bytes,
                                       std::uint64_t max_unpacked = 512ull << 20);

/// Writes the archive's files below `dest`, creating directories as needed.
void extract_archive(std::string_view bytes, const std::filesystem::path& dest,
                     std::uint64_t max_unpacked = 512ull << 20);

std::string sha256_hex(std::string_view data);

}  // namespace sastbench
