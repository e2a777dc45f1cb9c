#include "sastbench/archive.hpp"

#include <openssl/evp.h>
#include <zlib.h>

#include <cstring>
#include <fstream>
#include <memory>
#include <set>

#include "sastbench/error.hpp"
#include "sastbench/finding_model.hpp"

namespace fs = std::filesystem;

namespace sastbench {

std::string_view to_string(ArchiveFormat format) {
  return format == ArchiveFormat::zip ? "zip" : "tar.gz";
}

std::optional<ArchiveFormat> detect_archive_format(std::string_view bytes) {
  if (bytes.size() >= 4 && bytes.substr(0, 4) == std::string_view("PK\x03\x04", 4)) {
    return ArchiveFormat::zip;
  }
  // An archive holding no entries is just the end-of-central-directory record.
  if (bytes.size() >= 4 && bytes.substr(0, 4) == std::string_view("PK\x05\x06", 4)) {
    return ArchiveFormat::zip;
  }
  if (bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0x1f &&
      static_cast<unsigned char>(bytes[1]) == 0x8b) {
    return ArchiveFormat::tar_gz;
  }
  return std::nullopt;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::io, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

namespace {

[[noreturn]] void reject(const std::string& why) {
  throw Error(ErrorKind::rejected_input, "malformed archive: " + why);
}

std::uint32_t le32(std::string_view b, std::size_t off) {
  if (off + 4 > b.size()) reject("truncated header");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[off + i]);
  return v;
}

std::uint16_t le16(std::string_view b, std::size_t off) {
  if (off + 2 > b.size()) reject("truncated header");
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[off]) |
                                    (static_cast<unsigned char>(b[off + 1]) << 8));
}

// Inflates `in`; windowBits selects raw deflate (-15) or gzip (16 + 15).
std::string inflate_all(std::string_view in, int window_bits, std::uint64_t limit) {
  z_stream zs{};
  if (inflateInit2(&zs, window_bits) != Z_OK) reject("zlib init failed");
  std::unique_ptr<z_stream, decltype(&inflateEnd)> guard(&zs, inflateEnd);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  std::string out;
  char buf[64 * 1024];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof buf;
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) reject("corrupt compressed data");
    out.append(buf, sizeof buf - zs.avail_out);
    if (out.size() > limit) {
      throw Error(ErrorKind::too_large, "archive unpacks beyond the size limit");
    }
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) reject("truncated compressed data");
  }
  return out;
}

std::string safe_entry_path(std::string_view raw) {
  if (raw.empty() || raw.front() == '/' || raw.find('\0') != std::string_view::npos) {
    reject("unsafe entry path '" + std::string(raw) + "'");
  }
  try {
    return normalize_relative_path(raw);
  } catch (const Error&) {
    reject("unsafe entry path '" + std::string(raw) + "'");
  }
}

std::vector<ArchiveEntry> read_zip(std::string_view b, std::uint64_t limit) {
  constexpr std::uint32_t kEocd = 0x06054b50;
  constexpr std::uint32_t kCentral = 0x02014b50;
  constexpr std::uint32_t kLocal = 0x04034b50;
  if (b.size() < 22) reject("zip too short");
  std::size_t eocd = std::string_view::npos;
  std::size_t lowest = b.size() > 22 + 65535 ? b.size() - 22 - 65535 : 0;
  for (std::size_t pos = b.size() - 22 + 1; pos-- > lowest;) {
    if (le32(b, pos) == kEocd) {
      eocd = pos;
      break;
    }
  }
  if (eocd == std::string_view::npos) reject("no end of central directory");
  const std::uint16_t count = le16(b, eocd + 10);
  const std::uint32_t cd_offset = le32(b, eocd + 16);
  if (count == 0xffff || cd_offset == 0xffffffff) reject("zip64 archives are not supported");

  std::vector<ArchiveEntry> entries;
  std::uint64_t total = 0;
  std::size_t p = cd_offset;
  for (std::uint16_t i = 0; i < count; ++i) {
    if (le32(b, p) != kCentral) reject("bad central directory entry");
    const std::uint16_t flags = le16(b, p + 8);
    const std::uint16_t method = le16(b, p + 10);
    const std::uint32_t crc = le32(b, p + 16);
    const std::uint32_t csize = le32(b, p + 20);
    const std::uint32_t usize = le32(b, p + 24);
    const std::uint16_t name_len = le16(b, p + 28);
    const std::uint16_t extra_len = le16(b, p + 30);
    const std::uint16_t comment_len = le16(b, p + 32);
    const std::uint32_t local = le32(b, p + 42);
    if (p + 46 + name_len > b.size()) reject("truncated central directory");
    std::string name(b.substr(p + 46, name_len));
    p += 46 + name_len + extra_len + comment_len;

    if (flags & 0x1) reject("encrypted entries are not supported");
    if (csize == 0xffffffff || usize == 0xffffffff) reject("zip64 entries are not supported");
    if (!name.empty() && name.back() == '/') continue;  // directory

    if (le32(b, local) != kLocal) reject("bad local header for " + name);
    const std::size_t data = local + 30 + le16(b, local + 26) + le16(b, local + 28);
    if (data + csize > b.size()) reject("truncated data for " + name);
    auto raw = b.substr(data, csize);

    total += usize;
    if (total > limit) throw Error(ErrorKind::too_large, "archive unpacks beyond the size limit");
    std::string content;
    if (method == 0) {
      content.assign(raw);
    } else if (method == 8) {
      content = inflate_all(raw, -MAX_WBITS, usize);
    } else {
      reject("unsupported compression method " + std::to_string(method) + " for " + name);
    }
    if (content.size() != usize) reject("size mismatch for " + name);
    auto actual = crc32(0L, reinterpret_cast<const Bytef*>(content.data()),
                        static_cast<uInt>(content.size()));
    if (actual != crc) reject("CRC mismatch for " + name);
    entries.push_back({safe_entry_path(name), std::move(content)});
  }
  return entries;
}

std::uint64_t parse_octal(std::string_view field) {
  std::uint64_t v = 0;
  bool any = false;
  for (char c : field) {
    if (c == '\0' || c == ' ') {
      if (any) break;
      continue;
    }
    if (c < '0' || c > '7') reject("bad octal field in tar header");
    v = v * 8 + static_cast<std::uint64_t>(c - '0');
    any = true;
  }
  return v;
}

std::string cstr_field(std::string_view field) {
  auto nul = field.find('\0');
  return std::string(field.substr(0, nul));
}

std::vector<ArchiveEntry> read_tar_gz(std::string_view gz, std::uint64_t limit) {
  const std::string tar = inflate_all(gz, 16 + MAX_WBITS, limit + (limit >> 4) + (1 << 20));
  std::vector<ArchiveEntry> entries;
  std::uint64_t total = 0;
  std::size_t p = 0;
  std::string long_name;
  while (p + 512 <= tar.size()) {
    std::string_view h(tar.data() + p, 512);
    if (h.find_first_not_of('\0') == std::string_view::npos) break;  // end marker

    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < 512; ++i) {
      sum += (i >= 148 && i < 156) ? ' ' : static_cast<unsigned char>(h[i]);
    }
    if (sum != parse_octal(h.substr(148, 8))) reject("tar header checksum mismatch");

    const std::uint64_t size = parse_octal(h.substr(124, 12));
    const char type = h[156];
    std::string name = cstr_field(h.substr(0, 100));
    if (h.substr(257, 5) == "ustar") {
      std::string prefix = cstr_field(h.substr(345, 155));
      if (!prefix.empty()) name = prefix + "/" + name;
    }
    p += 512;
    if (p + size > tar.size()) reject("truncated tar entry " + name);
    std::string_view body(tar.data() + p, size);
    p += (size + 511) / 512 * 512;

    if (type == 'L') {  // GNU long name for the next entry
      long_name = cstr_field(body);
      continue;
    }
    if (type == 'x') {  // pax extended header: honour "path="
      std::size_t q = 0;
      while (q < body.size()) {
        auto space = body.find(' ', q);
        if (space == std::string_view::npos) break;
        auto len = std::stoul(std::string(body.substr(q, space - q)));
        if (len == 0 || q + len > body.size()) reject("bad pax record");
        auto record = body.substr(space + 1, len - (space - q) - 2);
        if (record.substr(0, 5) == "path=") long_name = std::string(record.substr(5));
        q += len;
      }
      continue;
    }
    if (type == 'g') continue;
    if (!long_name.empty()) {
      name = long_name;
      long_name.clear();
    }
    if (type != '0' && type != '\0') continue;  // directories, links, devices

    total += size;
    if (total > limit) throw Error(ErrorKind::too_large, "archive unpacks beyond the size limit");
    entries.push_back({safe_entry_path(name), std::string(body)});
  }
  return entries;
}

}  // namespace

std::vector<ArchiveEntry> read_archive(std::string_view bytes, std::uint64_t max_unpacked) {
  auto format = detect_archive_format(bytes);
  if (!format) reject("neither zip nor tar.gz");
  auto entries = *format == ArchiveFormat::zip ? read_zip(bytes, max_unpacked)
                                               : read_tar_gz(bytes, max_unpacked);
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (!seen.insert(e.path).second) reject("duplicate entry " + e.path);
  }
  return entries;
}

void extract_archive(std::string_view bytes, const fs::path& dest, std::uint64_t max_unpacked) {
  auto entries = read_archive(bytes, max_unpacked);
  fs::create_directories(dest);
  for (const auto& e : entries) {
    auto path = dest / fs::path(e.path);
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(e.data.data(), static_cast<std::streamsize>(e.data.size()));
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  }
}

}  // namespace sastbench
