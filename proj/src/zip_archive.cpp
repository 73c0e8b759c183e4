#include "safebench/zip_archive.hpp"

#include "safebench/errors.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <limits>

namespace safebench::zip {

namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;
constexpr std::uint32_t kZip64EndSig = 0x06064b50;
constexpr std::uint32_t kZip64LocatorSig = 0x07064b50;
constexpr std::uint16_t kVersion = 20;
constexpr std::uint16_t kDosDate1980 = (0 << 9) | (1 << 5) | 1;

class Writer {
 public:
  void u16(std::uint16_t v) {
    buf_.push_back(static_cast<std::uint8_t>(v & 0xff));
    buf_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
  }
  void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  void text(const std::string& s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
  std::size_t size() const { return buf_.size(); }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  void seek(std::uint64_t pos) {
    if (pos > data_.size()) throw Error("zip: offset " + std::to_string(pos) + " past end of archive");
    pos_ = static_cast<std::size_t>(pos);
  }
  std::size_t pos() const { return pos_; }

  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }

  std::span<const std::uint8_t> take(std::uint64_t n) {
    if (n > data_.size() - pos_) throw Error("zip: truncated archive");
    auto out = data_.subspan(pos_, static_cast<std::size_t>(n));
    pos_ += static_cast<std::size_t>(n);
    return out;
  }

 private:
  std::uint64_t le(int n) {
    auto b = take(static_cast<std::uint64_t>(n));
    std::uint64_t v = 0;
    for (int i = n - 1; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
    return v;
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> inflate_raw(std::span<const std::uint8_t> in, std::uint64_t expected,
                                      const std::string& name) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(expected));
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw Error("zip: inflateInit failed");
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) {
    throw Error("zip: member '" + name + "' failed to inflate");
  }
  return out;
}

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  std::size_t done = 0;
  while (done < bytes.size()) {
    const auto chunk = static_cast<uInt>(
        std::min<std::size_t>(bytes.size() - done, std::numeric_limits<uInt>::max()));
    crc = ::crc32(crc, bytes.data() + done, chunk);
    done += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> write_stored(std::span<const Member> members) {
  Writer w;
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> crcs;
  for (const auto& m : members) {
    if (m.data.size() >= 0xffffffffULL || w.size() >= 0xffffffffULL) {
      throw Error("zip: member '" + m.name + "' needs zip64, which the writer does not emit");
    }
    offsets.push_back(static_cast<std::uint32_t>(w.size()));
    crcs.push_back(crc32(m.data));
    w.u32(kLocalSig);
    w.u16(kVersion);
    w.u16(0);  // flags
    w.u16(0);  // stored
    w.u16(0);  // time
    w.u16(kDosDate1980);
    w.u32(crcs.back());
    w.u32(static_cast<std::uint32_t>(m.data.size()));
    w.u32(static_cast<std::uint32_t>(m.data.size()));
    w.u16(static_cast<std::uint16_t>(m.name.size()));
    w.u16(0);
    w.text(m.name);
    w.bytes(m.data);
  }

  const auto cd_start = static_cast<std::uint32_t>(w.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& m = members[i];
    w.u32(kCentralSig);
    w.u16(kVersion);  // made by
    w.u16(kVersion);  // needed
    w.u16(0);
    w.u16(0);
    w.u16(0);
    w.u16(kDosDate1980);
    w.u32(crcs[i]);
    w.u32(static_cast<std::uint32_t>(m.data.size()));
    w.u32(static_cast<std::uint32_t>(m.data.size()));
    w.u16(static_cast<std::uint16_t>(m.name.size()));
    w.u16(0);  // extra
    w.u16(0);  // comment
    w.u16(0);  // disk
    w.u16(0);  // internal attrs
    w.u32(0);  // external attrs
    w.u32(offsets[i]);
    w.text(m.name);
  }
  const auto cd_size = static_cast<std::uint32_t>(w.size() - cd_start);

  w.u32(kEndSig);
  w.u16(0);
  w.u16(0);
  w.u16(static_cast<std::uint16_t>(members.size()));
  w.u16(static_cast<std::uint16_t>(members.size()));
  w.u32(cd_size);
  w.u32(cd_start);
  w.u16(0);
  return w.take();
}

std::vector<EntryInfo> list(std::span<const std::uint8_t> archive) {
  if (archive.size() < 22) throw Error("zip: file too small to be an archive");

  // End of central directory: scan back over a possible comment.
  std::size_t eocd = std::numeric_limits<std::size_t>::max();
  const std::size_t lowest = archive.size() > 22 + 0xffff ? archive.size() - 22 - 0xffff : 0;
  for (std::size_t p = archive.size() - 22 + 1; p-- > lowest;) {
    if (archive[p] == 0x50 && archive[p + 1] == 0x4b && archive[p + 2] == 0x05 &&
        archive[p + 3] == 0x06) {
      eocd = p;
      break;
    }
  }
  if (eocd == std::numeric_limits<std::size_t>::max()) {
    throw Error("zip: end of central directory not found");
  }

  Reader r(archive);
  r.seek(eocd + 4);
  r.u16();
  r.u16();
  r.u16();
  std::uint64_t entries = r.u16();
  std::uint64_t cd_size = r.u32();
  std::uint64_t cd_offset = r.u32();

  if ((entries == 0xffff || cd_offset == 0xffffffff || cd_size == 0xffffffff) && eocd >= 20) {
    Reader loc(archive);
    loc.seek(eocd - 20);
    if (loc.u32() == kZip64LocatorSig) {
      loc.u32();
      const std::uint64_t z64 = loc.u64();
      Reader e(archive);
      e.seek(z64);
      if (e.u32() != kZip64EndSig) throw Error("zip: bad zip64 end record");
      e.u64();
      e.u16();
      e.u16();
      e.u32();
      e.u32();
      e.u64();
      entries = e.u64();
      cd_size = e.u64();
      cd_offset = e.u64();
    }
  }
  (void)cd_size;

  std::vector<EntryInfo> out;
  r.seek(cd_offset);
  for (std::uint64_t i = 0; i < entries; ++i) {
    if (r.u32() != kCentralSig) throw Error("zip: bad central directory signature");
    r.u16();
    r.u16();
    const std::uint16_t flags = r.u16();
    EntryInfo info;
    info.method = r.u16();
    r.u16();
    r.u16();
    info.crc32 = r.u32();
    info.compressed_size = r.u32();
    info.uncompressed_size = r.u32();
    const std::uint16_t name_len = r.u16();
    const std::uint16_t extra_len = r.u16();
    const std::uint16_t comment_len = r.u16();
    r.u16();
    r.u16();
    r.u32();
    info.local_header_offset = r.u32();
    const auto name = r.take(name_len);
    info.name.assign(name.begin(), name.end());
    if (flags & 0x1) throw Error("zip: member '" + info.name + "' is encrypted");

    auto extra = r.take(extra_len);
    Reader x(extra);
    while (x.pos() + 4 <= extra.size()) {
      const std::uint16_t id = x.u16();
      const std::uint16_t len = x.u16();
      auto field = x.take(len);
      if (id != 0x0001) continue;
      Reader f(field);
      if (info.uncompressed_size == 0xffffffff) info.uncompressed_size = f.u64();
      if (info.compressed_size == 0xffffffff) info.compressed_size = f.u64();
      if (info.local_header_offset == 0xffffffff) info.local_header_offset = f.u64();
    }
    r.take(comment_len);

    Reader lh(archive);
    lh.seek(info.local_header_offset);
    if (lh.u32() != kLocalSig) throw Error("zip: bad local header for '" + info.name + "'");
    lh.seek(info.local_header_offset + 26);
    const std::uint16_t lname = lh.u16();
    const std::uint16_t lextra = lh.u16();
    info.data_offset = info.local_header_offset + 30 + lname + lextra;
    if (info.data_offset > archive.size() ||
        info.compressed_size > archive.size() - info.data_offset) {
      throw Error("zip: member '" + info.name + "' extends past end of archive");
    }
    out.push_back(std::move(info));
  }
  return out;
}

std::vector<Member> read_all(std::span<const std::uint8_t> archive) {
  std::vector<Member> out;
  for (const auto& e : list(archive)) {
    auto raw = archive.subspan(static_cast<std::size_t>(e.data_offset),
                               static_cast<std::size_t>(e.compressed_size));
    Member m;
    m.name = e.name;
    if (e.method == 0) {
      if (e.compressed_size != e.uncompressed_size) {
        throw Error("zip: stored member '" + e.name + "' has inconsistent sizes");
      }
      m.data.assign(raw.begin(), raw.end());
    } else if (e.method == 8) {
      m.data = inflate_raw(raw, e.uncompressed_size, e.name);
    } else {
      throw Error("zip: member '" + e.name + "' uses unsupported method " +
                  std::to_string(e.method));
    }
    if (crc32(m.data) != e.crc32) throw Error("zip: CRC mismatch in member '" + e.name + "'");
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

}  // namespace safebench::zip
