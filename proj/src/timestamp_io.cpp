#include "photongun/timestamp_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <string>

#include "photongun/errors.hpp"

namespace photongun {

namespace {

constexpr std::size_t kHeaderSize = 16;
constexpr std::size_t kRecordSize = 16;

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on " + path.string());
  return data;
}

const char* origin_name(Origin o) {
  return o == Origin::molecule ? "molecule" : "background";
}

}  // namespace

void write_timestamps_binary(const std::filesystem::path& path,
                             std::span<const PhotonRecord> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");

  std::uint8_t max_channel = 0;
  for (const auto& r : records) max_channel = std::max(max_channel, r.channel);

  std::string buf;
  buf.reserve(64 * 1024);
  buf.append(kTimestampMagic, 4);
  put_u16(buf, kTimestampVersion);
  put_u16(buf, static_cast<std::uint16_t>(max_channel + 1));
  put_u32(buf, 1);  // resolution: 1 ps per tick
  put_u32(buf, 0);  // reserved

  for (const auto& r : records) {
    put_u64(buf, r.t_ps);
    buf.push_back(static_cast<char>(r.origin));
    buf.push_back(static_cast<char>(r.channel));
    buf.append(6, '\0');
    if (buf.size() >= 64 * 1024) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) throw IoError("write failure on " + path.string());
}

std::vector<PhotonRecord> read_timestamps_binary(const std::filesystem::path& path,
                                                 TimestampFileInfo* info) {
  const std::string data = slurp(path);
  const auto* p = reinterpret_cast<const unsigned char*>(data.data());

  if (data.size() < kHeaderSize) {
    throw FormatError("truncated header in " + path.string(), data.size());
  }
  if (std::memcmp(data.data(), kTimestampMagic, 4) != 0) {
    throw FormatError("bad magic in " + path.string() + ": expected \"PGUN\"", 0);
  }
  const std::uint16_t version = get_u16(p + 4);
  if (version != kTimestampVersion) {
    throw FormatError("unsupported version " + std::to_string(version) + " in " + path.string(), 4);
  }
  if (info) {
    info->version = version;
    info->channel_count = get_u16(p + 6);
    info->resolution_ps = get_u32(p + 8);
  }

  const std::size_t payload = data.size() - kHeaderSize;
  if (payload % kRecordSize != 0) {
    throw FormatError("truncated record in " + path.string(),
                      kHeaderSize + (payload / kRecordSize) * kRecordSize);
  }

  std::vector<PhotonRecord> records(payload / kRecordSize);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const unsigned char* rec = p + kHeaderSize + i * kRecordSize;
    const std::uint8_t origin = rec[8];
    if (origin > 1) {
      throw FormatError("invalid origin tag in " + path.string(),
                        kHeaderSize + i * kRecordSize + 8);
    }
    records[i] = {get_u64(rec), static_cast<Origin>(origin), rec[9]};
  }
  return records;
}

void write_timestamps_csv(const std::filesystem::path& path,
                          std::span<const PhotonRecord> records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  std::string buf = "t_ps,origin,channel\n";
  char num[32];
  for (const auto& r : records) {
    auto [end, ec] = std::to_chars(num, num + sizeof(num), r.t_ps);
    buf.append(num, end);
    buf.push_back(',');
    buf.append(origin_name(r.origin));
    buf.push_back(',');
    auto [cend, cec] = std::to_chars(num, num + sizeof(num), static_cast<unsigned>(r.channel));
    buf.append(num, cend);
    buf.push_back('\n');
    if (buf.size() >= 64 * 1024) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) throw IoError("write failure on " + path.string());
}

std::vector<PhotonRecord> read_timestamps_csv(const std::filesystem::path& path) {
  const std::string data = slurp(path);
  std::vector<PhotonRecord> records;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header_seen = false;

  while (pos < data.size()) {
    std::size_t eol = data.find('\n', pos);
    if (eol == std::string::npos) eol = data.size();
    std::string_view line(data.data() + pos, eol - pos);
    const std::size_t line_start = pos;
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "t_ps,origin,channel") {
        throw FormatError("expected CSV header t_ps,origin,channel in " + path.string(),
                          line_start);
      }
      header_seen = true;
      continue;
    }

    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos) {
      throw FormatError("malformed CSV row at line " + std::to_string(line_no) + " in " +
                            path.string(),
                        line_start);
    }
    PhotonRecord rec;
    const std::string_view t_field = line.substr(0, c1);
    auto [ptr, ec] = std::from_chars(t_field.data(), t_field.data() + t_field.size(), rec.t_ps);
    if (ec != std::errc() || ptr != t_field.data() + t_field.size()) {
      throw FormatError("bad timestamp at line " + std::to_string(line_no) + " in " +
                            path.string(),
                        line_start);
    }
    const std::string_view origin = line.substr(c1 + 1, c2 - c1 - 1);
    if (origin == "molecule" || origin == "0") {
      rec.origin = Origin::molecule;
    } else if (origin == "background" || origin == "1") {
      rec.origin = Origin::background;
    } else {
      throw FormatError("bad origin tag at line " + std::to_string(line_no) + " in " +
                            path.string(),
                        line_start + c1 + 1);
    }
    const std::string_view ch_field = line.substr(c2 + 1);
    unsigned channel = 0;
    auto [cptr, cec] = std::from_chars(ch_field.data(), ch_field.data() + ch_field.size(), channel);
    if (cec != std::errc() || cptr != ch_field.data() + ch_field.size() || channel > 255) {
      throw FormatError("bad channel at line " + std::to_string(line_no) + " in " + path.string(),
                        line_start + c2 + 1);
    }
    rec.channel = static_cast<std::uint8_t>(channel);
    records.push_back(rec);
  }
  if (!header_seen) {
    throw FormatError("empty or headerless CSV " + path.string(), 0);
  }
  return records;
}

std::vector<PhotonRecord> read_timestamps_auto(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() == 4 && std::memcmp(magic, kTimestampMagic, 4) == 0) {
    return read_timestamps_binary(path);
  }
  return read_timestamps_csv(path);
}

}  // namespace photongun
