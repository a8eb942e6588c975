#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "photongun/simulator.hpp"

namespace photongun {

// Binary timestamp format, little-endian:
//   header (16 bytes): magic "PGUN", version u16, channel-count u16,
//                      resolution-ps u32, reserved u32
//   records (16 bytes): t u64 (picoseconds), origin u8, channel u8, 6 pad bytes
// The CSV mirror has columns t_ps,origin,channel with origin spelled out.

struct TimestampFileInfo {
  std::uint16_t version = 1;
  std::uint16_t channel_count = 1;
  std::uint32_t resolution_ps = 1;
};

inline constexpr char kTimestampMagic[4] = {'P', 'G', 'U', 'N'};
inline constexpr std::uint16_t kTimestampVersion = 1;

void write_timestamps_binary(const std::filesystem::path& path,
                             std::span<const PhotonRecord> records);

std::vector<PhotonRecord> read_timestamps_binary(const std::filesystem::path& path,
                                                 TimestampFileInfo* info = nullptr);

void write_timestamps_csv(const std::filesystem::path& path,
                          std::span<const PhotonRecord> records);

std::vector<PhotonRecord> read_timestamps_csv(const std::filesystem::path& path);

// Sniffs the magic to pick the binary or CSV reader.
std::vector<PhotonRecord> read_timestamps_auto(const std::filesystem::path& path);

}  // namespace photongun
