#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace photongun {

// Exit-code contract used by the CLI: 2 config, 3 I/O, 4 malformed file,
// 5 fit failure.

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (byte offset " + std::to_string(offset) + ")"),
        byte_offset(offset) {}
  explicit FormatError(const std::string& what) : std::runtime_error(what), byte_offset(0) {}

  std::uint64_t byte_offset;
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 2;
inline constexpr int io = 3;
inline constexpr int format = 4;
inline constexpr int fit = 5;
}  // namespace exit_code

}  // namespace photongun
