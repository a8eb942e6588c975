#pragma once

namespace photongun {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace photongun
