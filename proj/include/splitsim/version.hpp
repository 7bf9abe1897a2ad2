#pragma once

namespace splitsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace splitsim
