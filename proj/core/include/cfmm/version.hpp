#pragma once

namespace cfmm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cfmm
