#pragma once

namespace gpd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gpd
