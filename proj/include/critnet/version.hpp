#pragma once

#include <string_view>

namespace critnet {

inline constexpr std::string_view kVersion = "1.0.0";

}  // namespace critnet
