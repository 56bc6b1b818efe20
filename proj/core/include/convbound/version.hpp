#pragma once

namespace convbound {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace convbound
