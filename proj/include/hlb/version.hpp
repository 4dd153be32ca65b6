#pragma once

namespace hlb {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hlb
