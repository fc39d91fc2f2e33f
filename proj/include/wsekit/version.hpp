#pragma once

namespace wsekit {
inline constexpr const char* kVersion = "0.1.0";
}
