#pragma once

namespace wmr {
inline constexpr const char* kVersion = "1.0.0";
}
