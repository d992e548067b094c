#pragma once

#include <cstdint>
#include <string_view>

namespace tenet {

using Color = std::uint64_t;

/// Deterministic 64-bit colors; identical across runs and processes.
Color color(std::string_view s);
Color color(std::uint64_t v);
/// Combine an object color with a shading color.
Color ccolor(Color object, Color shade);
inline Color ccolor(std::string_view s, Color shade) { return ccolor(color(s), shade); }

}  // namespace tenet
