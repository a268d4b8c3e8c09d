#pragma once

namespace nbspectra {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nbspectra
