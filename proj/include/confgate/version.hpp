#pragma once

namespace confgate {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace confgate
