#pragma once

namespace fctm {

inline constexpr const char* kVersion = "0.1.0";

// Model and manifest files carry this so old readers can refuse new layouts.
inline constexpr int kModelFormatVersion = 1;

}  // namespace fctm
