#pragma once

namespace freqaug {

inline constexpr const char* kVersion = "0.3.0";

}  // namespace freqaug
