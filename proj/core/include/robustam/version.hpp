#pragma once

namespace robustam {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace robustam
