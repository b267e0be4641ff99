#pragma once

namespace deshadow {

inline constexpr const char* kCodeVersion = "0.1.0";

}  // namespace deshadow
