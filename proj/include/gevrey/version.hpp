#pragma once

namespace gevrey {
inline constexpr const char* kVersion = "0.1.0";
}
