#pragma once

namespace pmono {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pmono
