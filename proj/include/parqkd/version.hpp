#pragma once

namespace parqkd {

inline constexpr const char* version_string = "parqkd 0.1.0";

} // namespace parqkd
