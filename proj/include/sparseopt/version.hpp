#pragma once

namespace sparseopt {
inline constexpr const char* kVersion = "0.1.0";
}
