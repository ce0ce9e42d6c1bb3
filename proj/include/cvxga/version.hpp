#pragma once

namespace cvxga {

inline constexpr const char* kVersion = "0.1.0";

} // namespace cvxga
