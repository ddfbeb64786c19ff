#pragma once

namespace casimir {

inline constexpr const char* kToolName = "casimir";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace casimir
