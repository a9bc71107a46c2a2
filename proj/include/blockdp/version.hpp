#pragma once

namespace blockdp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace blockdp
