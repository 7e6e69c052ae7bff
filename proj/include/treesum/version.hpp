#pragma once

namespace treesum {

inline constexpr const char* kVersion = "0.1.0";

}
