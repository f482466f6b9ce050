#pragma once

namespace tensionlab {

inline constexpr const char* kToolVersion = "0.1.0";

}
