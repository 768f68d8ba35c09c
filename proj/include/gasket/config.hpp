#pragma once

#include <cstdlib>
#include <string>

#include "gasket/error.hpp"

namespace gasket {

// Hard ceiling on refinement depth; words and packed addresses assume it.
inline constexpr int kHardLevelCap = 24;

// Runtime level cap. Defaults to 12 (|V_12| ~ 8e5 keeps exact arithmetic
// tractable); override with GASKET_MAX_LEVEL.
inline int max_level() {
  static const int cap = [] {
    if (const char* env = std::getenv("GASKET_MAX_LEVEL")) {
      int v = std::atoi(env);
      if (v >= 1 && v <= kHardLevelCap) return v;
    }
    return 12;
  }();
  return cap;
}

inline void require_level(int m) {
  if (m < 0) throw DomainError("level must be non-negative, got " + std::to_string(m));
  if (m > max_level())
    throw LevelCapError("level " + std::to_string(m) + " exceeds cap " +
                        std::to_string(max_level()) + " (set GASKET_MAX_LEVEL to raise)");
}

}  // namespace gasket
