#pragma once

#include <compare>

namespace archner {

/// Closed interval of astronomical years; negative years are BCE.
struct YearRange {
  int start = 0;
  int end = 0;

  friend auto operator<=>(const YearRange&, const YearRange&) = default;
};

}  // namespace archner
