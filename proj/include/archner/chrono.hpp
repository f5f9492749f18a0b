#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "archner/gazetteer.hpp"
#include "archner/spans.hpp"
#include "archner/year_range.hpp"

namespace archner::chrono {

/// Radiocarbon "present".
inline constexpr int kPresentYear = 1950;

/// Maps a time-period mention to a year range. Tried in order:
///   1. period name from the thesaurus ("bronze age")
///   2. single year with era ("100 BCE", "600 CE", "1400 BP", "50 v.Chr.")
///   3. year range with at least one era marker ("500 - 200 BC"); bare
///      ranges such as grain sizes ("150 - 210") are rejected
///   4. ordinal century with optional start/mid/end modifier and era
///      ("start of the 10th century", "9e eeuw v.Chr.")
/// Returns nullopt when nothing matches.
std::optional<YearRange> normalize(std::string_view text, const Thesaurus* thesaurus = nullptr);

struct YearHistogram {
  static constexpr int kDefaultFloor = -10000;

  int floor_year = kDefaultFloor;
  std::map<int, std::size_t> counts;

  std::size_t total_mass() const;
  /// `year,count` rows in ascending year order.
  std::string to_csv() const;
};

/// Counts every year in every range (inclusive); years below the floor are
/// dropped.
YearHistogram year_histogram(const std::vector<YearRange>& ranges,
                             int floor_year = YearHistogram::kDefaultFloor);

struct EntityTypeStats {
  std::size_t total = 0;
  std::size_t unique = 0;
  std::vector<std::pair<std::string, std::size_t>> top;  ///< by count, ties lexicographic
};

/// Totals, distinct surfaces, and most frequent surfaces for each of the six
/// entity types.
std::map<EntityType, EntityTypeStats> entity_stats(const std::vector<EntitySpan>& spans,
                                                   std::size_t top_n = 5);
std::string entity_stats_csv(const std::map<EntityType, EntityTypeStats>& stats);

}  // namespace archner::chrono
