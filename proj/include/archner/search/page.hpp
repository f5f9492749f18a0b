#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "archner/bio.hpp"
#include "archner/year_range.hpp"

namespace archner::search {

struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct PageMetadata {
  std::string doc_type;
  std::string subject;
  std::optional<GeoPoint> coord;

  friend bool operator==(const PageMetadata&, const PageMetadata&) = default;
};

/// The retrieval unit: one page of one report.
struct PageRecord {
  std::string doc_id;
  int page_no = 1;
  std::string text;
  std::map<EntityType, std::vector<std::string>> entities;
  std::vector<YearRange> year_ranges;
  PageMetadata metadata;

  friend bool operator==(const PageRecord&, const PageRecord&) = default;
};

enum class DateMode { Contain, Overlap };

struct DateFilter {
  DateMode mode = DateMode::Contain;
  int start = 0;
  int end = 0;
};

struct FacetFilters {
  std::optional<std::string> doc_type;
  std::optional<std::string> subject;
};

struct Query {
  std::map<EntityType, std::vector<std::string>> entity_filters;
  std::optional<DateFilter> date;
  std::optional<std::string> fulltext;
  FacetFilters facet_filters;
  std::vector<GeoPoint> bbox_or_polygon;
  std::size_t from = 0;
  std::size_t size = 10;
};

struct Hit {
  std::string doc_id;
  int page_no = 0;
  double score = 0.0;
  std::string snippet;
};

struct SearchResult {
  std::size_t total = 0;
  std::vector<Hit> hits;
  /// facet field -> value -> count over every matching page
  std::map<std::string, std::map<std::string, std::size_t>> facets;
};

/// Thrown for records and queries that fail validation.
class InvalidInput : public std::runtime_error {
 public:
  InvalidInput(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// Normalizes entity surfaces (lowercase, single spaces) and checks
/// invariants. Throws InvalidInput.
void validate(PageRecord& page);
void validate(const Query& query);

// JSON wire format. Field names match the struct members; see README.
nlohmann::json to_json(const PageRecord& page);
PageRecord page_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Query& query);
Query query_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SearchResult& result);
SearchResult result_from_json(const nlohmann::json& j);

}  // namespace archner::search
