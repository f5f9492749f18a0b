#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "archner/search/page.hpp"

namespace archner::search {

/// A lowercased term and its byte range in the source text.
struct TermOccurrence {
  std::string term;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Lowercases and splits on every non-alphanumeric code point, so
/// "'s-Hertogenbosch" yields "s" and "hertogenbosch".
std::vector<TermOccurrence> tokenize(std::string_view text);

/// Distinct terms of a fulltext query, in first-occurrence order.
std::vector<std::string> query_terms(std::string_view fulltext);

/// Ray casting; points on an edge or vertex count as inside.
bool point_in_polygon(const GeoPoint& point, const std::vector<GeoPoint>& polygon);

/// 1 + ln(N / (df + 1)).
double idf(std::size_t page_count, std::size_t document_frequency);

/// A window of about `width` bytes around the first query-term hit with every
/// hit wrapped in <em>...</em>. Without a hit the text prefix is returned.
/// Window edges never split a word or a UTF-8 sequence.
std::string make_snippet(std::string_view text, const std::vector<std::string>& terms,
                         std::size_t width = 160);

inline constexpr std::string_view kHighlightOpen = "<em>";
inline constexpr std::string_view kHighlightClose = "</em>";

/// True when `page` passes every entity, date, facet, geo and fulltext
/// filter of `query`. A fulltext filter needs at least one query term in
/// the page text.
bool matches_filters(const PageRecord& page, const Query& query);

/// In-memory inverted index over pages keyed by (doc_id, page_no).
class PageIndex {
 public:
  using Key = std::pair<std::string, int>;

  /// Validates and inserts the page, replacing any earlier version with the
  /// same key. Throws InvalidInput.
  void index_page(PageRecord record);
  bool remove(const Key& key);

  std::size_t size() const { return pages_.size(); }
  const PageRecord* find(const Key& key) const;
  std::vector<Key> keys() const;

  std::size_t document_frequency(const std::string& term) const;
  std::size_t term_frequency(const Key& key, const std::string& term) const;
  /// Page length in tokens.
  std::size_t length(const Key& key) const;

  /// sum over query terms present in the page of
  /// sqrt(tf) * idf^2 / sqrt(page length).
  double score_page(const std::vector<std::string>& terms, const Key& key) const;

  /// Filters, ranks (score descending, then doc_id and page_no ascending;
  /// scores equal to 12 decimal places count as ties),
  /// counts facets over every surviving page, and returns one result page.
  SearchResult execute(const Query& query) const;

  /// Writes `pages.jsonl` and `manifest.json` into `dir`, creating it.
  void save(const std::string& dir) const;
  static PageIndex load(const std::string& dir);

 private:
  struct Entry {
    PageRecord record;
    std::size_t length = 0;
    std::unordered_map<std::string, std::size_t> tf;
  };

  std::map<Key, Entry> pages_;
  std::unordered_map<std::string, std::size_t> df_;
};

/// One JSON page record per non-blank line. Errors name the line number.
std::vector<PageRecord> read_pages_jsonl(std::istream& in);
std::vector<PageRecord> load_pages_jsonl(const std::string& path);

}  // namespace archner::search
