#include "archner/search/index.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "archner/error.hpp"
#include "archner/text.hpp"

namespace archner::search {

using nlohmann::json;

std::vector<TermOccurrence> tokenize(std::string_view s) {
  std::vector<TermOccurrence> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t start = pos;
    const char32_t cp = text::next_code_point(s, pos);
    if (!text::is_alnum(cp)) continue;
    std::size_t end = pos;
    while (end < s.size()) {
      std::size_t next = end;
      if (!text::is_alnum(text::next_code_point(s, next))) break;
      end = next;
    }
    out.push_back({text::to_lower(s.substr(start, end - start)), start, end});
    pos = end;
  }
  return out;
}

std::vector<std::string> query_terms(std::string_view fulltext) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (auto& occ : tokenize(fulltext)) {
    if (seen.insert(occ.term).second) out.push_back(std::move(occ.term));
  }
  return out;
}

bool point_in_polygon(const GeoPoint& p, const std::vector<GeoPoint>& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const GeoPoint& a = poly[j];
    const GeoPoint& b = poly[i];
    const double cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
    if (cross == 0.0 && p.lon >= std::min(a.lon, b.lon) && p.lon <= std::max(a.lon, b.lon) &&
        p.lat >= std::min(a.lat, b.lat) && p.lat <= std::max(a.lat, b.lat)) {
      return true;
    }
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const GeoPoint& a = poly[j];
    const GeoPoint& b = poly[i];
    if ((b.lat > p.lat) != (a.lat > p.lat)) {
      const double lon_at = b.lon + (p.lat - b.lat) * (a.lon - b.lon) / (a.lat - b.lat);
      if (p.lon < lon_at) inside = !inside;
    }
  }
  return inside;
}

double idf(std::size_t page_count, std::size_t df) {
  return 1.0 + std::log(static_cast<double>(page_count) / static_cast<double>(df + 1));
}

namespace {

bool is_continuation_byte(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

std::size_t snap_forward(std::string_view s, std::size_t pos) {
  while (pos < s.size() && is_continuation_byte(s[pos])) ++pos;
  return pos;
}

std::size_t snap_backward(std::string_view s, std::size_t pos) {
  while (pos > 0 && pos < s.size() && is_continuation_byte(s[pos])) --pos;
  return pos;
}

}  // namespace

std::string make_snippet(std::string_view s, const std::vector<std::string>& terms,
                         std::size_t width) {
  const auto occurrences = tokenize(s);
  const std::set<std::string> wanted(terms.begin(), terms.end());
  const TermOccurrence* first = nullptr;
  for (const auto& occ : occurrences) {
    if (wanted.count(occ.term)) {
      first = &occ;
      break;
    }
  }

  std::size_t begin = 0;
  std::size_t end = std::min(s.size(), width);
  if (first != nullptr) {
    const std::size_t hit = first->end - first->begin;
    const std::size_t lead = hit >= width ? 0 : (width - hit) / 2;
    begin = first->begin > lead ? first->begin - lead : 0;
    end = std::min(s.size(), begin + std::max(width, hit));
    if (end - begin < width) begin = end > width ? end - width : 0;
    if (begin > first->begin) begin = first->begin;
  }
  begin = snap_forward(s, begin);
  end = snap_backward(s, end);
  // Drop words cut by the window edges.
  for (const auto& occ : occurrences) {
    if (occ.begin < begin && begin < occ.end) begin = occ.end;
    if (occ.begin < end && end < occ.end) end = occ.begin;
  }
  if (end < begin) end = begin;

  std::string out;
  std::size_t cursor = begin;
  for (const auto& occ : occurrences) {
    if (occ.begin < begin || occ.end > end || !wanted.count(occ.term)) continue;
    out.append(s.substr(cursor, occ.begin - cursor));
    out.append(kHighlightOpen);
    out.append(s.substr(occ.begin, occ.end - occ.begin));
    out.append(kHighlightClose);
    cursor = occ.end;
  }
  out.append(s.substr(cursor, end - cursor));
  return out;
}

bool matches_filters(const PageRecord& page, const Query& q) {
  for (const auto& [type, terms] : q.entity_filters) {
    const auto it = page.entities.find(type);
    for (const auto& term : terms) {
      if (it == page.entities.end()) return false;
      if (std::find(it->second.begin(), it->second.end(), term) == it->second.end()) return false;
    }
  }
  if (q.date) {
    const auto& d = *q.date;
    const bool any = std::any_of(page.year_ranges.begin(), page.year_ranges.end(),
                                 [&](const YearRange& r) {
                                   if (d.mode == DateMode::Contain) {
                                     return r.start <= d.start && r.end >= d.end;
                                   }
                                   return r.start <= d.end && r.end >= d.start;
                                 });
    if (!any) return false;
  }
  if (q.facet_filters.doc_type && page.metadata.doc_type != *q.facet_filters.doc_type) {
    return false;
  }
  if (q.facet_filters.subject && page.metadata.subject != *q.facet_filters.subject) return false;
  if (!q.bbox_or_polygon.empty()) {
    if (!page.metadata.coord || !point_in_polygon(*page.metadata.coord, q.bbox_or_polygon)) {
      return false;
    }
  }
  if (q.fulltext) {
    const auto terms = query_terms(*q.fulltext);
    if (!terms.empty()) {
      const std::set<std::string> wanted(terms.begin(), terms.end());
      const auto occurrences = tokenize(page.text);
      const bool hit = std::any_of(occurrences.begin(), occurrences.end(),
                                   [&](const TermOccurrence& o) { return wanted.count(o.term); });
      if (!hit) return false;
    }
  }
  return true;
}

void PageIndex::index_page(PageRecord record) {
  validate(record);
  Key key{record.doc_id, record.page_no};
  remove(key);
  Entry entry;
  const auto occurrences = tokenize(record.text);
  entry.length = occurrences.size();
  for (const auto& occ : occurrences) ++entry.tf[occ.term];
  for (const auto& [term, count] : entry.tf) ++df_[term];
  entry.record = std::move(record);
  pages_.emplace(std::move(key), std::move(entry));
}

bool PageIndex::remove(const Key& key) {
  const auto it = pages_.find(key);
  if (it == pages_.end()) return false;
  for (const auto& [term, count] : it->second.tf) {
    const auto d = df_.find(term);
    if (--d->second == 0) df_.erase(d);
  }
  pages_.erase(it);
  return true;
}

const PageRecord* PageIndex::find(const Key& key) const {
  const auto it = pages_.find(key);
  return it == pages_.end() ? nullptr : &it->second.record;
}

std::vector<PageIndex::Key> PageIndex::keys() const {
  std::vector<Key> out;
  out.reserve(pages_.size());
  for (const auto& [key, entry] : pages_) out.push_back(key);
  return out;
}

std::size_t PageIndex::document_frequency(const std::string& term) const {
  const auto it = df_.find(term);
  return it == df_.end() ? 0 : it->second;
}

std::size_t PageIndex::term_frequency(const Key& key, const std::string& term) const {
  const auto it = pages_.find(key);
  if (it == pages_.end()) return 0;
  const auto t = it->second.tf.find(term);
  return t == it->second.tf.end() ? 0 : t->second;
}

std::size_t PageIndex::length(const Key& key) const {
  const auto it = pages_.find(key);
  return it == pages_.end() ? 0 : it->second.length;
}

double PageIndex::score_page(const std::vector<std::string>& terms, const Key& key) const {
  const auto it = pages_.find(key);
  if (it == pages_.end() || it->second.length == 0) return 0.0;
  const Entry& entry = it->second;
  const double norm = 1.0 / std::sqrt(static_cast<double>(entry.length));
  double score = 0.0;
  for (const auto& term : terms) {
    const auto t = entry.tf.find(term);
    if (t == entry.tf.end()) continue;
    const double w = idf(pages_.size(), document_frequency(term));
    score += std::sqrt(static_cast<double>(t->second)) * w * w * norm;
  }
  return score;
}

SearchResult PageIndex::execute(const Query& query) const {
  validate(query);
  const auto terms = query.fulltext ? query_terms(*query.fulltext) : std::vector<std::string>{};

  struct Ranked {
    const Key* key;
    const Entry* entry;
    double score;
    double rank;  ///< score rounded so that sums differing only in order tie
  };
  std::vector<Ranked> ranked;
  SearchResult result;
  for (const auto& [key, entry] : pages_) {
    if (!matches_filters(entry.record, query)) continue;
    const double score = score_page(terms, key);
    ranked.push_back({&key, &entry, score, std::round(score * 1e12)});
    const auto& meta = entry.record.metadata;
    if (!meta.doc_type.empty()) ++result.facets["doc_type"][meta.doc_type];
    if (!meta.subject.empty()) ++result.facets["subject"][meta.subject];
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.rank != b.rank) return a.rank > b.rank;
    return *a.key < *b.key;
  });
  result.total = ranked.size();
  for (std::size_t i = query.from; i < ranked.size() && result.hits.size() < query.size; ++i) {
    const auto& r = ranked[i];
    result.hits.push_back(
        {r.key->first, r.key->second, r.score, make_snippet(r.entry->record.text, terms)});
  }
  return result;
}

void PageIndex::save(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path root(dir);
  {
    std::ofstream out(root / "pages.jsonl");
    if (!out) throw Error("cannot write " + (root / "pages.jsonl").string());
    for (const auto& [key, entry] : pages_) out << to_json(entry.record).dump() << '\n';
  }
  std::ofstream manifest(root / "manifest.json");
  if (!manifest) throw Error("cannot write " + (root / "manifest.json").string());
  manifest << json{{"format", "archner-index/1"}, {"pages", pages_.size()}}.dump(2) << '\n';
}

PageIndex PageIndex::load(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  std::ifstream manifest(root / "manifest.json");
  if (!manifest) throw Error("no index found in " + dir);
  json m;
  try {
    m = json::parse(manifest);
  } catch (const json::exception& e) {
    throw Error("corrupt index manifest: " + std::string(e.what()));
  }
  if (m.value("format", "") != "archner-index/1") throw Error("unsupported index format in " + dir);
  PageIndex index;
  for (auto& page : load_pages_jsonl((root / "pages.jsonl").string())) {
    index.index_page(std::move(page));
  }
  if (index.size() != m.value("pages", std::size_t{0})) {
    throw Error("index in " + dir + " does not match its manifest");
  }
  return index;
}

std::vector<PageRecord> read_pages_jsonl(std::istream& in) {
  std::vector<PageRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(page_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    } catch (const InvalidInput& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

std::vector<PageRecord> load_pages_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_pages_jsonl(in);
}

}  // namespace archner::search
