#include "archner/chrono.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

#include "archner/text.hpp"

namespace archner::chrono {

namespace {

enum class Era { BCE, CE, BP };

// Lowercased input only.
const std::string kEra =
    R"((bce|bc|ce|ad|bp|v\.\s?chr\.?|n\.\s?chr\.?|voor christus|na christus))";

std::optional<Era> parse_era(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "bp") return Era::BP;
  if (s == "bce" || s == "bc" || s[0] == 'v') return Era::BCE;
  return Era::CE;
}

int to_year(long n, Era era) {
  switch (era) {
    case Era::BCE: return static_cast<int>(-n);
    case Era::CE: return static_cast<int>(n);
    case Era::BP: return static_cast<int>(kPresentYear - n);
  }
  return 0;
}

std::optional<long> parse_number(const std::string& s) {
  if (s.empty() || s.size() > 7) return std::nullopt;
  return std::stol(s);
}

std::string clean(std::string_view raw) {
  std::string s = text::normalize_phrase(raw);
  // en and em dashes as plain hyphens
  for (const std::string_view dash : {"\xE2\x80\x93", "\xE2\x80\x94"}) {
    for (auto pos = s.find(dash); pos != std::string::npos; pos = s.find(dash)) {
      s.replace(pos, dash.size(), "-");
    }
  }
  return s;
}

std::optional<YearRange> single_year(const std::string& s) {
  static const std::regex suffix_era("^(\\d+)\\s*" + kEra + "$");
  static const std::regex prefix_era("^(ad|ce)\\s*(\\d+)$");
  std::smatch m;
  if (std::regex_match(s, m, suffix_era)) {
    const auto n = parse_number(m[1]);
    if (!n) return std::nullopt;
    const int y = to_year(*n, *parse_era(m[2]));
    return YearRange{y, y};
  }
  if (std::regex_match(s, m, prefix_era)) {
    const auto n = parse_number(m[2]);
    if (!n) return std::nullopt;
    return YearRange{static_cast<int>(*n), static_cast<int>(*n)};
  }
  return std::nullopt;
}

std::optional<YearRange> year_span(const std::string& s) {
  static const std::regex range("^(\\d+)\\s*(?:" + kEra + ")?\\s*(?:-|to|until|tot)\\s*(\\d+)\\s*(?:" +
                                kEra + ")?$");
  std::smatch m;
  if (!std::regex_match(s, m, range)) return std::nullopt;
  auto era_a = parse_era(m[2]);
  auto era_b = parse_era(m[4]);
  if (!era_a && !era_b) return std::nullopt;
  if (!era_a) era_a = era_b;
  if (!era_b) era_b = era_a;
  const auto a = parse_number(m[1]);
  const auto b = parse_number(m[3]);
  if (!a || !b) return std::nullopt;
  const int ya = to_year(*a, *era_a);
  const int yb = to_year(*b, *era_b);
  return YearRange{std::min(ya, yb), std::max(ya, yb)};
}

enum class Part { Whole, FirstQuarter, MiddleHalf, LastQuarter };

Part parse_modifier(const std::string& m) {
  if (m.empty()) return Part::Whole;
  if (m == "mid" || m == "middle" || m == "midden") return Part::MiddleHalf;
  if (m == "end" || m == "late" || m == "eind" || m == "einde" || m == "laat") return Part::LastQuarter;
  return Part::FirstQuarter;
}

std::optional<YearRange> century(const std::string& s) {
  static const std::regex pattern(
      "^(?:(start|begin|beginning|early|vroeg|mid|middle|midden|end|late|eind|einde|laat)"
      "(?:\\s+of)?(?:\\s+van)?(?:\\s+the)?(?:\\s+de)?\\s+)?"
      "(\\d+)\\s*(?:st|nd|rd|th|ste|de|e)?\\s*(?:century|centuries|eeuw)(?:\\s+" +
      kEra + ")?$");
  std::smatch m;
  if (!std::regex_match(s, m, pattern)) return std::nullopt;
  const auto k = parse_number(m[2]);
  if (!k || *k < 1) return std::nullopt;
  const auto era = parse_era(m[3]).value_or(Era::CE);
  if (era == Era::BP) return std::nullopt;

  const int lo = era == Era::CE ? static_cast<int>(100 * (*k - 1)) : static_cast<int>(-100 * *k);
  const int hi = lo + 100;
  switch (parse_modifier(m[1])) {
    case Part::Whole: return YearRange{lo, hi};
    case Part::FirstQuarter: return YearRange{lo, lo + 25};
    case Part::MiddleHalf: return YearRange{lo + 25, hi - 25};
    case Part::LastQuarter: return YearRange{hi - 25, hi};
  }
  return std::nullopt;
}

}  // namespace

std::optional<YearRange> normalize(std::string_view raw, const Thesaurus* thesaurus) {
  const std::string s = clean(raw);
  if (s.empty()) return std::nullopt;
  if (thesaurus) {
    if (auto r = thesaurus->period_range(s)) return r;
  }
  if (auto r = single_year(s)) return r;
  if (auto r = year_span(s)) return r;
  return century(s);
}

std::size_t YearHistogram::total_mass() const {
  std::size_t n = 0;
  for (const auto& [year, count] : counts) n += count;
  return n;
}

std::string YearHistogram::to_csv() const {
  std::ostringstream out;
  out << "year,count\n";
  for (const auto& [year, count] : counts) out << year << ',' << count << '\n';
  return out.str();
}

YearHistogram year_histogram(const std::vector<YearRange>& ranges, int floor_year) {
  YearHistogram h;
  h.floor_year = floor_year;
  for (const auto& r : ranges) {
    for (int y = std::max(r.start, floor_year); y <= r.end; ++y) ++h.counts[y];
  }
  return h;
}

std::map<EntityType, EntityTypeStats> entity_stats(const std::vector<EntitySpan>& spans,
                                                   std::size_t top_n) {
  std::map<EntityType, std::map<std::string, std::size_t>> freq;
  for (auto t : kEntityTypes) freq[t];
  for (const auto& s : spans) ++freq[s.type][s.surface];

  std::map<EntityType, EntityTypeStats> out;
  for (const auto& [type, counts] : freq) {
    EntityTypeStats st;
    st.unique = counts.size();
    for (const auto& [surface, n] : counts) {
      st.total += n;
      st.top.emplace_back(surface, n);
    }
    std::stable_sort(st.top.begin(), st.top.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (st.top.size() > top_n) st.top.resize(top_n);
    out[type] = std::move(st);
  }
  return out;
}

std::string entity_stats_csv(const std::map<EntityType, EntityTypeStats>& stats) {
  std::ostringstream out;
  out << "type,total,unique,top\n";
  for (const auto& [type, st] : stats) {
    out << to_string(type) << ',' << st.total << ',' << st.unique << ',';
    for (std::size_t i = 0; i < st.top.size(); ++i) {
      if (i) out << "; ";
      out << st.top[i].first;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace archner::chrono
