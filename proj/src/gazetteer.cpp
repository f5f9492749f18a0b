#include "archner/gazetteer.hpp"

#include <algorithm>
#include <fstream>

#include "archner/error.hpp"
#include "archner/text.hpp"

namespace archner {

std::string_view to_string(ThesaurusList list) {
  switch (list) {
    case ThesaurusList::PERIOD: return "PERIOD";
    case ThesaurusList::ARTEFACT: return "ARTEFACT";
    case ThesaurusList::MATERIAL: return "MATERIAL";
  }
  return "?";
}

std::optional<ThesaurusList> parse_thesaurus_list(std::string_view s) {
  for (auto l : kThesaurusLists) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

namespace {

int parse_year(std::string_view s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const std::string str(text::trim(s));
    const int year = std::stoi(str, &used);
    if (used != str.size()) throw std::invalid_argument("trailing characters");
    return year;
  } catch (const std::exception&) {
    throw ParseError(line_no, "invalid year '" + std::string(s) + "'");
  }
}

}  // namespace

Thesaurus Thesaurus::load(std::istream& in) {
  Thesaurus th;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto cols = text::split(line, '\t');
    const auto list = parse_thesaurus_list(text::trim(cols[0]));
    if (!list) throw ParseError(line_no, "unknown thesaurus list '" + std::string(cols[0]) + "'");
    if (cols.size() < 2 || text::trim(cols[1]).empty()) throw ParseError(line_no, "missing phrase");
    th.add(*list, cols[1]);
    if (cols.size() >= 4) {
      if (*list != ThesaurusList::PERIOD) {
        throw ParseError(line_no, "year range given for a non-PERIOD entry");
      }
      const YearRange range{parse_year(cols[2], line_no), parse_year(cols[3], line_no)};
      if (range.start > range.end) throw ParseError(line_no, "period range start after end");
      th.add_period_range(cols[1], range);
    } else if (cols.size() == 3) {
      throw ParseError(line_no, "period range needs both start and end");
    }
  }
  return th;
}

Thesaurus Thesaurus::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return load(in);
}

bool Thesaurus::add(ThesaurusList list, std::string_view phrase) {
  auto tokens = text::split_whitespace(text::to_lower(phrase));
  if (tokens.empty()) throw Error("empty thesaurus phrase");
  max_len_ = std::max(max_len_, tokens.size());
  return lists_[static_cast<std::size_t>(list)].insert(std::move(tokens)).second;
}

void Thesaurus::add_period_range(std::string_view phrase, YearRange range) {
  period_ranges_[text::normalize_phrase(phrase)] = range;
}

std::size_t Thesaurus::size() const {
  std::size_t n = 0;
  for (const auto& l : lists_) n += l.size();
  return n;
}

std::optional<YearRange> Thesaurus::period_range(std::string_view phrase) const {
  const auto it = period_ranges_.find(text::normalize_phrase(phrase));
  if (it == period_ranges_.end()) return std::nullopt;
  return it->second;
}

std::vector<ListFlags> Thesaurus::membership_features(const std::vector<std::string>& sentence) const {
  std::vector<ListFlags> flags(sentence.size(), ListFlags{});
  std::vector<std::string> lowered;
  lowered.reserve(sentence.size());
  for (const auto& s : sentence) lowered.push_back(text::to_lower(s));

  Phrase window;
  for (std::size_t i = 0; i < lowered.size(); ++i) {
    window.clear();
    for (std::size_t n = 1; n <= max_len_ && i + n <= lowered.size(); ++n) {
      window.push_back(lowered[i + n - 1]);
      for (std::size_t l = 0; l < lists_.size(); ++l) {
        if (lists_[l].count(window) == 0) continue;
        for (std::size_t j = i; j < i + n; ++j) flags[j][l] = true;
      }
    }
  }
  return flags;
}

}  // namespace archner
