#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "archner/year_range.hpp"

namespace archner {

enum class ThesaurusList : unsigned char { PERIOD, ARTEFACT, MATERIAL };

inline constexpr std::array<ThesaurusList, 3> kThesaurusLists = {
    ThesaurusList::PERIOD, ThesaurusList::ARTEFACT, ThesaurusList::MATERIAL};

std::string_view to_string(ThesaurusList list);
std::optional<ThesaurusList> parse_thesaurus_list(std::string_view s);

/// Per-token flags, indexed by ThesaurusList.
using ListFlags = std::array<bool, kThesaurusLists.size()>;

/// Domain thesaurus of period, artefact and material phrases. Phrases are
/// stored lowercased and whitespace-tokenized.
class Thesaurus {
 public:
  using Phrase = std::vector<std::string>;

  /// Reads `LIST<TAB>phrase[<TAB>start<TAB>end]` lines; `#` starts a comment.
  static Thesaurus load(std::istream& in);
  static Thesaurus load(const std::string& path);

  /// Adds a phrase (lowercased and tokenized here). Returns false for
  /// duplicates.
  bool add(ThesaurusList list, std::string_view phrase);
  void add_period_range(std::string_view phrase, YearRange range);

  const std::set<Phrase>& phrases(ThesaurusList list) const {
    return lists_[static_cast<std::size_t>(list)];
  }
  std::size_t max_phrase_length() const { return max_len_; }
  std::size_t size() const;

  /// Case-insensitive lookup of a period name.
  std::optional<YearRange> period_range(std::string_view phrase) const;
  const std::map<std::string, YearRange>& period_ranges() const { return period_ranges_; }

  /// A token is flagged for a list when it lies inside any contiguous,
  /// case-insensitive occurrence of one of that list's phrases.
  std::vector<ListFlags> membership_features(const std::vector<std::string>& sentence) const;

 private:
  std::array<std::set<Phrase>, kThesaurusLists.size()> lists_;
  std::map<std::string, YearRange> period_ranges_;
  std::size_t max_len_ = 0;
};

}  // namespace archner
