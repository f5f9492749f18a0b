#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "archner/bio.hpp"
#include "archner/corpus.hpp"
#include "archner/gazetteer.hpp"

namespace archner::pipeline {

/// Which feature templates to emit. With every toggle off and no
/// prediction sources only the bias feature remains.
struct FeatureTemplateConfig {
  int window = 5;  ///< odd; two tokens either side by default
  bool use_words = true;
  bool use_shape = true;
  bool use_pos = true;
  bool use_thesaurus = true;
  std::vector<std::string> prediction_sources;

  int half_window() const { return window / 2; }
  bool any_baseline() const { return use_words || use_shape || use_pos || use_thesaurus; }
  /// Throws archner::Error when the window is even or < 1.
  void validate() const;

  friend bool operator==(const FeatureTemplateConfig&, const FeatureTemplateConfig&) = default;
};

/// Character-class pattern: X upper, x lower, 9 digit, anything else kept
/// as itself; runs of the same symbol collapse ("Swifterbant" -> "Xx").
std::string word_shape(std::string_view word);
bool is_punctuation(std::string_view word);

using TokenFeatures = std::vector<std::string>;

/// Windowed word, shape, POS and thesaurus features, named `<kind>@<offset>=<value>`.
/// Offsets past either sentence edge produce `BOS@<offset>` / `EOS@<offset>`.
/// `thesaurus` may be null when use_thesaurus is off.
std::vector<TokenFeatures> extract_baseline_features(const Sentence& sentence,
                                                     const FeatureTemplateConfig& config,
                                                     const Thesaurus* thesaurus);

/// Model name -> that model's labels for one sentence.
using SentencePredictions = std::map<std::string, std::vector<BioLabel>>;

/// Baseline features (when any baseline toggle is on) plus windowed
/// `pred:<model>@<offset>=<label>` features for each configured source.
std::vector<TokenFeatures> stack_features(const FeatureTemplateConfig& config,
                                          const Sentence& sentence,
                                          const SentencePredictions& predictions,
                                          const Thesaurus* thesaurus);

}  // namespace archner::pipeline
