#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

#include "archner/corpus.hpp"
#include "archner/features.hpp"

namespace archner::pipeline {

/// One external model's labels, shaped exactly like a reference corpus.
struct PredictionSet {
  std::string model_name;
  DocLabels labels;

  /// Labels of the given documents, in the given order.
  PredictionSet subset(const std::vector<std::size_t>& doc_indices) const;
};

/// Aligns a prediction file (CoNLL, prediction in column 4; columns 5+
/// ignored) with `corpus` token by token. Document and sentence breaks in
/// the file are ignored; surfaces must match exactly and in order. Labels are
/// kept verbatim, including invalid BIO transitions.
PredictionSet ingest_predictions(const std::vector<TaggedDocument>& corpus, std::istream& file,
                                 const std::string& model_name);
PredictionSet ingest_predictions(const std::vector<TaggedDocument>& corpus,
                                 const ConllFile& file, const std::string& model_name);

/// Per-token majority over three prediction sets; when all three disagree the
/// label of `priority` wins.
PredictionSet majority_vote(const std::vector<PredictionSet>& sets, const std::string& priority,
                            const std::string& output_name = "majority-vote");

/// Predictions of the named sources for one sentence.
SentencePredictions sentence_predictions(const std::vector<const PredictionSet*>& sets,
                                         std::size_t doc, std::size_t sentence);

enum class EnsembleStrategy { Vote, Crf };

/// A named ensemble: majority voting over prediction sets, or a CRF over
/// prediction features with or without the baseline features.
struct EnsemblePreset {
  std::string name;
  std::string description;
  EnsembleStrategy strategy = EnsembleStrategy::Crf;
  FeatureTemplateConfig features;
  std::vector<std::string> sources;  ///< prediction sets consumed
  std::string priority;              ///< vote tie-breaker
};

/// The five built-in presets.
std::vector<EnsemblePreset> builtin_presets();
/// Reads presets from a JSON config file.
std::vector<EnsemblePreset> load_presets(const std::string& path);
std::vector<EnsemblePreset> parse_presets(std::string_view json_text);
const EnsemblePreset& find_preset(const std::vector<EnsemblePreset>& presets,
                                  const std::string& name);

}  // namespace archner::pipeline
