#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "archner/corpus.hpp"
#include "archner/crf.hpp"
#include "archner/features.hpp"
#include "archner/gazetteer.hpp"
#include "archner/predictions.hpp"

namespace archner::pipeline {

/// Feature names and CRF instances for a corpus. Sentences are flattened in
/// document order.
struct EncodedCorpus {
  std::vector<std::string> feature_names;
  std::vector<crf::Instance> instances;
};

/// Interns every feature seen at least `min_feature_count` times, in order of
/// first occurrence. Gold labels are required.
EncodedCorpus encode_for_training(const std::vector<TaggedDocument>& docs,
                                  const FeatureTemplateConfig& config, const Thesaurus* thesaurus,
                                  const std::vector<const PredictionSet*>& predictions,
                                  std::size_t min_feature_count = 1);

/// A feature configuration bundled with the CRF trained on it.
struct Tagger {
  FeatureTemplateConfig config;
  crf::CrfModel model;

  /// Viterbi labels for every sentence. Features unknown to the model are
  /// dropped.
  DocLabels predict(const std::vector<TaggedDocument>& docs, const Thesaurus* thesaurus,
                    const std::vector<const PredictionSet*>& predictions) const;

  std::string to_json() const;
  static Tagger from_json(std::string_view json_text);
  void save(const std::string& path) const;
  static Tagger load(const std::string& path);
};

Tagger train_tagger(const std::vector<TaggedDocument>& docs, const FeatureTemplateConfig& config,
                    const Thesaurus* thesaurus,
                    const std::vector<const PredictionSet*>& predictions,
                    const crf::CrfHyperparams& hyper, crf::TrainingReport* report = nullptr,
                    std::size_t min_feature_count = 1);

struct CrossValidationOptions {
  crf::CrfHyperparams hyper;
  /// When non-empty, c1/c2 are tuned per fold on an inner development fold.
  std::vector<std::pair<double, double>> grid;
  std::size_t min_feature_count = 1;
};

struct CrossValidationResult {
  DocLabels predictions;  ///< out-of-fold labels for every document
  std::vector<crf::CrfHyperparams> fold_hyper;
};

/// Trains on k-1 folds and labels the held-out fold, for every fold.
CrossValidationResult cross_validate(const std::vector<TaggedDocument>& docs, const FoldSplit& folds,
                                     const FeatureTemplateConfig& config,
                                     const Thesaurus* thesaurus,
                                     const std::vector<PredictionSet>& predictions,
                                     const CrossValidationOptions& options);

}  // namespace archner::pipeline
