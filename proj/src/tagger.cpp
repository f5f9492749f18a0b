#include "archner/tagger.hpp"

#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "archner/error.hpp"

namespace archner::pipeline {

using nlohmann::json;

namespace {

constexpr std::string_view kFormat = "archner-tagger/1";

template <typename Fn>
void for_each_sentence_features(const std::vector<TaggedDocument>& docs,
                                const FeatureTemplateConfig& config, const Thesaurus* thesaurus,
                                const std::vector<const PredictionSet*>& predictions, Fn&& fn) {
  for (const auto* p : predictions) check_shape(docs, p->labels);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (std::size_t s = 0; s < docs[d].sentences.size(); ++s) {
      const auto& sentence = docs[d].sentences[s];
      const auto preds = sentence_predictions(predictions, d, s);
      fn(sentence, stack_features(config, sentence, preds, thesaurus));
    }
  }
}

std::vector<std::size_t> label_indices(const Sentence& sentence) {
  std::vector<std::size_t> y;
  for (const auto& l : sentence.gold_labels()) y.push_back(l.index());
  return y;
}

json config_to_json(const FeatureTemplateConfig& c) {
  return {{"window", c.window},           {"use_words", c.use_words},
          {"use_shape", c.use_shape},     {"use_pos", c.use_pos},
          {"use_thesaurus", c.use_thesaurus}, {"prediction_sources", c.prediction_sources}};
}

FeatureTemplateConfig config_from_json(const json& j) {
  FeatureTemplateConfig c;
  c.window = j.at("window").get<int>();
  c.use_words = j.at("use_words").get<bool>();
  c.use_shape = j.at("use_shape").get<bool>();
  c.use_pos = j.at("use_pos").get<bool>();
  c.use_thesaurus = j.at("use_thesaurus").get<bool>();
  c.prediction_sources = j.at("prediction_sources").get<std::vector<std::string>>();
  c.validate();
  return c;
}

}  // namespace

EncodedCorpus encode_for_training(const std::vector<TaggedDocument>& docs,
                                  const FeatureTemplateConfig& config, const Thesaurus* thesaurus,
                                  const std::vector<const PredictionSet*>& predictions,
                                  std::size_t min_feature_count) {
  std::unordered_map<std::string, std::size_t> counts;
  if (min_feature_count > 1) {
    for_each_sentence_features(docs, config, thesaurus, predictions,
                               [&](const Sentence&, const std::vector<TokenFeatures>& feats) {
                                 for (const auto& tf : feats)
                                   for (const auto& f : tf) ++counts[f];
                               });
  }

  EncodedCorpus out;
  std::unordered_map<std::string, std::uint32_t> ids;
  for_each_sentence_features(
      docs, config, thesaurus, predictions,
      [&](const Sentence& sentence, const std::vector<TokenFeatures>& feats) {
        crf::Instance inst;
        inst.y = label_indices(sentence);
        for (const auto& tf : feats) {
          auto& fv = inst.x.emplace_back();
          for (const auto& f : tf) {
            if (min_feature_count > 1 && counts[f] < min_feature_count) continue;
            auto [it, inserted] = ids.try_emplace(f, static_cast<std::uint32_t>(out.feature_names.size()));
            if (inserted) out.feature_names.push_back(f);
            fv.push_back(it->second);
          }
        }
        out.instances.push_back(std::move(inst));
      });
  return out;
}

DocLabels Tagger::predict(const std::vector<TaggedDocument>& docs, const Thesaurus* thesaurus,
                          const std::vector<const PredictionSet*>& predictions) const {
  DocLabels out;
  std::size_t d = 0;
  for (const auto& doc : docs) {
    auto& doc_labels = out.emplace_back();
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      const auto& sentence = doc.sentences[s];
      const auto preds = sentence_predictions(predictions, d, s);
      const auto feats = stack_features(config, sentence, preds, thesaurus);
      crf::Observation x;
      for (const auto& tf : feats) {
        auto& fv = x.emplace_back();
        for (const auto& f : tf)
          if (auto id = model.feature_id(f)) fv.push_back(*id);
      }
      auto& labels = doc_labels.emplace_back();
      for (auto y : crf::viterbi(model, x).labels) labels.push_back(model.labels()[y]);
    }
    ++d;
  }
  return out;
}

std::string Tagger::to_json() const {
  json j;
  j["format"] = kFormat;
  j["features"] = config_to_json(config);
  j["crf"] = json::parse(model.to_json());
  return j.dump(1);
}

Tagger Tagger::from_json(std::string_view text) {
  try {
    const auto j = json::parse(text);
    if (j.at("format").get<std::string>() != kFormat) {
      throw Error("unsupported tagger format " + j.at("format").get<std::string>());
    }
    return Tagger{config_from_json(j.at("features")), crf::CrfModel::from_json(j.at("crf").dump())};
  } catch (const json::exception& e) {
    throw Error(std::string("malformed tagger file: ") + e.what());
  }
}

void Tagger::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << to_json() << '\n';
}

Tagger Tagger::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

Tagger train_tagger(const std::vector<TaggedDocument>& docs, const FeatureTemplateConfig& config,
                    const Thesaurus* thesaurus,
                    const std::vector<const PredictionSet*>& predictions,
                    const crf::CrfHyperparams& hyper, crf::TrainingReport* report,
                    std::size_t min_feature_count) {
  auto enc = encode_for_training(docs, config, thesaurus, predictions, min_feature_count);
  auto model = crf::train(all_labels(), std::move(enc.feature_names), enc.instances, hyper, report);
  return Tagger{config, std::move(model)};
}

namespace {

struct FoldData {
  std::vector<TaggedDocument> docs;
  std::vector<std::size_t> indices;
  std::vector<PredictionSet> preds;

  std::vector<const PredictionSet*> pointers() const {
    std::vector<const PredictionSet*> out;
    for (const auto& p : preds) out.push_back(&p);
    return out;
  }
};

FoldData gather(const std::vector<TaggedDocument>& docs, const std::vector<PredictionSet>& preds,
                const FoldSplit& folds, const std::function<bool(std::size_t)>& keep) {
  FoldData out;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (!keep(folds.fold_of_doc.at(docs[d].doc_id))) continue;
    out.docs.push_back(docs[d]);
    out.indices.push_back(d);
  }
  for (const auto& p : preds) out.preds.push_back(p.subset(out.indices));
  return out;
}

}  // namespace

CrossValidationResult cross_validate(const std::vector<TaggedDocument>& docs, const FoldSplit& folds,
                                     const FeatureTemplateConfig& config,
                                     const Thesaurus* thesaurus,
                                     const std::vector<PredictionSet>& predictions,
                                     const CrossValidationOptions& options) {
  if (folds.k < 2) throw Error("cross-validation needs at least two folds");
  for (const auto& d : docs) {
    if (folds.fold_of_doc.count(d.doc_id) == 0) throw Error("document " + d.doc_id + " has no fold");
  }
  for (const auto& p : predictions) check_shape(docs, p.labels);

  CrossValidationResult result;
  result.predictions.resize(docs.size());
  for (std::size_t fold = 0; fold < folds.k; ++fold) {
    const auto test = gather(docs, predictions, folds, [&](std::size_t f) { return f == fold; });
    if (test.docs.empty()) continue;
    const auto train = gather(docs, predictions, folds, [&](std::size_t f) { return f != fold; });

    crf::CrfHyperparams hyper = options.hyper;
    if (!options.grid.empty()) {
      const std::size_t dev_fold = (fold + 1) % folds.k;
      const auto inner = gather(docs, predictions, folds,
                                [&](std::size_t f) { return f != fold && f != dev_fold; });
      const auto dev = gather(docs, predictions, folds, [&](std::size_t f) { return f == dev_fold; });
      auto enc = encode_for_training(inner.docs, config, thesaurus, inner.pointers(),
                                     options.min_feature_count);
      // Dev sentences reuse the inner feature table; unseen features are dropped.
      std::unordered_map<std::string, std::uint32_t> ids;
      for (std::size_t i = 0; i < enc.feature_names.size(); ++i)
        ids.emplace(enc.feature_names[i], static_cast<std::uint32_t>(i));
      std::vector<crf::Instance> dev_instances;
      const auto dev_ptrs = dev.pointers();
      for (std::size_t d = 0; d < dev.docs.size(); ++d) {
        for (std::size_t s = 0; s < dev.docs[d].sentences.size(); ++s) {
          const auto& sentence = dev.docs[d].sentences[s];
          const auto feats =
              stack_features(config, sentence, sentence_predictions(dev_ptrs, d, s), thesaurus);
          crf::Instance inst;
          inst.y = label_indices(sentence);
          for (const auto& tf : feats) {
            auto& fv = inst.x.emplace_back();
            for (const auto& f : tf) {
              const auto it = ids.find(f);
              if (it != ids.end()) fv.push_back(it->second);
            }
          }
          dev_instances.push_back(std::move(inst));
        }
      }
      hyper = crf::tune_c1_c2(all_labels(), enc.feature_names, enc.instances, dev_instances,
                              options.grid, options.hyper)
                  .best;
    }
    result.fold_hyper.push_back(hyper);

    const auto tagger = train_tagger(train.docs, config, thesaurus, train.pointers(), hyper,
                                     nullptr, options.min_feature_count);
    auto labels = tagger.predict(test.docs, thesaurus, test.pointers());
    for (std::size_t i = 0; i < test.indices.size(); ++i) {
      result.predictions[test.indices[i]] = std::move(labels[i]);
    }
  }
  return result;
}

}  // namespace archner::pipeline
