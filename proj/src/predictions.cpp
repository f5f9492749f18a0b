#include "archner/predictions.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "archner/error.hpp"

namespace archner::pipeline {

PredictionSet PredictionSet::subset(const std::vector<std::size_t>& doc_indices) const {
  PredictionSet out{model_name, {}};
  for (auto d : doc_indices) out.labels.push_back(labels.at(d));
  return out;
}

PredictionSet ingest_predictions(const std::vector<TaggedDocument>& corpus, std::istream& file,
                                 const std::string& model_name) {
  return ingest_predictions(corpus, read_conll_file(file), model_name);
}

PredictionSet ingest_predictions(const std::vector<TaggedDocument>& corpus,
                                 const ConllFile& file, const std::string& model_name) {
  if (!file.predictions) {
    throw Error("prediction file for '" + model_name + "' lacks a fourth (prediction) column");
  }
  struct Flat {
    const std::string* surface;
    BioLabel label;
  };
  std::vector<Flat> flat;
  for (std::size_t d = 0; d < file.docs.size(); ++d)
    for (std::size_t s = 0; s < file.docs[d].sentences.size(); ++s)
      for (std::size_t t = 0; t < file.docs[d].sentences[s].size(); ++t)
        flat.push_back({&file.docs[d].sentences[s].tokens[t].surface, (*file.predictions)[d][s][t]});

  PredictionSet out{model_name, {}};
  std::size_t k = 0;
  for (const auto& doc : corpus) {
    auto& doc_labels = out.labels.emplace_back();
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      auto& sent_labels = doc_labels.emplace_back();
      for (std::size_t t = 0; t < doc.sentences[s].size(); ++t, ++k) {
        const auto& expected = doc.sentences[s].tokens[t].surface;
        const auto where = "document " + doc.doc_id + " sentence " + std::to_string(s + 1) +
                           " token " + std::to_string(t + 1) + " (position " +
                           std::to_string(k + 1) + ")";
        if (k >= flat.size()) {
          throw Error("predictions from '" + model_name + "' end early at " + where);
        }
        if (*flat[k].surface != expected) {
          throw Error("predictions from '" + model_name + "' misaligned at " + where +
                      ": expected '" + expected + "', found '" + *flat[k].surface + "'");
        }
        sent_labels.push_back(flat[k].label);
      }
    }
  }
  if (k != flat.size()) {
    throw Error("predictions from '" + model_name + "' have " + std::to_string(flat.size() - k) +
                " extra tokens");
  }
  return out;
}

PredictionSet majority_vote(const std::vector<PredictionSet>& sets, const std::string& priority,
                            const std::string& output_name) {
  if (sets.size() != 3) throw Error("majority voting needs exactly three prediction sets");
  const auto prio_it = std::find_if(sets.begin(), sets.end(),
                                    [&](const auto& s) { return s.model_name == priority; });
  if (prio_it == sets.end()) throw Error("priority model '" + priority + "' is not among the sets");
  const auto& prio = *prio_it;
  check_shape(sets[0].labels, sets[1].labels);
  check_shape(sets[0].labels, sets[2].labels);

  PredictionSet out{output_name, sets[0].labels};
  for (std::size_t d = 0; d < out.labels.size(); ++d) {
    for (std::size_t s = 0; s < out.labels[d].size(); ++s) {
      for (std::size_t t = 0; t < out.labels[d][s].size(); ++t) {
        const auto a = sets[0].labels[d][s][t];
        const auto b = sets[1].labels[d][s][t];
        const auto c = sets[2].labels[d][s][t];
        BioLabel chosen = prio.labels[d][s][t];
        if (a == b || a == c) {
          chosen = a;
        } else if (b == c) {
          chosen = b;
        }
        out.labels[d][s][t] = chosen;
      }
    }
  }
  return out;
}

SentencePredictions sentence_predictions(const std::vector<const PredictionSet*>& sets,
                                         std::size_t doc, std::size_t sentence) {
  SentencePredictions out;
  for (const auto* set : sets) out[set->model_name] = set->labels.at(doc).at(sentence);
  return out;
}

namespace {

constexpr const char* kMulti = "multibert";
constexpr const char* kBertje = "bertje";
constexpr const char* kArcheo = "archeobertje";

FeatureTemplateConfig prediction_features(std::vector<std::string> sources, bool baseline) {
  FeatureTemplateConfig c;
  c.use_words = c.use_shape = c.use_pos = c.use_thesaurus = baseline;
  c.prediction_sources = std::move(sources);
  return c;
}

}  // namespace

std::vector<EnsemblePreset> builtin_presets() {
  const std::vector<std::string> all = {kMulti, kBertje, kArcheo};
  const std::vector<std::string> archeo = {kArcheo};
  std::vector<EnsemblePreset> out;
  out.push_back({"majority-vote", "Majority vote over the three models",
                 EnsembleStrategy::Vote, prediction_features({}, false), all, kArcheo});
  out.push_back({"crf-all-preds", "CRF over the labels of all three models",
                 EnsembleStrategy::Crf, prediction_features(all, false), all, ""});
  out.push_back({"crf-archeo-only", "CRF over the domain model's labels only",
                 EnsembleStrategy::Crf, prediction_features(archeo, false), archeo, ""});
  out.push_back({"crf-all-preds-baseline", "CRF over all three models' labels plus baseline features",
                 EnsembleStrategy::Crf, prediction_features(all, true), all, ""});
  out.push_back({"crf-archeo-baseline", "CRF over the domain model's labels plus baseline features",
                 EnsembleStrategy::Crf, prediction_features(archeo, true), archeo, ""});
  return out;
}

std::vector<EnsemblePreset> parse_presets(std::string_view json_text) {
  using nlohmann::json;
  std::vector<EnsemblePreset> out;
  try {
    const auto j = json::parse(json_text);
    for (const auto& p : j.at("presets")) {
      EnsemblePreset preset;
      preset.name = p.at("name").get<std::string>();
      preset.description = p.value("description", "");
      const auto strategy = p.at("strategy").get<std::string>();
      if (strategy == "vote") {
        preset.strategy = EnsembleStrategy::Vote;
      } else if (strategy == "crf") {
        preset.strategy = EnsembleStrategy::Crf;
      } else {
        throw Error("preset " + preset.name + ": unknown strategy '" + strategy + "'");
      }
      preset.sources = p.at("sources").get<std::vector<std::string>>();
      preset.priority = p.value("priority", "");
      const bool baseline = p.value("baseline", false);
      auto& f = preset.features;
      f.window = p.value("window", 5);
      f.use_words = f.use_shape = f.use_pos = f.use_thesaurus = baseline;
      if (preset.strategy == EnsembleStrategy::Crf) f.prediction_sources = preset.sources;
      f.validate();
      if (preset.strategy == EnsembleStrategy::Vote) {
        if (preset.sources.size() != 3) throw Error("preset " + preset.name + ": voting needs three sources");
        if (std::find(preset.sources.begin(), preset.sources.end(), preset.priority) ==
            preset.sources.end()) {
          throw Error("preset " + preset.name + ": priority must be one of the sources");
        }
      }
      out.push_back(std::move(preset));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed preset file: ") + e.what());
  }
  return out;
}

std::vector<EnsemblePreset> load_presets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_presets(ss.str());
}

const EnsemblePreset& find_preset(const std::vector<EnsemblePreset>& presets,
                                  const std::string& name) {
  for (const auto& p : presets)
    if (p.name == name) return p;
  std::string names;
  for (const auto& p : presets) names += (names.empty() ? "" : ", ") + p.name;
  throw Error("unknown preset '" + name + "' (available: " + names + ")");
}

}  // namespace archner::pipeline
