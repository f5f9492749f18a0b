#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "archner/corpus.hpp"
#include "archner/error.hpp"
#include "archner/eval.hpp"
#include "archner/features.hpp"
#include "archner/gazetteer.hpp"
#include "archner/predictions.hpp"
#include "archner/spans.hpp"
#include "archner/tagger.hpp"
#include "archner/text.hpp"
#include "support/golden.hpp"
#include "support/oracles.hpp"

using namespace archner;
using namespace archner::pipeline;

namespace {

Sentence make_sentence(const std::vector<std::string>& words, const std::vector<std::string>& pos = {}) {
  Sentence s;
  for (std::size_t i = 0; i < words.size(); ++i) {
    s.tokens.push_back({words[i], pos.empty() ? "X" : pos[i], BioLabel::outside()});
  }
  return s;
}

bool contains(const TokenFeatures& f, const std::string& name) {
  return std::find(f.begin(), f.end(), name) != f.end();
}

std::vector<TaggedDocument> fixture() { return load_conll(ARCHNER_DATA_DIR "/fixture_corpus.conll"); }

const Thesaurus& thesaurus() {
  static const auto t = Thesaurus::load(ARCHNER_DATA_DIR "/thesaurus.tsv");
  return t;
}

/// Copies a label structure, replacing each label with `f(label)`.
template <typename F>
DocLabels map_labels(const DocLabels& in, F f) {
  auto out = in;
  for (auto& d : out)
    for (auto& s : d)
      for (auto& l : s) l = f(l);
  return out;
}

std::string prediction_file(const std::vector<TaggedDocument>& docs, const DocLabels& labels) {
  return write_conll(docs, &labels);
}

PredictionSet random_set(oracle::Rng& rng, const DocLabels& shape, const std::string& name) {
  return {name, map_labels(shape, [&](BioLabel) { return oracle::random_label_sequence(rng, 1)[0]; })};
}

}  // namespace

TEST_CASE("word shapes") {
  CHECK(word_shape("Swifterbant") == "Xx");
  CHECK(word_shape("150-210") == "9-9");
  CHECK(word_shape("B.V.") == "X.X.");
  CHECK(word_shape("AD") == "X");
  CHECK(word_shape("µm") == "x");
  CHECK(word_shape("Éénmaal") == "Xx");
  CHECK(word_shape("14C") == "9X");
  CHECK(word_shape("") == "");
  CHECK(is_punctuation("."));
  CHECK(is_punctuation("--"));
  CHECK_FALSE(is_punctuation("a."));
  CHECK_FALSE(is_punctuation(""));
}

TEST_CASE("windowed features mark sentence edges") {
  FeatureTemplateConfig config;
  config.use_thesaurus = false;
  const auto f = extract_baseline_features(make_sentence({"In", "Swifterbant", "1998"}, {"ADP", "PROPN", "NUM"}),
                                           config, nullptr);
  REQUIRE(f.size() == 3);
  CHECK(contains(f[0], "bias"));
  CHECK(contains(f[0], "BOS@-2"));
  CHECK(contains(f[0], "BOS@-1"));
  CHECK(contains(f[0], "w@0=in"));
  CHECK(contains(f[0], "w@1=swifterbant"));
  CHECK(contains(f[0], "shape@1=Xx"));
  CHECK(contains(f[0], "pos@2=NUM"));
  CHECK(contains(f[0], "digit@2"));
  CHECK_FALSE(contains(f[0], "EOS@2"));
  CHECK(contains(f[2], "EOS@1"));
  CHECK(contains(f[2], "EOS@2"));
  CHECK(contains(f[2], "shape@0=9"));
  CHECK(contains(f[1], "upper@0"));

  config.window = 1;
  const auto narrow = extract_baseline_features(make_sentence({"a", "b"}), config, nullptr);
  for (const auto& name : narrow[0]) CHECK(name.find("@1") == std::string::npos);

  config.window = 4;
  CHECK_THROWS_AS(extract_baseline_features(make_sentence({"a"}), config, nullptr), Error);
  config.window = 5;
  config.use_thesaurus = true;
  CHECK_THROWS_AS(extract_baseline_features(make_sentence({"a"}), config, nullptr), Error);
}

TEST_CASE("thesaurus features follow phrase membership") {
  FeatureTemplateConfig config;
  config.window = 1;
  const auto f = extract_baseline_features(make_sentence({"late", "bronze", "age", "bijl"}), config, &thesaurus());
  CHECK(contains(f[1], "thes@0=PERIOD"));
  CHECK(contains(f[2], "thes@0=PERIOD"));
  CHECK(contains(f[3], "thes@0=ARTEFACT"));
  CHECK_FALSE(contains(f[3], "thes@0=PERIOD"));
}

TEST_CASE("with every template off only the bias remains") {
  FeatureTemplateConfig config;
  config.use_words = config.use_shape = config.use_pos = config.use_thesaurus = false;
  for (const auto& f : extract_baseline_features(make_sentence({"a", "b", "c"}), config, nullptr)) {
    CHECK(f == TokenFeatures{"bias"});
  }
}

TEST_CASE("feature names for the first fixture sentence") {
  const auto docs = fixture();
  FeatureTemplateConfig config;
  const auto feats = extract_baseline_features(docs[0].sentences[0], config, &thesaurus());
  std::string dump;
  for (std::size_t i = 0; i < feats.size(); ++i) {
    dump += docs[0].sentences[0].tokens[i].surface + "\t" + text::join(feats[i], " ") + "\n";
  }
  CHECK(dump == golden::expect("features_sentence1.txt", dump));
}

TEST_CASE("stacked prediction features") {
  FeatureTemplateConfig config;
  config.use_words = config.use_shape = config.use_pos = config.use_thesaurus = false;
  config.window = 3;
  config.prediction_sources = {"bertje"};
  const auto s = make_sentence({"een", "bijl"});
  SentencePredictions preds = {{"bertje", {BioLabel::outside(), BioLabel::begin(EntityType::ART)}},
                               {"multibert", {BioLabel::outside(), BioLabel::outside()}}};
  const auto f = stack_features(config, s, preds, nullptr);
  CHECK(f[0] == TokenFeatures{"bias", "pred:bertje@-1=BOS", "pred:bertje@0=O", "pred:bertje@1=B-ART"});
  CHECK(f[1] == TokenFeatures{"bias", "pred:bertje@-1=O", "pred:bertje@0=B-ART", "pred:bertje@1=EOS"});

  config.prediction_sources = {"archeobertje"};
  CHECK_THROWS_AS(stack_features(config, s, preds, nullptr), Error);
  config.prediction_sources = {"bertje"};
  preds["bertje"].pop_back();
  CHECK_THROWS_AS(stack_features(config, s, preds, nullptr), Error);

  config.use_words = true;
  preds["bertje"].push_back(BioLabel::outside());
  const auto both = stack_features(config, s, preds, nullptr);
  CHECK(contains(both[0], "w@0=een"));
  CHECK(contains(both[0], "pred:bertje@0=O"));
}

TEST_CASE("prediction files align token by token") {
  const auto docs = fixture();
  const auto gold = gold_labels(docs);
  // A shifted label set keeps invalid transitions verbatim.
  const auto shifted = map_labels(gold, [](BioLabel l) {
    return l.is_outside() ? l : BioLabel::inside(*l.type());
  });
  std::istringstream file(prediction_file(docs, shifted));
  const auto set = ingest_predictions(docs, file, "bertje");
  CHECK(set.model_name == "bertje");
  CHECK(set.labels == shifted);

  std::istringstream no_column(write_conll(docs));
  CHECK_THROWS_WITH_AS(ingest_predictions(docs, no_column, "bertje"), doctest::Contains("fourth"), Error);

  auto altered = docs;
  altered[1].sentences[0].tokens[2].surface = "zzz";
  std::istringstream misaligned(prediction_file(altered, gold));
  CHECK_THROWS_WITH_AS(ingest_predictions(docs, misaligned, "bertje"), doctest::Contains("misaligned"), Error);

  auto shorter = docs;
  shorter.pop_back();
  auto shorter_gold = gold;
  shorter_gold.pop_back();
  std::istringstream early(prediction_file(shorter, shorter_gold));
  CHECK_THROWS_WITH_AS(ingest_predictions(docs, early, "bertje"), doctest::Contains("end early"), Error);
  std::istringstream extra(prediction_file(docs, gold));
  CHECK_THROWS_WITH_AS(ingest_predictions(shorter, extra, "bertje"), doctest::Contains("extra"), Error);
}

TEST_CASE("majority vote equals the per-token oracle") {
  const auto shape = gold_labels(fixture());
  oracle::Rng rng(12);
  const std::vector<std::string> names = {"multibert", "bertje", "archeobertje"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PredictionSet> sets;
    for (const auto& n : names) sets.push_back(random_set(rng, shape, n));
    const auto& prio = oracle::pick(rng, names);
    const std::size_t p = static_cast<std::size_t>(std::find(names.begin(), names.end(), prio) - names.begin());
    const auto voted = majority_vote(sets, prio);
    CHECK(voted.model_name == "majority-vote");
    for (std::size_t d = 0; d < shape.size(); ++d)
      for (std::size_t s = 0; s < shape[d].size(); ++s)
        for (std::size_t t = 0; t < shape[d][s].size(); ++t) {
          const std::vector<BioLabel> three = {sets[0].labels[d][s][t], sets[1].labels[d][s][t],
                                               sets[2].labels[d][s][t]};
          CHECK(voted.labels[d][s][t] == oracle::vote(three, p));
        }
  }
  const auto one = random_set(rng, shape, "multibert");
  CHECK_THROWS_AS(majority_vote({one, one}, "multibert"), Error);
  CHECK_THROWS_AS(majority_vote({one, one, one}, "bertje"), Error);
}

TEST_CASE("vote examples") {
  const auto L = BioLabel::begin(EntityType::LOC);
  const auto A = BioLabel::begin(EntityType::ART);
  const auto O = BioLabel::outside();
  auto set = [](std::string name, BioLabel l) { return PredictionSet{std::move(name), {{{l}}}}; };
  CHECK(majority_vote({set("a", L), set("b", L), set("c", A)}, "c").labels[0][0][0] == L);
  CHECK(majority_vote({set("a", L), set("b", O), set("c", A)}, "c").labels[0][0][0] == A);
  CHECK(majority_vote({set("a", L), set("b", O), set("c", A)}, "a").labels[0][0][0] == L);
}

TEST_CASE("bio_repair examples") {
  const auto O = BioLabel::outside();
  const auto BA = BioLabel::begin(EntityType::ART);
  const auto IA = BioLabel::inside(EntityType::ART);
  const auto IL = BioLabel::inside(EntityType::LOC);
  const auto BL = BioLabel::begin(EntityType::LOC);
  CHECK(bio_repair({IA}) == std::vector<BioLabel>{BA});
  CHECK(bio_repair({O, IA, IA}) == std::vector<BioLabel>{O, BA, IA});
  CHECK(bio_repair({BA, IL}) == std::vector<BioLabel>{BA, BL});
  CHECK(bio_repair({BA, IA, O}) == std::vector<BioLabel>{BA, IA, O});
  CHECK(bio_repair({}).empty());
}

TEST_CASE("bio_repair output is valid and changes only orphan I labels") {
  oracle::Rng rng(13);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto in = oracle::random_label_sequence(rng, static_cast<std::size_t>(oracle::uniform_int(rng, 0, 12)));
    const auto out = bio_repair(in);
    REQUIRE(out.size() == in.size());
    CHECK(is_valid_sequence(out));
    std::size_t changed = 0;
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (in[i] == out[i]) continue;
      ++changed;
      CHECK(in[i].tag() == Tag::I);
      CHECK(out[i] == BioLabel::begin(*in[i].type()));
    }
    CHECK(changed == count_orphan_inside(in));
    CHECK(bio_repair(out) == out);
  }
}

TEST_CASE("span extraction") {
  const auto BA = BioLabel::begin(EntityType::ART);
  const auto IA = BioLabel::inside(EntityType::ART);
  const auto BP = BioLabel::begin(EntityType::PER);
  const auto O = BioLabel::outside();
  const auto spans = extract_spans({BA, IA, BA, O, BP}, {"Bronze", "Axe", "urn", "of", "IJzertijd"});
  REQUIRE(spans.size() == 3);
  CHECK(spans[0] == EntitySpan{EntityType::ART, 0, 2, "bronze axe"});
  CHECK(spans[1] == EntitySpan{EntityType::ART, 2, 3, "urn"});
  CHECK(spans[2] == EntitySpan{EntityType::PER, 4, 5, "ijzertijd"});
  CHECK_THROWS_AS(extract_spans({O, IA}, {"a", "b"}), Error);
  CHECK_THROWS_AS(extract_spans({O}, {"a", "b"}), Error);

  oracle::Rng rng(14);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<std::size_t>(oracle::uniform_int(rng, 0, 10));
    const auto labels = bio_repair(oracle::random_label_sequence(rng, n));
    const auto found = extract_spans(labels, std::vector<std::string>(n, "w"));
    CHECK(render_spans(found, n) == labels);
    for (const auto& s : found) CHECK(labels[s.start] == BioLabel::begin(s.type));
  }
}

TEST_CASE("the shipped preset file matches the built-in presets") {
  const auto file = load_presets(ARCHNER_CONFIG_DIR "/ensembles.json");
  const auto builtin = builtin_presets();
  REQUIRE(file.size() == builtin.size());
  REQUIRE(builtin.size() == 5);
  for (std::size_t i = 0; i < file.size(); ++i) {
    CHECK(file[i].name == builtin[i].name);
    CHECK(file[i].strategy == builtin[i].strategy);
    CHECK(file[i].features == builtin[i].features);
    CHECK(file[i].sources == builtin[i].sources);
    CHECK(file[i].priority == builtin[i].priority);
  }
  CHECK(find_preset(builtin, "crf-archeo-only").sources == std::vector<std::string>{"archeobertje"});
  CHECK_THROWS_WITH_AS(find_preset(builtin, "nope"), doctest::Contains("available"), Error);
  CHECK_THROWS_AS(parse_presets(R"({"presets":[{"name":"x","strategy":"magic"}]})"), Error);
  CHECK_THROWS_AS(parse_presets("not json"), Error);
}

TEST_CASE("feature interning honours the minimum count") {
  const auto docs = fixture();
  FeatureTemplateConfig config;
  config.use_thesaurus = false;
  const auto all = encode_for_training(docs, config, nullptr, {}, 1);
  const auto common = encode_for_training(docs, config, nullptr, {}, 3);
  CHECK(common.feature_names.size() < all.feature_names.size());
  CHECK(all.feature_names[0] == "bias");
  std::size_t tokens = 0;
  for (const auto& inst : all.instances) tokens += inst.y.size();
  std::size_t expected = 0;
  for (const auto& d : docs) expected += d.token_count();
  CHECK(tokens == expected);
}

TEST_CASE("a trained tagger fits its training data and survives a round trip") {
  const auto docs = fixture();
  FeatureTemplateConfig config;
  crf::CrfHyperparams hyper;
  hyper.c2 = 0.01;
  const auto tagger = train_tagger(docs, config, &thesaurus(), {}, hyper);
  const auto pred = tagger.predict(docs, &thesaurus(), {});
  CHECK(eval::score(gold_labels(docs), pred).micro.f1 >= 0.95);

  const auto path = std::filesystem::temp_directory_path() / "archner_test_tagger.json";
  tagger.save(path.string());
  const auto back = Tagger::load(path.string());
  std::filesystem::remove(path);
  CHECK(back.config == tagger.config);
  CHECK(back.predict(docs, &thesaurus(), {}) == pred);
}

TEST_CASE("a stacked tagger learns to copy a perfect source") {
  const auto docs = fixture();
  const PredictionSet perfect{"archeobertje", gold_labels(docs)};
  const auto preset = find_preset(builtin_presets(), "crf-archeo-only");
  const auto folds = make_folds(docs, 5);
  CrossValidationOptions options;
  const auto cv = cross_validate(docs, folds, preset.features, nullptr, {perfect}, options);
  CHECK(cv.fold_hyper.size() == 5);
  check_shape(docs, cv.predictions);
  CHECK(eval::score(gold_labels(docs), cv.predictions).micro.f1 >= 0.9);
}
