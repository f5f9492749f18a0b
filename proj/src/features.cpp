#include "archner/features.hpp"

#include "archner/error.hpp"
#include "archner/text.hpp"

namespace archner::pipeline {

void FeatureTemplateConfig::validate() const {
  if (window < 1 || window % 2 == 0) {
    throw Error("feature window must be odd and >= 1, got " + std::to_string(window));
  }
}

std::string word_shape(std::string_view word) {
  std::string out;
  std::string last;
  for (std::size_t pos = 0; pos < word.size();) {
    const std::size_t start = pos;
    const char32_t cp = text::next_code_point(word, pos);
    std::string cls;
    if (text::is_upper(cp)) {
      cls = "X";
    } else if (text::is_digit(cp)) {
      cls = "9";
    } else if (text::is_lower(cp) || text::is_alnum(cp)) {
      cls = "x";
    } else {
      cls = std::string(word.substr(start, pos - start));
    }
    if (cls != last) out += cls;
    last = std::move(cls);
  }
  return out;
}

bool is_punctuation(std::string_view word) {
  if (word.empty()) return false;
  for (std::size_t pos = 0; pos < word.size();) {
    if (text::is_alnum(text::next_code_point(word, pos))) return false;
  }
  return true;
}

namespace {

std::string offset_tag(int d) { return "@" + std::to_string(d); }

bool has_digit(std::string_view w) {
  for (char c : w)
    if (c >= '0' && c <= '9') return true;
  return false;
}

bool has_upper(std::string_view w) {
  for (std::size_t pos = 0; pos < w.size();)
    if (text::is_upper(text::next_code_point(w, pos))) return true;
  return false;
}

}  // namespace

std::vector<TokenFeatures> extract_baseline_features(const Sentence& sentence,
                                                     const FeatureTemplateConfig& config,
                                                     const Thesaurus* thesaurus) {
  config.validate();
  if (config.use_thesaurus && !thesaurus) throw Error("thesaurus features need a thesaurus");
  const auto n = static_cast<int>(sentence.size());
  const int half = config.half_window();

  // Per-token unigram features, windowed below.
  std::vector<std::vector<std::string>> local(sentence.size());
  std::vector<ListFlags> flags;
  if (config.use_thesaurus) flags = thesaurus->membership_features(sentence.surfaces());
  for (int i = 0; i < n; ++i) {
    const auto& tok = sentence.tokens[static_cast<std::size_t>(i)];
    auto& f = local[static_cast<std::size_t>(i)];
    if (config.use_words) f.push_back("w=" + text::to_lower(tok.surface));
    if (config.use_shape) {
      f.push_back("shape=" + word_shape(tok.surface));
      if (has_digit(tok.surface)) f.push_back("digit");
      if (has_upper(tok.surface)) f.push_back("upper");
      if (is_punctuation(tok.surface)) f.push_back("punct");
    }
    if (config.use_pos) f.push_back("pos=" + tok.pos);
    if (config.use_thesaurus) {
      for (auto list : kThesaurusLists) {
        if (flags[static_cast<std::size_t>(i)][static_cast<std::size_t>(list)]) {
          f.push_back("thes=" + std::string(to_string(list)));
        }
      }
    }
  }

  std::vector<TokenFeatures> out(sentence.size());
  for (int i = 0; i < n; ++i) {
    auto& feats = out[static_cast<std::size_t>(i)];
    feats.push_back("bias");
    if (!config.any_baseline()) continue;
    for (int d = -half; d <= half; ++d) {
      const int j = i + d;
      const auto tag = offset_tag(d);
      if (j < 0) {
        feats.push_back("BOS" + tag);
      } else if (j >= n) {
        feats.push_back("EOS" + tag);
      } else {
        for (const auto& f : local[static_cast<std::size_t>(j)]) {
          const auto eq = f.find('=');
          if (eq == std::string::npos) {
            feats.push_back(f + tag);
          } else {
            feats.push_back(f.substr(0, eq) + tag + f.substr(eq));
          }
        }
      }
    }
  }
  return out;
}

std::vector<TokenFeatures> stack_features(const FeatureTemplateConfig& config,
                                          const Sentence& sentence,
                                          const SentencePredictions& predictions,
                                          const Thesaurus* thesaurus) {
  auto out = extract_baseline_features(sentence, config, thesaurus);
  const auto n = static_cast<int>(sentence.size());
  const int half = config.half_window();
  for (const auto& source : config.prediction_sources) {
    const auto it = predictions.find(source);
    if (it == predictions.end()) throw Error("missing predictions from model '" + source + "'");
    const auto& labels = it->second;
    if (labels.size() != sentence.size()) {
      throw Error("predictions from model '" + source + "' do not match the sentence length");
    }
    for (int i = 0; i < n; ++i) {
      for (int d = -half; d <= half; ++d) {
        const int j = i + d;
        const std::string value = j < 0    ? "BOS"
                                  : j >= n ? "EOS"
                                           : labels[static_cast<std::size_t>(j)].str();
        out[static_cast<std::size_t>(i)].push_back("pred:" + source + offset_tag(d) + "=" + value);
      }
    }
  }
  return out;
}

}  // namespace archner::pipeline
