#pragma once

// Generated corpora for learnability checks.

#include <string>
#include <vector>

#include "archner/bio.hpp"
#include "archner/crf.hpp"
#include "support/oracles.hpp"

namespace toy {

inline constexpr int kWordsPerLabel = 4;

/// Feature names "w=<label>/<k>": every word belongs to exactly one label,
/// so the data is separable by word identity alone.
inline std::vector<std::string> feature_names() {
  std::vector<std::string> names;
  for (std::size_t l = 0; l < archner::kNumLabels; ++l) {
    for (int k = 0; k < kWordsPerLabel; ++k) {
      names.push_back("w=" + archner::BioLabel::from_index(l).str() + "/" + std::to_string(k));
    }
  }
  return names;
}

inline std::uint32_t word_of(oracle::Rng& rng, std::size_t label) {
  return static_cast<std::uint32_t>(label * kWordsPerLabel +
                                    static_cast<std::size_t>(oracle::uniform_int(rng, 0, kWordsPerLabel - 1)));
}

/// Valid BIO sentences of O words and 1-3 token entities. Every entity is
/// followed by an O word, so B-X never directly follows another entity.
inline std::vector<archner::crf::Instance> sentences(oracle::Rng& rng, std::size_t count) {
  std::vector<archner::crf::Instance> out;
  for (std::size_t s = 0; s < count; ++s) {
    archner::crf::Instance inst;
    const int segments = oracle::uniform_int(rng, 1, 6);
    for (int g = 0; g < segments; ++g) {
      if (oracle::coin(rng)) {
        inst.y.push_back(0);
        continue;
      }
      const auto type = archner::kEntityTypes[static_cast<std::size_t>(oracle::uniform_int(rng, 0, 5))];
      const int len = oracle::uniform_int(rng, 1, 3);
      for (int i = 0; i < len; ++i) {
        inst.y.push_back((i == 0 ? archner::BioLabel::begin(type) : archner::BioLabel::inside(type)).index());
      }
      inst.y.push_back(0);
    }
    for (auto label : inst.y) inst.x.push_back({word_of(rng, label)});
    out.push_back(std::move(inst));
  }
  return out;
}

inline std::vector<archner::BioLabel> to_labels(const std::vector<std::size_t>& idx) {
  std::vector<archner::BioLabel> out;
  for (auto i : idx) out.push_back(archner::BioLabel::from_index(i));
  return out;
}

}  // namespace toy
