#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "archner/bio.hpp"

namespace archner {

struct EntitySpan {
  EntityType type = EntityType::ART;
  std::size_t start = 0;  ///< token offset within the sentence
  std::size_t end = 0;    ///< exclusive
  std::string surface;    ///< lowercased, single-spaced

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

/// Turns every orphan I-X (sentence start, or after a label that is neither
/// B-X nor I-X) into B-X. The result is always a valid BIO sequence.
std::vector<BioLabel> bio_repair(const std::vector<BioLabel>& labels);

/// Maximal B-X I-X* runs. Throws archner::Error on invalid BIO input; run
/// bio_repair first on raw model output.
std::vector<EntitySpan> extract_spans(const std::vector<BioLabel>& labels,
                                      const std::vector<std::string>& surfaces);

/// Inverse of extract_spans for a sentence of `length` tokens.
std::vector<BioLabel> render_spans(const std::vector<EntitySpan>& spans, std::size_t length);

}  // namespace archner
