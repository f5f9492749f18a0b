#include "archner/spans.hpp"

#include "archner/error.hpp"
#include "archner/text.hpp"

namespace archner {

std::vector<BioLabel> bio_repair(const std::vector<BioLabel>& labels) {
  std::vector<BioLabel> out = labels;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].tag() != Tag::I) continue;
    const bool continues = i > 0 && !out[i - 1].is_outside() && out[i - 1].type() == out[i].type();
    if (!continues) out[i] = BioLabel::begin(*out[i].type());
  }
  return out;
}

std::vector<EntitySpan> extract_spans(const std::vector<BioLabel>& labels,
                                      const std::vector<std::string>& surfaces) {
  if (labels.size() != surfaces.size()) throw Error("labels and tokens differ in length");
  if (!is_valid_sequence(labels)) {
    throw Error("invalid BIO sequence (I without a preceding B); apply bio_repair first");
  }
  std::vector<EntitySpan> spans;
  for (std::size_t i = 0; i < labels.size();) {
    if (labels[i].tag() != Tag::B) {
      ++i;
      continue;
    }
    EntitySpan span;
    span.type = *labels[i].type();
    span.start = i;
    std::vector<std::string> words{text::to_lower(surfaces[i])};
    ++i;
    while (i < labels.size() && labels[i] == BioLabel::inside(span.type)) {
      words.push_back(text::to_lower(surfaces[i]));
      ++i;
    }
    span.end = i;
    span.surface = text::join(words, " ");
    spans.push_back(std::move(span));
  }
  return spans;
}

std::vector<BioLabel> render_spans(const std::vector<EntitySpan>& spans, std::size_t length) {
  std::vector<BioLabel> out(length, BioLabel::outside());
  for (const auto& s : spans) {
    if (s.start >= s.end || s.end > length) throw Error("span outside the sentence");
    out[s.start] = BioLabel::begin(s.type);
    for (std::size_t i = s.start + 1; i < s.end; ++i) out[i] = BioLabel::inside(s.type);
  }
  return out;
}

}  // namespace archner
