#include "archner/bio.hpp"

#include <stdexcept>

namespace archner {

std::string_view to_string(EntityType t) {
  switch (t) {
    case EntityType::ART: return "ART";
    case EntityType::CON: return "CON";
    case EntityType::MAT: return "MAT";
    case EntityType::LOC: return "LOC";
    case EntityType::SPE: return "SPE";
    case EntityType::PER: return "PER";
  }
  return "?";
}

std::optional<EntityType> parse_entity_type(std::string_view s) {
  for (auto t : kEntityTypes) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

BioLabel BioLabel::from_index(std::size_t index) {
  if (index >= kNumLabels) throw std::out_of_range("label index out of range");
  if (index == 0) return outside();
  const auto type = kEntityTypes[(index - 1) / 2];
  return (index - 1) % 2 == 0 ? begin(type) : inside(type);
}

std::size_t BioLabel::index() const {
  if (tag_ == Tag::O) return 0;
  return 1 + 2 * static_cast<std::size_t>(type_) + (tag_ == Tag::I ? 1 : 0);
}

std::string BioLabel::str() const {
  if (tag_ == Tag::O) return "O";
  std::string out = tag_ == Tag::B ? "B-" : "I-";
  out.append(to_string(type_));
  return out;
}

std::vector<BioLabel> all_labels() {
  std::vector<BioLabel> out;
  for (std::size_t i = 0; i < kNumLabels; ++i) out.push_back(BioLabel::from_index(i));
  return out;
}

std::optional<BioLabel> parse_label(std::string_view s) {
  if (s == "O") return BioLabel::outside();
  if (s.size() < 3 || s[1] != '-') return std::nullopt;
  const auto type = parse_entity_type(s.substr(2));
  if (!type) return std::nullopt;
  if (s[0] == 'B') return BioLabel::begin(*type);
  if (s[0] == 'I') return BioLabel::inside(*type);
  return std::nullopt;
}

bool is_valid_transition(std::optional<BioLabel> prev, BioLabel cur) {
  if (cur.tag() != Tag::I) return true;
  return prev && !prev->is_outside() && prev->type() == cur.type();
}

bool is_valid_sequence(std::span<const BioLabel> labels) {
  return count_orphan_inside(labels) == 0;
}

std::size_t count_orphan_inside(std::span<const BioLabel> labels) {
  std::size_t n = 0;
  std::optional<BioLabel> prev;
  for (const auto& l : labels) {
    if (!is_valid_transition(prev, l)) ++n;
    prev = l;
  }
  return n;
}

}  // namespace archner
