#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace archner {

enum class Tag : unsigned char { O, B, I };

/// The six archaeological entity categories.
enum class EntityType : unsigned char { ART, CON, MAT, LOC, SPE, PER };

inline constexpr std::array<EntityType, 6> kEntityTypes = {
    EntityType::ART, EntityType::CON, EntityType::MAT,
    EntityType::LOC, EntityType::SPE, EntityType::PER};

std::string_view to_string(EntityType t);
std::optional<EntityType> parse_entity_type(std::string_view s);

/// A BIO label. `type` is meaningless (and kept at ART) when tag is O, so
/// that two O labels always compare equal.
class BioLabel {
 public:
  constexpr BioLabel() = default;
  constexpr BioLabel(Tag tag, EntityType type)
      : tag_(tag), type_(tag == Tag::O ? EntityType::ART : type) {}

  static constexpr BioLabel outside() { return {}; }
  static constexpr BioLabel begin(EntityType t) { return {Tag::B, t}; }
  static constexpr BioLabel inside(EntityType t) { return {Tag::I, t}; }

  /// Canonical index in [0, 13): O = 0, then B-X, I-X for each type in
  /// declaration order.
  static BioLabel from_index(std::size_t index);
  std::size_t index() const;

  Tag tag() const { return tag_; }
  std::optional<EntityType> type() const {
    if (tag_ == Tag::O) return std::nullopt;
    return type_;
  }
  bool is_outside() const { return tag_ == Tag::O; }

  std::string str() const;

  friend bool operator==(const BioLabel&, const BioLabel&) = default;

 private:
  Tag tag_ = Tag::O;
  EntityType type_ = EntityType::ART;
};

inline constexpr std::size_t kNumLabels = 13;

/// All 13 labels in canonical index order.
std::vector<BioLabel> all_labels();

/// Parses "O", "B-X" or "I-X"; nullopt for anything else.
std::optional<BioLabel> parse_label(std::string_view s);

/// An I-X is valid only after B-X or I-X.
bool is_valid_transition(std::optional<BioLabel> prev, BioLabel cur);
bool is_valid_sequence(std::span<const BioLabel> labels);
/// Number of I labels that do not continue an entity of the same type.
std::size_t count_orphan_inside(std::span<const BioLabel> labels);

}  // namespace archner
