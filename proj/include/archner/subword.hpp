#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "archner/corpus.hpp"

namespace archner::subword {

inline constexpr std::string_view kContinuation = "##";

/// Immutable WordPiece vocabulary. Continuation pieces carry a "##" prefix.
class SubwordVocab {
 public:
  explicit SubwordVocab(std::vector<std::string> pieces, std::string unk_piece = "[UNK]",
                        std::size_t max_word_chars = 100);

  static SubwordVocab load(std::istream& in);
  static SubwordVocab load(const std::string& path);
  /// One piece per line, sorted.
  std::string to_text() const;

  bool contains(std::string_view piece) const;
  std::size_t size() const { return pieces_.size(); }
  const std::string& unk_piece() const { return unk_; }
  std::size_t max_word_chars() const { return max_word_chars_; }
  std::vector<std::string> sorted_pieces() const;

 private:
  std::unordered_set<std::string> pieces_;
  std::string unk_;
  std::size_t max_word_chars_;
};

/// Greedy longest-match segmentation. A word with any unmatched remainder,
/// or longer than max_word_chars code points, becomes a single unk piece.
std::vector<std::string> encode_word(const SubwordVocab& vocab, std::string_view word);
std::vector<std::string> encode_sentence(const SubwordVocab& vocab,
                                         const std::vector<std::string>& words);

/// Inverse of encode_word for encodings without the unk piece.
std::string decode_word(const std::vector<std::string>& pieces);

/// Builds a vocabulary by byte-pair style merges over word types. Starts from
/// the character pieces seen in the corpus (word-initial plain, others
/// "##"-marked) plus the unk piece, then repeatedly merges the most frequent
/// adjacent pair (ties broken lexicographically) until `target_size` pieces
/// exist or no pair occurs at least twice.
SubwordVocab induce_vocab(const std::vector<std::string>& words, std::size_t target_size);

struct FertilityReport {
  std::size_t word_count = 0;
  std::size_t piece_count = 0;
  std::size_t unk_count = 0;
  std::size_t sentence_count = 0;
  /// Sentences whose encoding exceeds `max_sequence_pieces`.
  std::size_t oversize_sentences = 0;

  double pieces_per_word() const {
    return word_count == 0 ? 0.0 : static_cast<double>(piece_count) / word_count;
  }
  std::string to_csv() const;
};

inline constexpr std::size_t kMaxSequencePieces = 512;

FertilityReport fertility(const SubwordVocab& vocab, const std::vector<TaggedDocument>& docs,
                          std::size_t max_sequence_pieces = kMaxSequencePieces);

}  // namespace archner::subword
