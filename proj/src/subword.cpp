#include "archner/subword.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "archner/error.hpp"
#include "archner/text.hpp"

namespace archner::subword {

SubwordVocab::SubwordVocab(std::vector<std::string> pieces, std::string unk_piece,
                           std::size_t max_word_chars)
    : unk_(std::move(unk_piece)), max_word_chars_(max_word_chars) {
  if (unk_.empty()) throw Error("unk piece must not be empty");
  for (auto& p : pieces) {
    if (p.empty() || p == kContinuation) throw Error("empty vocabulary piece");
    pieces_.insert(std::move(p));
  }
  pieces_.insert(unk_);
}

SubwordVocab SubwordVocab::load(std::istream& in) {
  std::vector<std::string> pieces;
  std::string line;
  while (std::getline(in, line)) {
    const auto piece = text::trim(line);
    if (!piece.empty()) pieces.emplace_back(piece);
  }
  return SubwordVocab(std::move(pieces));
}

SubwordVocab SubwordVocab::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return load(in);
}

bool SubwordVocab::contains(std::string_view piece) const {
  return pieces_.find(std::string(piece)) != pieces_.end();
}

std::vector<std::string> SubwordVocab::sorted_pieces() const {
  std::vector<std::string> out(pieces_.begin(), pieces_.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::string SubwordVocab::to_text() const {
  std::string out;
  for (const auto& p : sorted_pieces()) {
    out += p;
    out += '\n';
  }
  return out;
}

namespace {

/// Byte offsets of code point boundaries, including 0 and size.
std::vector<std::size_t> boundaries(std::string_view word) {
  std::vector<std::size_t> out{0};
  for (std::size_t pos = 0; pos < word.size();) {
    text::next_code_point(word, pos);
    out.push_back(pos);
  }
  return out;
}

}  // namespace

std::vector<std::string> encode_word(const SubwordVocab& vocab, std::string_view word) {
  const auto cuts = boundaries(word);
  if (cuts.size() - 1 > vocab.max_word_chars()) return {vocab.unk_piece()};

  std::vector<std::string> pieces;
  std::size_t start = 0;  // index into cuts
  std::string candidate;
  while (start + 1 < cuts.size()) {
    bool found = false;
    for (std::size_t end = cuts.size() - 1; end > start; --end) {
      candidate.clear();
      if (start > 0) candidate.append(kContinuation);
      candidate.append(word.substr(cuts[start], cuts[end] - cuts[start]));
      if (vocab.contains(candidate)) {
        pieces.push_back(candidate);
        start = end;
        found = true;
        break;
      }
    }
    if (!found) return {vocab.unk_piece()};
  }
  return pieces;
}

std::vector<std::string> encode_sentence(const SubwordVocab& vocab,
                                         const std::vector<std::string>& words) {
  std::vector<std::string> out;
  for (const auto& w : words) {
    auto pieces = encode_word(vocab, w);
    out.insert(out.end(), pieces.begin(), pieces.end());
  }
  return out;
}

std::string decode_word(const std::vector<std::string>& pieces) {
  std::string out;
  for (const auto& p : pieces) {
    std::string_view v = p;
    if (v.substr(0, kContinuation.size()) == kContinuation) v.remove_prefix(kContinuation.size());
    out.append(v);
  }
  return out;
}

SubwordVocab induce_vocab(const std::vector<std::string>& words, std::size_t target_size) {
  if (words.empty()) throw Error("cannot induce a vocabulary from an empty corpus");

  std::map<std::string, std::size_t> type_counts;
  for (const auto& w : words) {
    if (!w.empty()) ++type_counts[w];
  }
  if (type_counts.empty()) throw Error("cannot induce a vocabulary from an empty corpus");

  // Each word type as its current piece sequence.
  std::vector<std::pair<std::vector<std::string>, std::size_t>> segmented;
  std::set<std::string> vocab;
  for (const auto& [word, count] : type_counts) {
    const auto cuts = boundaries(word);
    std::vector<std::string> pieces;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      std::string piece = i == 0 ? std::string() : std::string(kContinuation);
      piece.append(word.substr(cuts[i], cuts[i + 1] - cuts[i]));
      vocab.insert(piece);
      pieces.push_back(std::move(piece));
    }
    segmented.emplace_back(std::move(pieces), count);
  }
  const std::string unk = "[UNK]";
  if (target_size <= vocab.size() + 1) {
    throw Error("target size " + std::to_string(target_size) +
                " must exceed the character alphabet (" + std::to_string(vocab.size()) +
                ") plus the unk piece");
  }
  vocab.insert(unk);

  auto merged_piece = [](const std::string& left, const std::string& right) {
    return left + right.substr(kContinuation.size());
  };

  while (vocab.size() < target_size) {
    std::map<std::pair<std::string, std::string>, std::size_t> pair_counts;
    for (const auto& [pieces, count] : segmented) {
      for (std::size_t i = 0; i + 1 < pieces.size(); ++i) pair_counts[{pieces[i], pieces[i + 1]}] += count;
    }
    // std::map iterates pairs in lexicographic order, so the first maximum wins ties.
    const std::pair<std::string, std::string>* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& [pair, count] : pair_counts) {
      if (count > best_count) {
        best = &pair;
        best_count = count;
      }
    }
    if (!best || best_count < 2) break;

    const auto left = best->first;
    const auto right = best->second;
    const auto merged = merged_piece(left, right);
    for (auto& [pieces, count] : segmented) {
      std::vector<std::string> next;
      next.reserve(pieces.size());
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (i + 1 < pieces.size() && pieces[i] == left && pieces[i + 1] == right) {
          next.push_back(merged);
          ++i;
        } else {
          next.push_back(pieces[i]);
        }
      }
      pieces = std::move(next);
    }
    vocab.insert(merged);
  }
  return SubwordVocab(std::vector<std::string>(vocab.begin(), vocab.end()), unk);
}

std::string FertilityReport::to_csv() const {
  std::ostringstream out;
  out << "words,pieces,pieces_per_word,unk,sentences,oversize_sentences\n";
  out << word_count << ',' << piece_count << ',' << pieces_per_word() << ',' << unk_count << ','
      << sentence_count << ',' << oversize_sentences << '\n';
  return out.str();
}

FertilityReport fertility(const SubwordVocab& vocab, const std::vector<TaggedDocument>& docs,
                          std::size_t max_sequence_pieces) {
  FertilityReport report;
  for (const auto& doc : docs) {
    for (const auto& sentence : doc.sentences) {
      const auto pieces = encode_sentence(vocab, sentence.surfaces());
      report.word_count += sentence.size();
      report.piece_count += pieces.size();
      report.unk_count += static_cast<std::size_t>(
          std::count(pieces.begin(), pieces.end(), vocab.unk_piece()));
      ++report.sentence_count;
      if (pieces.size() > max_sequence_pieces) ++report.oversize_sentences;
    }
  }
  return report;
}

}  // namespace archner::subword
