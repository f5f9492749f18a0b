#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "archner/bio.hpp"

namespace archner {

struct Token {
  std::string surface;
  std::string pos;
  std::optional<BioLabel> gold;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  std::vector<Token> tokens;

  std::size_t size() const { return tokens.size(); }
  std::vector<std::string> surfaces() const;
  /// Gold labels; throws if any token lacks one.
  std::vector<BioLabel> gold_labels() const;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct TaggedDocument {
  std::string doc_id;
  std::vector<Sentence> sentences;

  std::size_t token_count() const;

  friend bool operator==(const TaggedDocument&, const TaggedDocument&) = default;
};

/// Labels parallel to a corpus: document → sentence → token.
using DocLabels = std::vector<std::vector<std::vector<BioLabel>>>;

/// Throws if `labels` is not shaped exactly like `docs`.
void check_shape(const std::vector<TaggedDocument>& docs, const DocLabels& labels);
void check_shape(const DocLabels& a, const DocLabels& b);
DocLabels gold_labels(const std::vector<TaggedDocument>& docs);
std::vector<BioLabel> flatten(const DocLabels& labels);

struct ConllFile {
  std::vector<TaggedDocument> docs;
  /// Fourth column, when every token line carries one.
  std::optional<DocLabels> predictions;
};

/// Reads `surface<TAB>pos<TAB>label[<TAB>prediction...]` lines. A blank line
/// ends a sentence and `#doc <id>` starts a document. A label column of "_"
/// or an empty string means "no gold label". Tokens before the first `#doc`
/// line belong to a document named "doc".
ConllFile read_conll_file(std::istream& in);
std::vector<TaggedDocument> read_conll(std::istream& in);
std::vector<TaggedDocument> read_conll(std::string_view text);
std::vector<TaggedDocument> load_conll(const std::string& path);
ConllFile load_conll_file(const std::string& path);

/// Writes the canonical layout. When `predictions` is given it becomes a
/// fourth column and tokens without gold get "_" in the third.
std::string write_conll(const std::vector<TaggedDocument>& docs,
                        const DocLabels* predictions = nullptr);

/// Breaks sentences longer than `hard_limit` tokens, preferring the last
/// '.', ';' or ',' at 1-based positions (soft_limit, hard_limit].
TaggedDocument split_long_sentences(const TaggedDocument& doc, std::size_t soft_limit = 60,
                                    std::size_t hard_limit = 90);

struct FoldSplit {
  std::size_t k = 0;
  std::map<std::string, std::size_t> fold_of_doc;

  std::vector<std::size_t> fold_token_sums(const std::vector<TaggedDocument>& docs) const;
  std::string to_csv() const;
  static FoldSplit from_csv(std::istream& in);
};

/// Longest-processing-time assignment of whole documents to k folds.
FoldSplit make_folds(const std::vector<TaggedDocument>& docs, std::size_t k = 5);

}  // namespace archner
