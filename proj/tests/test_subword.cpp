#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "archner/corpus.hpp"
#include "archner/error.hpp"
#include "archner/subword.hpp"
#include "archner/text.hpp"
#include "support/oracles.hpp"

using namespace archner;
using namespace archner::subword;

namespace {

const std::vector<std::string> kExample = text::split_whitespace(
    "In put twee werden 3 Swifterbant aardewerkscherven aangetroffen uit het Midden Neolithicum .");

std::vector<std::string> words(const char* s) { return text::split_whitespace(s); }

}  // namespace

TEST_CASE("greedy longest match") {
  const SubwordVocab vocab({"aardewerk", "##scher", "##ven", "aarde", "put", "##s"});
  CHECK(encode_word(vocab, "aardewerkscherven") ==
        std::vector<std::string>{"aardewerk", "##scher", "##ven"});
  CHECK(encode_word(vocab, "put") == std::vector<std::string>{"put"});
  CHECK(encode_word(vocab, "xyz") == std::vector<std::string>{"[UNK]"});
  // A remainder that cannot be matched makes the whole word unknown.
  CHECK(encode_word(vocab, "putx") == std::vector<std::string>{"[UNK]"});
  CHECK(encode_sentence(vocab, {}).empty());
  CHECK(encode_sentence(vocab, {"put", "put", "aardewerk"}).size() == 3);
}

TEST_CASE("overlong words are unknown") {
  const SubwordVocab vocab({"a", "##a"}, "[UNK]", 5);
  CHECK(encode_word(vocab, "aaaaa").size() == 5);
  CHECK(encode_word(vocab, "aaaaaa") == std::vector<std::string>{"[UNK]"});
}

TEST_CASE("multilingual vocabulary yields 23 pieces on the example sentence") {
  const SubwordVocab vocab(words("In put twee werden 3 Swift ##er ##bant aarde ##werks ##cher ##ven "
                                 "aan ##get ##roffen uit het Midden Neo ##lit ##hic ##um ."));
  const auto pieces = encode_sentence(vocab, kExample);
  CHECK(pieces.size() == 23);
  CHECK(text::join(pieces, " ") ==
        "In put twee werden 3 Swift ##er ##bant aarde ##werks ##cher ##ven aan ##get ##roffen uit "
        "het Midden Neo ##lit ##hic ##um .");
}

TEST_CASE("Dutch vocabulary yields 20 pieces on the example sentence") {
  const SubwordVocab vocab(words("In put twee werden 3 Swift ##er ##ban ##t aardewerk ##scher ##ven "
                                 "aangetroffen uit het Midden Neo ##lith ##icum ."));
  const auto pieces = encode_sentence(vocab, kExample);
  CHECK(pieces.size() == 20);
  CHECK(encode_word(vocab, "Swifterbant") == words("Swift ##er ##ban ##t"));
}

TEST_CASE("domain vocabulary yields 14 pieces on the example sentence") {
  const SubwordVocab vocab(words("In put twee werden 3 Swifterbant aardewerk ##scherven aangetroffen "
                                 "uit het Midden Neolithicum ."));
  CHECK(encode_sentence(vocab, kExample).size() == 14);
}

TEST_CASE("decoding reproduces the word") {
  const SubwordVocab vocab(words("Swift ##er ##ban ##t aarde ##werk ##s ##cher ##ven é ##é"));
  for (const char* w : {"Swifterbant", "aardewerkscherven", "ééé"}) {
    const auto pieces = encode_word(vocab, w);
    REQUIRE(pieces != std::vector<std::string>{"[UNK]"});
    CHECK(decode_word(pieces) == w);
    for (const auto& p : pieces) CHECK(vocab.contains(p));
  }
}

TEST_CASE("vocabulary files load one piece per line") {
  std::istringstream in("put\n##s\n\n[UNK]\n");
  const auto vocab = SubwordVocab::load(in);
  CHECK(vocab.contains("put"));
  CHECK(vocab.contains("##s"));
  CHECK(vocab.contains("[UNK]"));
  CHECK(encode_word(vocab, "puts") == words("put ##s"));
  std::istringstream again(vocab.to_text());
  CHECK(SubwordVocab::load(again).sorted_pieces() == vocab.sorted_pieces());
}

TEST_CASE("induce_vocab merges frequent pairs") {
  // Hand-run: alphabet {a, ##a} plus [UNK] is 3 pieces; the pair (a, ##a)
  // occurs 3 times and becomes "aa".
  const auto v = induce_vocab(words("aa aa aa"), 4);
  CHECK(v.size() == 4);
  CHECK(v.contains("aa"));
  CHECK(encode_word(v, "aa") == std::vector<std::string>{"aa"});

  const auto single = induce_vocab(words("a a a"), 3);
  CHECK(single.sorted_pieces() == std::vector<std::string>{"[UNK]", "a"});

  CHECK_THROWS_AS(induce_vocab(words("ab ab"), 3), Error);
  CHECK_THROWS_AS(induce_vocab({}, 10), Error);
}

TEST_CASE("induced vocabularies encode their training words without unknowns") {
  oracle::Rng rng(3);
  const std::string alphabet = "abcdeé";
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> corpus;
    const int n = oracle::uniform_int(rng, 1, 40);
    for (int i = 0; i < n; ++i) {
      std::string w;
      const int len = oracle::uniform_int(rng, 1, 8);
      for (int k = 0; k < len; ++k) {
        const int c = oracle::uniform_int(rng, 0, 5);
        w += c == 5 ? std::string("é") : std::string(1, alphabet[static_cast<std::size_t>(c)]);
      }
      corpus.push_back(w);
    }
    const std::size_t target = static_cast<std::size_t>(oracle::uniform_int(rng, 14, 60));
    const auto vocab = induce_vocab(corpus, target);
    CHECK(vocab.size() <= target);
    for (const auto& w : corpus) {
      const auto pieces = encode_word(vocab, w);
      CHECK(pieces != std::vector<std::string>{"[UNK]"});
      CHECK(decode_word(pieces) == w);
    }
  }
}

TEST_CASE("fertility matches an independent recount") {
  const auto docs = load_conll(ARCHNER_DATA_DIR "/fixture_corpus.conll");
  std::vector<std::string> all;
  for (const auto& d : docs)
    for (const auto& s : d.sentences)
      for (const auto& t : s.tokens) all.push_back(t.surface);
  // Half the vocabulary is induced from the corpus, so some words split and
  // words with unseen characters become unknown.
  std::vector<std::string> half(all.begin(), all.begin() + static_cast<long>(all.size() / 2));
  const auto vocab = induce_vocab(half, 80);

  std::size_t pieces = 0, unknown = 0, sentences = 0, oversize = 0;
  for (const auto& d : docs) {
    for (const auto& s : d.sentences) {
      ++sentences;
      std::size_t in_sentence = 0;
      for (const auto& t : s.tokens) {
        // Greedy recount written out independently of encode_word.
        std::size_t count = 0;
        std::size_t pos = 0;
        bool ok = true;
        while (pos < t.surface.size() && ok) {
          std::size_t best = 0;
          for (std::size_t end = t.surface.size(); end > pos; --end) {
            const auto piece = (pos == 0 ? "" : "##") + t.surface.substr(pos, end - pos);
            if (vocab.contains(piece)) {
              best = end;
              break;
            }
          }
          if (best == 0) ok = false;
          pos = best;
          ++count;
        }
        if (!ok) {
          count = 1;
          ++unknown;
        }
        in_sentence += count;
      }
      pieces += in_sentence;
      oversize += in_sentence > 10;
    }
  }
  const auto report = fertility(vocab, docs, 10);
  CHECK(report.word_count == all.size());
  CHECK(report.piece_count == pieces);
  CHECK(report.unk_count == unknown);
  CHECK(report.sentence_count == sentences);
  CHECK(report.oversize_sentences == oversize);
  CHECK(report.pieces_per_word() == doctest::Approx(static_cast<double>(pieces) / all.size()));
  CHECK(report.pieces_per_word() > 1.0);

  const SubwordVocab everything(all);
  CHECK(fertility(everything, docs).pieces_per_word() == 1.0);
}
