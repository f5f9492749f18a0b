#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "archner/error.hpp"
#include "archner/gazetteer.hpp"
#include "archner/text.hpp"
#include "support/oracles.hpp"

using namespace archner;

namespace {

constexpr auto P = static_cast<std::size_t>(ThesaurusList::PERIOD);
constexpr auto A = static_cast<std::size_t>(ThesaurusList::ARTEFACT);
constexpr auto M = static_cast<std::size_t>(ThesaurusList::MATERIAL);

Thesaurus from_text(const std::string& s) {
  std::istringstream in(s);
  return Thesaurus::load(in);
}

/// Flags every token covered by any n-gram that equals a phrase.
std::vector<ListFlags> brute_membership(const Thesaurus& t, const std::vector<std::string>& sentence) {
  std::vector<ListFlags> out(sentence.size(), ListFlags{});
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    for (std::size_t j = i + 1; j <= sentence.size(); ++j) {
      Thesaurus::Phrase gram;
      for (std::size_t k = i; k < j; ++k) gram.push_back(text::to_lower(sentence[k]));
      for (auto list : kThesaurusLists) {
        if (t.phrases(list).count(gram)) {
          for (std::size_t k = i; k < j; ++k) out[k][static_cast<std::size_t>(list)] = true;
        }
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("thesaurus rows load with optional period ranges") {
  const auto t = from_text("PERIOD\tbronze age\t-2000\t-800\nARTEFACT\taxe\n# comment\nMATERIAL\tFlint\n"
                           "ARTEFACT\taxe\n");
  CHECK(t.phrases(ThesaurusList::PERIOD).count({"bronze", "age"}) == 1);
  CHECK(t.period_range("Bronze  Age") == YearRange{-2000, -800});
  CHECK(t.phrases(ThesaurusList::ARTEFACT).count({"axe"}) == 1);
  CHECK(t.phrases(ThesaurusList::MATERIAL).count({"flint"}) == 1);
  CHECK(t.size() == 3);
  CHECK(t.max_phrase_length() == 2);
}

TEST_CASE("thesaurus errors name the line") {
  try {
    from_text("ARTEFACT\taxe\nFOO\tx\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(from_text("ARTEFACT\taxe\t1\t2\n"), ParseError);
  CHECK_THROWS_AS(from_text("PERIOD\tbronze age\t-2000\n"), ParseError);
  CHECK_THROWS_AS(from_text("PERIOD\tbronze age\tearly\tlate\n"), ParseError);
}

TEST_CASE("multi-token phrases need the whole sequence") {
  const auto t = from_text("PERIOD\tbronze age\t-2000\t-800\nARTEFACT\taxe\n");
  const auto both = t.membership_features({"Bronze", "age"});
  CHECK(both[0][P]);
  CHECK(both[1][P]);

  const auto axe = t.membership_features({"Bronze", "axe"});
  CHECK_FALSE(axe[0][P]);
  CHECK(axe[1][A]);
  CHECK_FALSE(axe[1][P]);

  const auto none = t.membership_features({"hond"});
  CHECK_FALSE(none[0][P]);
  CHECK_FALSE(none[0][A]);
  CHECK_FALSE(none[0][M]);
}

TEST_CASE("overlapping phrases all fire") {
  const auto t = from_text("PERIOD\tlate bronze\nPERIOD\tbronze age\n");
  const auto f = t.membership_features({"late", "bronze", "age"});
  CHECK(f[0][P]);
  CHECK(f[1][P]);
  CHECK(f[2][P]);
}

TEST_CASE("membership equals a brute-force n-gram scan") {
  oracle::Rng rng(5);
  const std::vector<std::string> vocab = {"late", "bronze", "age", "axe", "Flint", "iron", "pit"};
  for (int trial = 0; trial < 500; ++trial) {
    Thesaurus t;
    const int phrases = oracle::uniform_int(rng, 0, 6);
    for (int i = 0; i < phrases; ++i) {
      std::string phrase;
      const int len = oracle::uniform_int(rng, 1, 3);
      for (int k = 0; k < len; ++k) phrase += (k ? " " : "") + oracle::pick(rng, vocab);
      t.add(kThesaurusLists[static_cast<std::size_t>(oracle::uniform_int(rng, 0, 2))], phrase);
    }
    std::vector<std::string> sentence;
    const int n = oracle::uniform_int(rng, 0, 10);
    for (int i = 0; i < n; ++i) {
      std::string w = oracle::pick(rng, vocab);
      if (oracle::coin(rng, 0.3)) w[0] = static_cast<char>(std::toupper(w[0]));
      sentence.push_back(w);
    }
    CHECK(t.membership_features(sentence) == brute_membership(t, sentence));
  }
}

TEST_CASE("membership ignores case") {
  const auto t = Thesaurus::load(ARCHNER_DATA_DIR "/thesaurus.tsv");
  const std::vector<std::string> lower = {"een", "late", "bronze", "age", "bijl", "van", "vuursteen"};
  const std::vector<std::string> mixed = {"EEN", "Late", "BRONZE", "Age", "Bijl", "van", "VuurSteen"};
  CHECK(t.membership_features(lower) == t.membership_features(mixed));
  const auto f = t.membership_features(lower);
  CHECK(f[1][P]);
  CHECK(f[3][P]);
  CHECK(f[4][A]);
  CHECK(f[6][M]);
  CHECK(t.size() >= 50);
}
