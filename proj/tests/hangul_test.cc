#include "jamoeval/hangul.h"

#include <set>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "jamoeval/errors.h"

namespace jamoeval {
namespace {

// Lookup-table oracle: enumerate onset x vowel x coda in Unicode order and
// spell every syllable from string tables, without any index arithmetic.
std::vector<std::string> OracleTable() {
  const std::vector<std::string> onsets = {
      "ㄱ", "ㄲ", "ㄴ", "ㄷ", "ㄸ", "ㄹ", "ㅁ", "ㅂ", "ㅃ", "ㅅ",
      "ㅆ", "ㅇ", "ㅈ", "ㅉ", "ㅊ", "ㅋ", "ㅌ", "ㅍ", "ㅎ"};
  const std::vector<std::string> vowels = {
      "ㅏ", "ㅐ", "ㅑ", "ㅒ", "ㅓ", "ㅔ", "ㅕ", "ㅖ", "ㅗ", "ㅘ", "ㅙ",
      "ㅚ", "ㅛ", "ㅜ", "ㅝ", "ㅞ", "ㅟ", "ㅠ", "ㅡ", "ㅢ", "ㅣ"};
  const std::vector<std::string> codas = {
      "",     "ㄱ",   "ㄲ",   "ㄱㅅ", "ㄴ",   "ㄴㅈ", "ㄴㅎ",
      "ㄷ",   "ㄹ",   "ㄹㄱ", "ㄹㅁ", "ㄹㅂ", "ㄹㅅ", "ㄹㅌ",
      "ㄹㅍ", "ㄹㅎ", "ㅁ",   "ㅂ",   "ㅂㅅ", "ㅅ",   "ㅆ",
      "ㅇ",   "ㅈ",   "ㅊ",   "ㅋ",   "ㅌ",   "ㅍ",   "ㅎ"};
  std::vector<std::string> table;
  for (const auto& o : onsets)
    for (const auto& v : vowels)
      for (const auto& c : codas) table.push_back(o + v + c);
  return table;
}

TEST(DecomposeSyllable, MatchesLookupTableOracleForAllSyllables) {
  const auto table = OracleTable();
  ASSERT_EQ(table.size(), 11172u);
  for (char32_t s = kSyllableFirst; s <= kSyllableLast; ++s) {
    ASSERT_EQ(JamoString(DecomposeSyllable(s)), table[s - kSyllableFirst])
        << EncodeUtf8(s);
  }
}

TEST(DecomposeSyllable, Examples) {
  EXPECT_EQ(JamoString(DecomposeSyllable(U'가')), "ㄱㅏ");
  EXPECT_EQ(JamoString(DecomposeSyllable(U'움')), "ㅇㅜㅁ");
  EXPECT_EQ(JamoString(DecomposeSyllable(U'없')), "ㅇㅓㅂㅅ");
}

TEST(DecomposeSyllable, RejectsNonSyllable) {
  EXPECT_THROW(DecomposeSyllable(U'ㄱ'), DomainError);
  EXPECT_THROW(DecomposeSyllable(U'a'), DomainError);
  try {
    DecomposeSyllable(0xD7A4);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("U+D7A4"), std::string::npos);
  }
}

TEST(DecomposeText, Examples) {
  EXPECT_EQ(SpacedJamoString(DecomposeText("짜움")), "ㅉ ㅏ ㅇ ㅜ ㅁ");
  EXPECT_TRUE(DecomposeText("").empty());
  EXPECT_EQ(JamoString(DecomposeText("호라이")), "ㅎㅗㄹㅏㅇㅣ");
}

TEST(DecomposeText, StripsPunctuationAndWhitespace) {
  EXPECT_EQ(JamoString(DecomposeText(" 호라이.")), "ㅎㅗㄹㅏㅇㅣ");
  EXPECT_EQ(JamoString(DecomposeText("나무, 바지!?")), "ㄴㅏㅁㅜㅂㅏㅈㅣ");
  EXPECT_EQ(JamoString(DecomposeText("「책」\t。")), "ㅊㅐㄱ");
}

TEST(DecomposeText, PassesJamoThroughAndSplitsClusterLetters) {
  EXPECT_EQ(JamoString(DecomposeText("ㅎㅗ라")), "ㅎㅗㄹㅏ");
  EXPECT_EQ(JamoString(DecomposeText("ㅄ")), "ㅂㅅ");
}

TEST(DecomposeText, RejectsOtherScripts) {
  EXPECT_THROW(DecomposeText("abc"), DomainError);
  EXPECT_THROW(DecomposeText("나무1"), DomainError);
  EXPECT_THROW(DecomposeText("\xE1\x84\x80"), DomainError);  // U+1100
  EXPECT_THROW(DecomposeText("\xFF"), DomainError);
  EXPECT_THROW(DecomposeText("\xEA\xB0"), DomainError);  // truncated 가
}

TEST(DecomposeText, OutputIsAlwaysPlainJamo) {
  const std::string text = "호랑이 없어, 짹짹! 헬리콥터 ㄳ";
  for (Jamo j : DecomposeText(text)) {
    EXPECT_GE(j.id(), 0);
    EXPECT_LT(j.id(), kNumJamo);
  }
}

TEST(ComposeJamo, Examples) {
  EXPECT_EQ(ComposeJamo(ParseJamo("ㄱㅏ")), "가");
  EXPECT_EQ(ComposeJamo(ParseJamo("ㅉㅏㅇㅜㅁ")), "짜움");
  EXPECT_EQ(ComposeJamo(ParseJamo("ㅎㅗㄹㅏㅇㅇㅣ")), "호랑이");
  EXPECT_EQ(ComposeJamo(ParseJamo("ㅇㅓㅂㅅㅇㅓ")), "없어");
  EXPECT_EQ(ComposeJamo({}), "");
}

TEST(ComposeJamo, RoundTripsEverySyllable) {
  for (char32_t s = kSyllableFirst; s <= kSyllableLast; ++s) {
    ASSERT_EQ(ComposeJamo(DecomposeSyllable(s)), EncodeUtf8(s));
  }
}

TEST(ComposeJamo, ReportsOffsetOfUnparseableToken) {
  try {
    ComposeJamo(ParseJamo("ㄱㅏㅏ"));
    FAIL();
  } catch (const CompositionError& e) {
    EXPECT_EQ(e.offset(), 2u);
  }
  try {
    ComposeJamo(ParseJamo("ㄱㅏㄸ"));
    FAIL();
  } catch (const CompositionError& e) {
    EXPECT_EQ(e.offset(), 2u);
  }
  EXPECT_THROW(ComposeJamo(ParseJamo("ㄱ")), CompositionError);
  EXPECT_EQ(ComposeOrJamo(ParseJamo("ㅏㅁ")), "ㅏㅁ");
}

TEST(AnalyzeSyllables, AssignsRolesAndSpans) {
  auto s = AnalyzeSyllables(ParseJamo("ㅎㅗㄹㅏㅇㅇㅣ"));
  ASSERT_EQ(s.num_syllables, 3);
  EXPECT_EQ(s.slots[4].role, Role::kCoda);
  EXPECT_EQ(s.slots[4].syllable, 1);
  EXPECT_EQ(s.slots[5].role, Role::kOnset);
  EXPECT_EQ(s.slots[5].syllable, 2);
  EXPECT_EQ(s.spans[1], std::make_pair(2, 5));

  auto onsetless = AnalyzeSyllables(ParseJamo("ㅏㅁㅜ"));
  EXPECT_EQ(onsetless.num_syllables, 2);
  EXPECT_EQ(onsetless.slots[0].role, Role::kNucleus);
}

TEST(Vocabulary, LayoutAndIds) {
  const Vocabulary& v = BuildVocabulary();
  EXPECT_EQ(v.size(), 45);
  EXPECT_EQ(*v.Find("<pad>"), 42);
  EXPECT_EQ(v.blank_id(), kPadId);
  EXPECT_EQ(*v.Find("ㄱ"), 0);
  EXPECT_EQ(*v.Find("ㅎ"), 18);
  EXPECT_EQ(*v.Find("ㅏ"), 19);
  EXPECT_EQ(*v.Find("ㅣ"), 39);
  EXPECT_EQ(v.token(kBosId), "<s>");
  EXPECT_EQ(v.token(kEosId), "</s>");
  EXPECT_FALSE(v.Find("x").has_value());

  std::set<std::string> distinct(v.tokens().begin(), v.tokens().end());
  EXPECT_EQ(distinct.size(), 45u);
  int consonants = 0, vowels = 0;
  for (TokenId id = 0; id < kNumJamo; ++id) {
    (Jamo::FromId(id).is_consonant() ? consonants : vowels)++;
  }
  EXPECT_EQ(consonants, 19);
  EXPECT_EQ(vowels, 21);
}

TEST(Vocabulary, SerializationIsLineOriented) {
  const std::string text = BuildVocabulary().Serialize();
  EXPECT_EQ(text, BuildVocabulary().Serialize());
  EXPECT_EQ(text.rfind("<space>\n<unk>\n<pad>\n<s>\n</s>\n"),
            text.size() - std::string("<space>\n<unk>\n<pad>\n<s>\n</s>\n").size());
  EXPECT_EQ(text.substr(0, 4), "ㄱ\n");
}

TEST(FeaturesOf, Examples) {
  auto ch = FeaturesOf(*Jamo::FromCodepoint(U'ㅊ'));
  EXPECT_EQ(ch.place, Place::kAlveoloPalatal);
  EXPECT_EQ(ch.manner, Manner::kAffricate);
  EXPECT_EQ(ch.phonation, Phonation::kAspirated);
  EXPECT_FALSE(ch.rounded);

  auto a = FeaturesOf(*Jamo::FromCodepoint(U'ㅏ'));
  EXPECT_EQ(a.place, Place::kNone);
  EXPECT_FALSE(a.rounded);
  EXPECT_TRUE(FeaturesOf(*Jamo::FromCodepoint(U'ㅘ')).rounded);
}

TEST(FeaturesOf, TotalOnJamoAndRejectsSpecials) {
  for (TokenId id = 0; id < kNumJamo; ++id) {
    auto f = FeaturesOf(id);
    EXPECT_EQ(f, FeaturesOf(id));
    if (id < kNumConsonants) {
      EXPECT_NE(f.place, Place::kNone);
      EXPECT_NE(f.manner, Manner::kNone);
      EXPECT_NE(f.phonation, Phonation::kNone);
      EXPECT_FALSE(f.rounded);
    } else {
      EXPECT_EQ(f.place, Place::kNone);
      EXPECT_EQ(f.manner, Manner::kNone);
      EXPECT_EQ(f.phonation, Phonation::kNone);
    }
  }
  for (TokenId id = kNumJamo; id < kVocabSize; ++id) {
    EXPECT_THROW(FeaturesOf(id), DomainError);
  }
}

TEST(FeatureNames, ParseInverse) {
  EXPECT_EQ(ParsePlace("alveolo-palatal"), Place::kAlveoloPalatal);
  EXPECT_EQ(ParseManner(ToString(Manner::kLiquid)), Manner::kLiquid);
  EXPECT_EQ(ParsePhonation("tense"), Phonation::kTense);
  EXPECT_FALSE(ParsePlace("dental").has_value());
}

}  // namespace
}  // namespace jamoeval
