#include "jamoeval/metrics.h"

#include <functional>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "jamoeval/errors.h"

namespace jamoeval {
namespace {

JamoSequence J(const char* s) { return ParseJamo(s); }

int Id(const char* jamo) { return ParseJamo(jamo).at(0).id(); }

// Plain recursive edit distance with memoization.
int EditDistanceOracle(const JamoSequence& a, const JamoSequence& b) {
  std::vector<int> memo((a.size() + 1) * (b.size() + 1), -1);
  std::function<int(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) {
    int& slot = memo[i * (b.size() + 1) + j];
    if (slot >= 0) return slot;
    if (i == a.size()) return slot = static_cast<int>(b.size() - j);
    if (j == b.size()) return slot = static_cast<int>(a.size() - i);
    return slot = std::min({go(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1), go(i + 1, j) + 1,
                            go(i, j + 1) + 1});
  };
  return go(0, 0);
}

std::vector<JamoSequence> AllSequences(const JamoSequence& alphabet, std::size_t length) {
  std::vector<JamoSequence> out{{}};
  for (std::size_t k = 0; k < length; ++k) {
    std::vector<JamoSequence> next;
    for (const auto& s : out)
      for (const Jamo& j : alphabet) {
        next.push_back(s);
        next.back().push_back(j);
      }
    out = std::move(next);
  }
  return out;
}

void ExpectConsistent(const Alignment& a, const JamoSequence& ref, const JamoSequence& hyp) {
  ASSERT_EQ(a.ref_length(), static_cast<int>(ref.size()));
  ASSERT_EQ(a.hyp_length(), static_cast<int>(hyp.size()));
  JamoSequence r, h;
  for (const auto& op : a.ops) {
    switch (op.kind) {
      case OpKind::kCorrect:
        ASSERT_TRUE(op.ref && op.hyp && *op.ref == *op.hyp);
        break;
      case OpKind::kSubstitution:
        ASSERT_TRUE(op.ref && op.hyp && *op.ref != *op.hyp);
        break;
      case OpKind::kDeletion:
        ASSERT_TRUE(op.ref && !op.hyp);
        break;
      case OpKind::kInsertion:
        ASSERT_TRUE(!op.ref && op.hyp);
        break;
    }
    if (op.ref) r.push_back(*op.ref);
    if (op.hyp) h.push_back(*op.hyp);
  }
  ASSERT_EQ(r, ref);
  ASSERT_EQ(h, hyp);
}

TEST(Align, Examples) {
  Alignment a = Align(J("ㄱㅏ"), J("ㄱㅏ"));
  EXPECT_EQ(a.correct, 2);
  EXPECT_EQ(a.errors(), 0);

  a = Align(DecomposeText("호랑이"), DecomposeText("호라이"));
  EXPECT_EQ(a.deletions, 1);
  EXPECT_EQ(a.substitutions, 0);
  EXPECT_EQ(a.insertions, 0);
  EXPECT_EQ(a.errors(), 1);

  a = Align({}, J("ㄱ"));
  EXPECT_EQ(a.insertions, 1);
  EXPECT_TRUE(Align({}, {}).ops.empty());
}

TEST(Align, TieBreakPrefersSubstitutionOverDeletionInsertion) {
  const Alignment a = Align(J("ㄱ"), J("ㄴ"));
  ASSERT_EQ(a.ops.size(), 1u);
  EXPECT_EQ(a.ops[0].kind, OpKind::kSubstitution);
}

// Every pair with |ref| + |hyp| <= 8 over a 4-jamo alphabet.
TEST(Align, ExhaustiveAgainstRecursiveOracle) {
  const JamoSequence alphabet = J("ㄱㄴㅏㅗ");
  std::vector<std::vector<JamoSequence>> by_length;
  for (std::size_t k = 0; k <= 8; ++k) by_length.push_back(AllSequences(alphabet, k));
  std::size_t pairs = 0;
  for (std::size_t la = 0; la <= 8; ++la)
    for (std::size_t lb = 0; la + lb <= 8; ++lb)
      for (const auto& ref : by_length[la])
        for (const auto& hyp : by_length[lb]) {
          const Alignment a = Align(ref, hyp);
          ASSERT_EQ(a.errors(), EditDistanceOracle(ref, hyp));
          ExpectConsistent(a, ref, hyp);
          ++pairs;
        }
  EXPECT_GT(pairs, 700000u);
}

TEST(PhonemeErrorRate, Values) {
  std::vector<Alignment> same{Align(J("ㄱㅏ"), J("ㄱㅏ"))};
  EXPECT_EQ(PhonemeErrorRate(same), 0.0);
  std::vector<Alignment> horangi{Align(DecomposeText("호랑이"), DecomposeText("호라이"))};
  EXPECT_NEAR(PhonemeErrorRate(horangi), 1.0 / 7.0, 1e-12);

  // Pooled, not averaged: (1 + 2) / (7 + 2).
  std::vector<Alignment> mixed{horangi[0], Align(J("ㄱㅏ"), J("ㄴㅓ"))};
  EXPECT_NEAR(PhonemeErrorRate(mixed), 3.0 / 9.0, 1e-12);
  // Duplicating every pair leaves the rate unchanged.
  std::vector<Alignment> doubled = mixed;
  doubled.insert(doubled.end(), mixed.begin(), mixed.end());
  EXPECT_DOUBLE_EQ(PhonemeErrorRate(doubled), PhonemeErrorRate(mixed));

  EXPECT_THROW(PhonemeErrorRate(std::vector<Alignment>{}), DomainError);
  EXPECT_THROW(PhonemeErrorRate(std::vector<Alignment>{Align({}, J("ㄱ"))}), DomainError);
}

TEST(ConsonantErrorRate, Values) {
  std::vector<SequencePair> pairs{{J("ㄱㅏㅁ"), J("ㄱㅗㅁ")}};
  EXPECT_EQ(ConsonantErrorRate(pairs), 0.0);
  pairs = {{DecomposeText("호랑이"), DecomposeText("호라이")}};
  EXPECT_NEAR(ConsonantErrorRate(pairs), 0.25, 1e-12);
  pairs = {{J("ㅏㅗ"), J("ㅏ")}};
  EXPECT_THROW(ConsonantErrorRate(pairs), DomainError);
}

TEST(ConsonantErrorRate, InvisibleToVowelEdits) {
  std::mt19937_64 rng(3);
  const JamoSequence consonants = J("ㄱㄴㄷㄹㅁㅇㅎ");
  const JamoSequence vowels = J("ㅏㅓㅗㅜㅣ");
  for (int trial = 0; trial < 200; ++trial) {
    JamoSequence ref, hyp;
    for (int i = 0; i < 8; ++i)
      ref.push_back(rng() % 2 ? consonants[rng() % 7] : vowels[rng() % 5]);
    ref.push_back(consonants[0]);
    for (int i = 0; i < 8; ++i)
      hyp.push_back(rng() % 2 ? consonants[rng() % 7] : vowels[rng() % 5]);
    std::vector<SequencePair> base{{ref, hyp}};
    const double before = ConsonantErrorRate(base);
    JamoSequence edited;
    for (const Jamo& j : hyp) {
      if (j.is_vowel()) {
        const auto r = rng() % 3;
        if (r == 0) continue;                            // delete vowel
        if (r == 1) edited.push_back(vowels[rng() % 5]);  // substitute vowel
        else edited.push_back(j);
        if (rng() % 4 == 0) edited.push_back(vowels[rng() % 5]);  // insert vowel
      } else {
        edited.push_back(j);
      }
    }
    std::vector<SequencePair> after{{ref, edited}};
    EXPECT_EQ(ConsonantErrorRate(after), before);
  }
}

TEST(ConsonantF1, Values) {
  std::vector<Alignment> perfect{Align(J("ㄱㅏㄴ"), J("ㄱㅏㄴ"))};
  EXPECT_EQ(ConsonantF1(perfect), 1.0);
  std::vector<Alignment> sub{Align(J("ㄱㅏ"), J("ㄷㅏ"))};
  F1Counts c;
  c.Add(sub[0]);
  EXPECT_EQ(c.tp, 0);
  EXPECT_EQ(c.fp, 1);
  EXPECT_EQ(c.fn, 1);
  EXPECT_EQ(ConsonantF1(sub), 0.0);
  std::vector<Alignment> vowels{Align(J("ㅏ"), J("ㅓ"))};
  EXPECT_THROW(ConsonantF1(vowels), DomainError);
}

TEST(ConsonantF1, MixedCorpusHandCount) {
  // ㄱㅏㄴㅏ -> ㄱㅏㅏ: ㄴ deleted                 TP 1, FN 1
  // ㅂㅏㅈㅣ -> ㅂㅏㅈㅣㄱ: ㄱ inserted             TP 2, FP 1
  // ㅅㅏㅌㅏㅇ -> ㅅㅓㄷㅏㅇ: ㅏ->ㅓ, ㅌ->ㄷ       TP 2, FP 1, FN 1
  // ㅁㅜ -> ㅏㅜ: consonant->vowel substitution   FN 1
  std::vector<Alignment> corpus{Align(J("ㄱㅏㄴㅏ"), J("ㄱㅏㅏ")),
                                Align(J("ㅂㅏㅈㅣ"), J("ㅂㅏㅈㅣㄱ")),
                                Align(J("ㅅㅏㅌㅏㅇ"), J("ㅅㅓㄷㅏㅇ")),
                                Align(J("ㅁㅜ"), J("ㅏㅜ"))};
  F1Counts c;
  for (const auto& a : corpus) c.Add(a);
  EXPECT_EQ(c.tp, 5);
  EXPECT_EQ(c.fp, 2);
  EXPECT_EQ(c.fn, 3);
  EXPECT_NEAR(ConsonantF1(corpus), 10.0 / 15.0, 1e-12);
}

TEST(Confusion, SingleSubstitution) {
  std::vector<Alignment> corpus{Align(J("ㄴㅏ"), J("ㅇㅏ"))};
  const ConfusionMatrix m = Confusion(corpus);
  const int n = Id("ㄴ"), ng = Id("ㅇ");
  EXPECT_EQ(m.substitutions(n, ng), 1);
  EXPECT_DOUBLE_EQ(m.RatioRow(n)[ng], 1.0);
  const auto r = m.ConsonantRatios(n);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->substitution, 1.0);
  EXPECT_FALSE(m.ConsonantRatios(Id("ㄱ")));
}

TEST(Confusion, PerfectCorpusHasNoOffDiagonalMass) {
  std::vector<Alignment> corpus{Align(DecomposeText("호랑이"), DecomposeText("호랑이")),
                                Align(DecomposeText("사탕"), DecomposeText("사탕"))};
  const ConfusionMatrix m = Confusion(corpus);
  for (int r = 0; r < kNumConsonants; ++r) {
    EXPECT_EQ(m.row_total(r), 0);
    EXPECT_EQ(m.deletions(r), 0);
  }
  EXPECT_EQ(m.correct(Id("ㅇ")), 3);
}

TEST(Confusion, RatiosSumToOneAndMergeIsAssociative) {
  std::mt19937_64 rng(11);
  std::vector<Alignment> corpus;
  const JamoSequence pool = J("ㄱㄴㄷㄹㅁㅂㅅㅇㅈㅏㅓㅗ");
  for (int i = 0; i < 300; ++i) {
    JamoSequence ref, hyp;
    for (int k = 0; k < 6; ++k) ref.push_back(pool[rng() % pool.size()]);
    for (int k = 0; k < 5 + static_cast<int>(rng() % 3); ++k) hyp.push_back(pool[rng() % pool.size()]);
    corpus.push_back(Align(ref, hyp));
  }
  const ConfusionMatrix whole = Confusion(corpus);
  ConfusionMatrix left = Confusion(std::span(corpus).first(100));
  left.Merge(Confusion(std::span(corpus).subspan(100)));
  EXPECT_EQ(whole, left);
  for (int c = 0; c < kNumConsonants; ++c) {
    if (auto r = whole.ConsonantRatios(c))
      EXPECT_NEAR(r->correct + r->deletion + r->substitution, 1.0, 1e-12);
    if (whole.row_total(c) > 0) {
      double sum = 0.0;
      for (double v : whole.RatioRow(c)) sum += v;
      EXPECT_NEAR(sum, 1.0, 1e-9);
    }
  }
}

}  // namespace
}  // namespace jamoeval
