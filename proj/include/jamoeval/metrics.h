#ifndef JAMOEVAL_METRICS_H_
#define JAMOEVAL_METRICS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "jamoeval/hangul.h"

namespace jamoeval {

enum class OpKind { kCorrect, kSubstitution, kDeletion, kInsertion };

std::string_view ToString(OpKind kind);

struct AlignmentOp {
  OpKind kind;
  std::optional<Jamo> ref;
  std::optional<Jamo> hyp;

  friend bool operator==(const AlignmentOp&, const AlignmentOp&) = default;
};

struct Alignment {
  std::vector<AlignmentOp> ops;
  int correct = 0;
  int substitutions = 0;
  int deletions = 0;
  int insertions = 0;

  int errors() const { return substitutions + deletions + insertions; }
  int ref_length() const { return correct + substitutions + deletions; }
  int hyp_length() const { return correct + substitutions + insertions; }

  friend bool operator==(const Alignment&, const Alignment&) = default;
};

// Unit-cost Levenshtein alignment. Backtrace prefers correct, then
// substitution, deletion, insertion.
Alignment Align(const JamoSequence& ref, const JamoSequence& hyp);

using SequencePair = std::pair<JamoSequence, JamoSequence>;  // (ref, hyp)

// Pooled: total errors over total reference length. Throws DomainError when
// the reference total is zero.
double PhonemeErrorRate(std::span<const Alignment> alignments);

JamoSequence ConsonantsOnly(const JamoSequence& seq);

// Filters both sides to consonants, re-aligns, pools.
double ConsonantErrorRate(std::span<const SequencePair> pairs);

struct F1Counts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  void Add(const Alignment& a);
  // Throws DomainError when no consonant appears on either side.
  double F1() const;
};

// Micro F1 over consonant tokens of full-sequence alignments.
double ConsonantF1(std::span<const Alignment> alignments);

// Consonant-indexed tallies (index = jamo id 0..18).
class ConfusionMatrix {
 public:
  struct Ratios {
    double correct;
    double deletion;
    double substitution;
  };

  void Add(const Alignment& a);
  void Merge(const ConfusionMatrix& other);

  std::int64_t substitutions(int from, int to) const { return cells_[from][to]; }
  std::int64_t correct(int c) const { return correct_[c]; }
  std::int64_t deletions(int c) const { return deletions_[c]; }
  // Substitutions of `c` by any token, vowels included.
  std::int64_t substituted(int c) const { return substituted_[c]; }
  std::int64_t references(int c) const { return correct_[c] + deletions_[c] + substituted_[c]; }
  std::int64_t row_total(int from) const;

  // Substitution row normalized to 1; all zeros for rows without
  // consonant-to-consonant substitutions.
  std::array<double, kNumConsonants> RatioRow(int from) const;
  // Correct/deletion/substitution shares of reference occurrences; nullopt
  // when the consonant never occurs in a reference.
  std::optional<Ratios> ConsonantRatios(int c) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::array<std::array<std::int64_t, kNumConsonants>, kNumConsonants> cells_{};
  std::array<std::int64_t, kNumConsonants> correct_{};
  std::array<std::int64_t, kNumConsonants> deletions_{};
  std::array<std::int64_t, kNumConsonants> substituted_{};
};

ConfusionMatrix Confusion(std::span<const Alignment> alignments);

}  // namespace jamoeval

#endif  // JAMOEVAL_METRICS_H_
