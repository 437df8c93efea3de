#include "jamoeval/metrics.h"

#include <algorithm>

#include "jamoeval/errors.h"

namespace jamoeval {

std::string_view ToString(OpKind kind) {
  switch (kind) {
    case OpKind::kCorrect: return "correct";
    case OpKind::kSubstitution: return "substitution";
    case OpKind::kDeletion: return "deletion";
    case OpKind::kInsertion: return "insertion";
  }
  return "?";
}

Alignment Align(const JamoSequence& ref, const JamoSequence& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<int> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> int& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      at(i, j) = std::min({at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1),
                           at(i - 1, j) + 1, at(i, j - 1) + 1});

  Alignment a;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && at(i, j) == at(i - 1, j - 1)) {
      a.ops.push_back({OpKind::kCorrect, ref[i - 1], hyp[j - 1]});
      ++a.correct;
      --i, --j;
    } else if (i > 0 && j > 0 && ref[i - 1] != hyp[j - 1] &&
               at(i, j) == at(i - 1, j - 1) + 1) {
      a.ops.push_back({OpKind::kSubstitution, ref[i - 1], hyp[j - 1]});
      ++a.substitutions;
      --i, --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      a.ops.push_back({OpKind::kDeletion, ref[i - 1], std::nullopt});
      ++a.deletions;
      --i;
    } else {
      a.ops.push_back({OpKind::kInsertion, std::nullopt, hyp[j - 1]});
      ++a.insertions;
      --j;
    }
  }
  std::reverse(a.ops.begin(), a.ops.end());
  return a;
}

double PhonemeErrorRate(std::span<const Alignment> alignments) {
  std::int64_t errors = 0, length = 0;
  for (const Alignment& a : alignments) {
    errors += a.errors();
    length += a.ref_length();
  }
  if (length == 0) throw DomainError("error rate undefined: reference corpus is empty");
  return static_cast<double>(errors) / static_cast<double>(length);
}

JamoSequence ConsonantsOnly(const JamoSequence& seq) {
  JamoSequence out;
  for (const Jamo& j : seq)
    if (j.is_consonant()) out.push_back(j);
  return out;
}

double ConsonantErrorRate(std::span<const SequencePair> pairs) {
  std::vector<Alignment> filtered;
  filtered.reserve(pairs.size());
  for (const auto& [ref, hyp] : pairs)
    filtered.push_back(Align(ConsonantsOnly(ref), ConsonantsOnly(hyp)));
  return PhonemeErrorRate(filtered);
}

void F1Counts::Add(const Alignment& a) {
  for (const AlignmentOp& op : a.ops) {
    const bool ref_c = op.ref && op.ref->is_consonant();
    const bool hyp_c = op.hyp && op.hyp->is_consonant();
    switch (op.kind) {
      case OpKind::kCorrect:
        tp += ref_c;
        break;
      case OpKind::kSubstitution:
        fp += hyp_c;
        fn += ref_c;
        break;
      case OpKind::kDeletion:
        fn += ref_c;
        break;
      case OpKind::kInsertion:
        fp += hyp_c;
        break;
    }
  }
}

double F1Counts::F1() const {
  const std::int64_t denom = 2 * tp + fp + fn;
  if (denom == 0) throw DomainError("consonant F1 undefined: corpus has no consonants");
  return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

double ConsonantF1(std::span<const Alignment> alignments) {
  F1Counts counts;
  for (const Alignment& a : alignments) counts.Add(a);
  return counts.F1();
}

void ConfusionMatrix::Add(const Alignment& a) {
  for (const AlignmentOp& op : a.ops) {
    if (!op.ref || !op.ref->is_consonant()) continue;
    const int r = op.ref->id();
    switch (op.kind) {
      case OpKind::kCorrect:
        ++correct_[r];
        break;
      case OpKind::kSubstitution:
        ++substituted_[r];
        if (op.hyp->is_consonant()) ++cells_[r][op.hyp->id()];
        break;
      case OpKind::kDeletion:
        ++deletions_[r];
        break;
      case OpKind::kInsertion:
        break;
    }
  }
}

void ConfusionMatrix::Merge(const ConfusionMatrix& other) {
  for (int r = 0; r < kNumConsonants; ++r) {
    for (int h = 0; h < kNumConsonants; ++h) cells_[r][h] += other.cells_[r][h];
    correct_[r] += other.correct_[r];
    deletions_[r] += other.deletions_[r];
    substituted_[r] += other.substituted_[r];
  }
}

std::int64_t ConfusionMatrix::row_total(int from) const {
  std::int64_t total = 0;
  for (std::int64_t c : cells_[from]) total += c;
  return total;
}

std::array<double, kNumConsonants> ConfusionMatrix::RatioRow(int from) const {
  std::array<double, kNumConsonants> row{};
  const std::int64_t total = row_total(from);
  if (total == 0) return row;
  for (int h = 0; h < kNumConsonants; ++h)
    row[h] = static_cast<double>(cells_[from][h]) / static_cast<double>(total);
  return row;
}

std::optional<ConfusionMatrix::Ratios> ConfusionMatrix::ConsonantRatios(int c) const {
  const std::int64_t n = references(c);
  if (n == 0) return std::nullopt;
  const double total = static_cast<double>(n);
  return Ratios{correct_[c] / total, deletions_[c] / total, substituted_[c] / total};
}

ConfusionMatrix Confusion(std::span<const Alignment> alignments) {
  ConfusionMatrix m;
  for (const Alignment& a : alignments) m.Add(a);
  return m;
}

}  // namespace jamoeval
