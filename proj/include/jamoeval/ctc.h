#ifndef JAMOEVAL_CTC_H_
#define JAMOEVAL_CTC_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jamoeval/hangul.h"
#include "jamoeval/lm.h"

namespace jamoeval {

// T x V natural-log probabilities, row-major.
class EmissionMatrix {
 public:
  EmissionMatrix() = default;
  // Throws DomainError if values.size() != frames * vocab_size.
  EmissionMatrix(int frames, int vocab_size, std::vector<float> values);

  int frames() const { return frames_; }
  int vocab_size() const { return vocab_size_; }
  float at(int t, int v) const { return values_[static_cast<std::size_t>(t) * vocab_size_ + v]; }
  std::span<const float> row(int t) const {
    return std::span(values_).subspan(static_cast<std::size_t>(t) * vocab_size_, vocab_size_);
  }
  const std::vector<float>& values() const { return values_; }

  friend bool operator==(const EmissionMatrix&, const EmissionMatrix&) = default;

 private:
  int frames_ = 0;
  int vocab_size_ = 0;
  std::vector<float> values_;
};

// Largest |logsumexp(row)| over all rows.
double MaxRowNormDeviation(const EmissionMatrix& m);
bool RowsNormalized(const EmissionMatrix& m, double tolerance = 1e-4);

// JEM1: "JEM1", u32 T, u32 V, T*V float32, all little-endian.
std::string SerializeEmissions(const EmissionMatrix& m);
// Throws FormatError on bad magic, oversized dimensions or a truncated or
// oversized payload.
EmissionMatrix ParseEmissions(std::string_view bytes);
EmissionMatrix ReadEmissions(const std::string& path);
void WriteEmissions(const EmissionMatrix& m, const std::string& path);

struct DecodeConfig {
  int beam_width = 100;
  double lm_weight = 0.5;     // alpha
  double length_bonus = 1.5;  // beta, per emitted token
  double prune_logp = -10.0;
};

// Labels are raw token ids; lm_logp is in natural log.
struct LabelHypothesis {
  std::vector<TokenId> labels;
  double am_logp = 0.0;
  double lm_logp = 0.0;
  double combined = 0.0;
};

struct Hypothesis {
  JamoSequence sequence;
  double am_logp = 0.0;
  double lm_logp = 0.0;
  double combined = 0.0;
};

// Merge repeats, drop `blank`.
std::vector<TokenId> CollapseLabels(std::span<const TokenId> path, TokenId blank);
// Merge repeats, drop the blank and any other special token.
JamoSequence CollapsePath(std::span<const TokenId> path);

// Best path. Ties prefer the blank, then the lower token id. Throws
// DomainError unless V == 45 and every value is finite.
Hypothesis GreedyDecode(const EmissionMatrix& emissions,
                        const Vocabulary& vocab = Vocabulary::Default());

// Vocabulary-agnostic CTC prefix beam search over labels 0..V-1 except
// `blank`. `emittable` (if non-empty, size V) restricts which labels may be
// emitted. With an LM (V must be 45) each extension by t adds
// alpha*ln10*log10 P(t | prefix) and the end-of-sequence cost is added once
// at the end. Results are best-first, ties by label order.
std::vector<LabelHypothesis> PrefixBeamSearch(const EmissionMatrix& emissions, TokenId blank,
                                              const DecodeConfig& config,
                                              const NGramModel* lm = nullptr,
                                              const std::vector<bool>& emittable = {});

// Jamo decoding over the 45-token vocabulary: only the 40 jamo are emitted
// and <pad> is the blank.
std::vector<Hypothesis> PrefixBeamDecode(const EmissionMatrix& emissions,
                                         const DecodeConfig& config,
                                         const NGramModel* lm = nullptr,
                                         const Vocabulary& vocab = Vocabulary::Default());

}  // namespace jamoeval

#endif  // JAMOEVAL_CTC_H_
