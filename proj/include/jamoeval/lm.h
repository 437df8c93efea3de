#ifndef JAMOEVAL_LM_H_
#define JAMOEVAL_LM_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "jamoeval/hangul.h"

namespace jamoeval {

using NGram = std::vector<TokenId>;

// Longest supported n-gram order (keys pack 6 bits per token).
inline constexpr int kMaxLmOrder = 10;

// Raw n-gram counts of a corpus. Every sequence is padded with order-1
// <s> tokens and terminated by one </s>; all windows of length 1..order
// are counted.
class CountTable {
 public:
  explicit CountTable(int order);

  int order() const { return order_; }
  // 0 for n-grams that were never seen.
  std::uint64_t Count(std::span<const TokenId> ngram) const;
  // All counted n-grams of length k, sorted by token ids.
  std::vector<std::pair<NGram, std::uint64_t>> Entries(int k) const;
  std::size_t size(int k) const { return tables_.at(k - 1).size(); }

  void Add(std::span<const TokenId> ngram, std::uint64_t count = 1);

  // Packed-key storage, one map per order; exposed for the estimator.
  const std::unordered_map<std::uint64_t, std::uint64_t>& table(int k) const {
    return tables_.at(k - 1);
  }

 private:
  int order_;
  std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> tables_;
};

// Throws DomainError for order outside 1..kMaxLmOrder, an empty corpus, or
// token ids outside the 45-token vocabulary (the message names the id).
CountTable CountNGrams(const std::vector<std::vector<TokenId>>& corpus, int order);
CountTable CountNGrams(const std::vector<JamoSequence>& corpus, int order);

struct SmoothingConfig {
  double discount = 0.75;
  // Used with absolute discounting when every top-order count is 1.
  double fallback_discount = 0.5;
};

struct NGramEntry {
  double log10_prob = 0.0;
  std::optional<double> log10_backoff;

  friend bool operator==(const NGramEntry&, const NGramEntry&) = default;
};

// Backoff n-gram model over the 45-token vocabulary. Predictions cover every
// token except <s>; n-grams ending in <s> exist only to carry backoff weights
// and have log10 probability kLog10Zero.
class NGramModel {
 public:
  static constexpr double kLog10Zero = -99.0;

  explicit NGramModel(int order);

  int order() const { return order_; }
  const Vocabulary& vocab() const { return Vocabulary::Default(); }

  std::optional<NGramEntry> Find(std::span<const TokenId> ngram) const;
  void Set(std::span<const TokenId> ngram, NGramEntry entry);
  std::size_t size(int k) const { return tables_.at(k - 1).size(); }
  // Sorted by token ids.
  std::vector<std::pair<NGram, NGramEntry>> Entries(int k) const;

  // log10 P(token | context) by the backoff recursion. Only the last
  // order-1 context tokens are used; unseen contexts contribute no backoff.
  double ConditionalLog10(std::span<const TokenId> context, TokenId token) const;

 private:
  int order_;
  std::vector<std::unordered_map<std::uint64_t, NGramEntry>> tables_;
};

// Interpolated Kneser-Ney with a fixed discount per order. If every
// top-order count is 1 the estimator falls back to interpolated absolute
// discounting with `fallback_discount` and appends a message to `warnings`.
NGramModel EstimateModel(const CountTable& counts, const SmoothingConfig& config = {},
                         std::vector<std::string>* warnings = nullptr);

// Convenience: count + estimate.
NGramModel TrainModel(const std::vector<JamoSequence>& corpus, int order,
                      const SmoothingConfig& config = {},
                      std::vector<std::string>* warnings = nullptr);

double ConditionalLogProb(const NGramModel& model, std::span<const TokenId> context,
                          TokenId token);

// Sum of conditionals over `seq` followed by </s>, starting from an all-<s>
// context.
double ScoreSequence(const NGramModel& model, const JamoSequence& seq);

// Standard ARPA text: \data\ header, \k-grams: sections with
// "log10prob<TAB>tokens<TAB>backoff", \end\. Values are written in shortest
// round-trip form so parsing restores them exactly.
std::string WriteArpa(const NGramModel& model);
// Throws ParseError with a line number on malformed headers, unknown tokens
// or count mismatches.
NGramModel ParseArpa(std::string_view text);

NGramModel LoadArpa(const std::string& path);
void SaveArpa(const NGramModel& model, const std::string& path);

}  // namespace jamoeval

#endif  // JAMOEVAL_LM_H_
