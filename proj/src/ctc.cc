#include "jamoeval/ctc.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "jamoeval/errors.h"

namespace jamoeval {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kMaxCells = std::uint64_t{1} << 28;

double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void RequireFinite(const EmissionMatrix& m) {
  for (std::size_t i = 0; i < m.values().size(); ++i)
    if (!std::isfinite(m.values()[i]))
      throw DomainError("non-finite emission at frame " +
                        std::to_string(i / m.vocab_size()) + ", token " +
                        std::to_string(i % m.vocab_size()));
}

void RequireVocab(const EmissionMatrix& m, const Vocabulary& vocab) {
  if (m.vocab_size() != vocab.size())
    throw DomainError("emission matrix has " + std::to_string(m.vocab_size()) +
                      " columns, vocabulary has " + std::to_string(vocab.size()));
}

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

std::uint32_t GetU32(std::string_view bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
  return v;
}

// Best token of a frame: blank wins ties, then the lower id.
int ArgMax(std::span<const float> row, TokenId blank) {
  int best = blank;
  for (int v = 0; v < static_cast<int>(row.size()); ++v)
    if (row[v] > row[best] || (row[v] == row[best] && best != blank && v < best)) best = v;
  return best;
}

struct Beam {
  double pb = kNegInf;
  double pnb = kNegInf;
  double lm = 0.0;
};

bool Better(const LabelHypothesis& a, const LabelHypothesis& b) {
  if (a.combined != b.combined) return a.combined > b.combined;
  return a.labels < b.labels;
}

}  // namespace

EmissionMatrix::EmissionMatrix(int frames, int vocab_size, std::vector<float> values)
    : frames_(frames), vocab_size_(vocab_size), values_(std::move(values)) {
  if (frames < 0 || vocab_size <= 0 ||
      values_.size() != static_cast<std::size_t>(frames) * vocab_size)
    throw DomainError("emission matrix dimensions " + std::to_string(frames) + "x" +
                      std::to_string(vocab_size) + " do not match " +
                      std::to_string(values_.size()) + " values");
}

double MaxRowNormDeviation(const EmissionMatrix& m) {
  double worst = 0.0;
  for (int t = 0; t < m.frames(); ++t) {
    double total = kNegInf;
    for (float v : m.row(t)) total = LogAdd(total, v);
    worst = std::max(worst, std::abs(total));
  }
  return worst;
}

bool RowsNormalized(const EmissionMatrix& m, double tolerance) {
  return MaxRowNormDeviation(m) <= tolerance;
}

std::string SerializeEmissions(const EmissionMatrix& m) {
  std::string out = "JEM1";
  out.reserve(12 + 4 * m.values().size());
  PutU32(out, static_cast<std::uint32_t>(m.frames()));
  PutU32(out, static_cast<std::uint32_t>(m.vocab_size()));
  for (float v : m.values()) PutU32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

EmissionMatrix ParseEmissions(std::string_view bytes) {
  if (bytes.size() < 12) throw FormatError("emission file truncated: header incomplete");
  if (bytes.substr(0, 4) != "JEM1") throw FormatError("emission file has bad magic");
  const std::uint64_t frames = GetU32(bytes, 4);
  const std::uint64_t vocab = GetU32(bytes, 8);
  if (vocab == 0 || frames * vocab > kMaxCells || frames > INT32_MAX || vocab > INT32_MAX)
    throw FormatError("emission dimensions " + std::to_string(frames) + "x" +
                      std::to_string(vocab) + " out of range");
  const std::uint64_t expected = 12 + 4 * frames * vocab;
  if (bytes.size() < expected)
    throw FormatError("emission payload truncated: expected " + std::to_string(expected) +
                      " bytes, got " + std::to_string(bytes.size()));
  if (bytes.size() > expected) throw FormatError("trailing bytes after emission payload");
  std::vector<float> values(frames * vocab);
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = std::bit_cast<float>(GetU32(bytes, 12 + 4 * i));
  return EmissionMatrix(static_cast<int>(frames), static_cast<int>(vocab), std::move(values));
}

EmissionMatrix ReadEmissions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return ParseEmissions(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void WriteEmissions(const EmissionMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path);
  out << SerializeEmissions(m);
  if (!out) throw DomainError("failed writing " + path);
}

std::vector<TokenId> CollapseLabels(std::span<const TokenId> path, TokenId blank) {
  std::vector<TokenId> out;
  TokenId prev = -1;
  for (TokenId t : path) {
    if (t != prev && t != blank) out.push_back(t);
    prev = t;
  }
  return out;
}

JamoSequence CollapsePath(std::span<const TokenId> path) {
  JamoSequence out;
  for (TokenId t : CollapseLabels(path, kPadId))
    if (t >= 0 && t < kNumJamo) out.push_back(Jamo::FromId(t));
  return out;
}

Hypothesis GreedyDecode(const EmissionMatrix& emissions, const Vocabulary& vocab) {
  RequireVocab(emissions, vocab);
  RequireFinite(emissions);
  std::vector<TokenId> path;
  Hypothesis h;
  for (int t = 0; t < emissions.frames(); ++t) {
    const int best = ArgMax(emissions.row(t), vocab.blank_id());
    path.push_back(best);
    h.am_logp += emissions.at(t, best);
  }
  h.sequence = CollapsePath(path);
  h.combined = h.am_logp;
  return h;
}

std::vector<LabelHypothesis> PrefixBeamSearch(const EmissionMatrix& emissions, TokenId blank,
                                              const DecodeConfig& config,
                                              const NGramModel* lm,
                                              const std::vector<bool>& emittable) {
  const int V = emissions.vocab_size();
  if (blank < 0 || blank >= V) throw DomainError("blank id outside the emission columns");
  if (config.beam_width < 1) throw DomainError("beam width must be at least 1");
  if (config.lm_weight < 0) throw DomainError("LM weight must be non-negative");
  if (!emittable.empty() && static_cast<int>(emittable.size()) != V)
    throw DomainError("emittable mask size differs from the vocabulary");
  RequireFinite(emissions);
  const bool use_lm = lm != nullptr && config.lm_weight != 0.0;
  if (use_lm && V != kVocabSize)
    throw DomainError("LM fusion needs the 45-token vocabulary");

  const double ln10 = std::numbers::ln10;
  auto lm_step = [&](const std::vector<TokenId>& prefix, TokenId token) {
    std::vector<TokenId> ctx(lm->order() - 1, kBosId);
    ctx.insert(ctx.end(), prefix.begin(), prefix.end());
    return ln10 * lm->ConditionalLog10(ctx, token);
  };
  auto score = [&](const LabelHypothesis& h) {
    return h.am_logp + config.lm_weight * h.lm_logp +
           config.length_bonus * static_cast<double>(h.labels.size());
  };

  std::map<std::vector<TokenId>, Beam> beams;
  beams[{}] = Beam{0.0, kNegInf, 0.0};
  std::vector<TokenId> candidates;

  for (int t = 0; t < emissions.frames(); ++t) {
    const auto row = emissions.row(t);
    candidates.clear();
    int best = blank;
    for (int c = 0; c < V; ++c) {
      if (c != blank && !emittable.empty() && !emittable[c]) continue;
      if (row[c] > row[best]) best = c;
    }
    for (int c = 0; c < V; ++c) {
      if (c != blank && !emittable.empty() && !emittable[c]) continue;
      if (row[c] >= config.prune_logp || c == best) candidates.push_back(c);
    }

    std::map<std::vector<TokenId>, Beam> next;
    auto slot = [&](const std::vector<TokenId>& prefix, double lm_value) -> Beam& {
      auto [it, inserted] = next.try_emplace(prefix);
      if (inserted) it->second.lm = lm_value;
      return it->second;
    };
    for (const auto& [prefix, b] : beams) {
      const double total = LogAdd(b.pb, b.pnb);
      for (TokenId c : candidates) {
        const double p = row[c];
        if (c == blank) {
          Beam& same = slot(prefix, b.lm);
          same.pb = LogAdd(same.pb, total + p);
          continue;
        }
        std::vector<TokenId> ext = prefix;
        ext.push_back(c);
        auto [it, inserted] = next.try_emplace(ext);
        if (inserted) it->second.lm = b.lm + (use_lm ? lm_step(prefix, c) : 0.0);
        if (!prefix.empty() && prefix.back() == c) {
          Beam& same = slot(prefix, b.lm);
          same.pnb = LogAdd(same.pnb, b.pnb + p);
          it->second.pnb = LogAdd(it->second.pnb, b.pb + p);
        } else {
          it->second.pnb = LogAdd(it->second.pnb, total + p);
        }
      }
    }

    std::vector<LabelHypothesis> ranked;
    ranked.reserve(next.size());
    for (const auto& [prefix, b] : next) {
      LabelHypothesis h{prefix, LogAdd(b.pb, b.pnb), b.lm, 0.0};
      if (h.am_logp == kNegInf) continue;
      h.combined = score(h);
      ranked.push_back(std::move(h));
    }
    const std::size_t keep = std::min<std::size_t>(ranked.size(), config.beam_width);
    std::partial_sort(ranked.begin(), ranked.begin() + keep, ranked.end(), Better);
    beams.clear();
    for (std::size_t i = 0; i < keep; ++i)
      beams[ranked[i].labels] = Beam{next.at(ranked[i].labels).pb,
                                     next.at(ranked[i].labels).pnb, ranked[i].lm_logp};
  }

  std::vector<LabelHypothesis> out;
  out.reserve(beams.size());
  for (const auto& [prefix, b] : beams) {
    LabelHypothesis h{prefix, LogAdd(b.pb, b.pnb), b.lm, 0.0};
    if (use_lm) h.lm_logp += lm_step(prefix, kEosId);
    h.combined = score(h);
    out.push_back(std::move(h));
  }
  std::sort(out.begin(), out.end(), Better);
  return out;
}

std::vector<Hypothesis> PrefixBeamDecode(const EmissionMatrix& emissions,
                                         const DecodeConfig& config, const NGramModel* lm,
                                         const Vocabulary& vocab) {
  RequireVocab(emissions, vocab);
  std::vector<bool> emittable(vocab.size(), false);
  for (TokenId id = 0; id < kNumJamo; ++id) emittable[id] = true;
  std::vector<Hypothesis> out;
  for (auto& h : PrefixBeamSearch(emissions, vocab.blank_id(), config, lm, emittable)) {
    JamoSequence seq;
    for (TokenId id : h.labels) seq.push_back(Jamo::FromId(id));
    out.push_back(Hypothesis{std::move(seq), h.am_logp, h.lm_logp, h.combined});
  }
  return out;
}

}  // namespace jamoeval
