#include "jamoeval/lm.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "jamoeval/errors.h"

namespace jamoeval {
namespace {

constexpr int kBits = 6;
constexpr std::uint64_t kTokenMask = (1u << kBits) - 1;

void CheckToken(TokenId t) {
  if (t < 0 || t >= kVocabSize)
    throw DomainError("token id " + std::to_string(t) + " is outside the vocabulary");
}

// Token i lives in bits [6i, 6i+6) as id+1, so dropping the first token is a
// right shift and dropping the last is a mask.
std::uint64_t Pack(std::span<const TokenId> g) {
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    key |= static_cast<std::uint64_t>(g[i] + 1) << (kBits * i);
  return key;
}

NGram Unpack(std::uint64_t key, int k) {
  NGram g(k);
  for (int i = 0; i < k; ++i)
    g[i] = static_cast<TokenId>((key >> (kBits * i)) & kTokenMask) - 1;
  return g;
}

TokenId FirstToken(std::uint64_t key) {
  return static_cast<TokenId>(key & kTokenMask) - 1;
}

TokenId LastToken(std::uint64_t key, int k) {
  return static_cast<TokenId>((key >> (kBits * (k - 1))) & kTokenMask) - 1;
}

std::uint64_t Prefix(std::uint64_t key, int k) {
  return key & ((std::uint64_t{1} << (kBits * (k - 1))) - 1);
}

std::uint64_t Suffix(std::uint64_t key) { return key >> kBits; }

void CheckOrder(int order) {
  if (order < 1 || order > kMaxLmOrder)
    throw DomainError("n-gram order must be in 1.." + std::to_string(kMaxLmOrder) +
                      ", got " + std::to_string(order));
}

template <typename V>
std::vector<std::pair<NGram, V>> SortedEntries(
    const std::unordered_map<std::uint64_t, V>& table, int k) {
  std::vector<std::pair<NGram, V>> out;
  out.reserve(table.size());
  for (const auto& [key, value] : table) out.emplace_back(Unpack(key, k), value);
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

struct ContextStats {
  double total = 0.0;
  int types = 0;
  double gamma(double d) const { return d * types / total; }
};

}  // namespace

// --- Counting ------------------------------------------------------------

CountTable::CountTable(int order) : order_(order) {
  CheckOrder(order);
  tables_.resize(order);
}

std::uint64_t CountTable::Count(std::span<const TokenId> ngram) const {
  if (ngram.empty() || static_cast<int>(ngram.size()) > order_) return 0;
  const auto& table = tables_[ngram.size() - 1];
  auto it = table.find(Pack(ngram));
  return it == table.end() ? 0 : it->second;
}

std::vector<std::pair<NGram, std::uint64_t>> CountTable::Entries(int k) const {
  return SortedEntries(tables_.at(k - 1), k);
}

void CountTable::Add(std::span<const TokenId> ngram, std::uint64_t count) {
  if (ngram.empty() || static_cast<int>(ngram.size()) > order_)
    throw DomainError("n-gram length outside 1..order");
  for (TokenId t : ngram) CheckToken(t);
  tables_[ngram.size() - 1][Pack(ngram)] += count;
}

CountTable CountNGrams(const std::vector<std::vector<TokenId>>& corpus, int order) {
  CheckOrder(order);
  if (corpus.empty()) throw DomainError("cannot count n-grams of an empty corpus");
  CountTable table(order);
  std::vector<TokenId> padded;
  for (const auto& seq : corpus) {
    for (TokenId t : seq) CheckToken(t);
    padded.assign(order - 1, kBosId);
    padded.insert(padded.end(), seq.begin(), seq.end());
    padded.push_back(kEosId);
    std::span<const TokenId> all(padded);
    for (std::size_t i = 0; i < padded.size(); ++i)
      for (int k = 1; k <= order && i + k <= padded.size(); ++k)
        table.Add(all.subspan(i, k));
  }
  return table;
}

CountTable CountNGrams(const std::vector<JamoSequence>& corpus, int order) {
  std::vector<std::vector<TokenId>> ids;
  ids.reserve(corpus.size());
  for (const auto& seq : corpus) ids.push_back(ToIds(seq));
  return CountNGrams(ids, order);
}

// --- Model -----------------------------------------------------------------

NGramModel::NGramModel(int order) : order_(order) {
  CheckOrder(order);
  tables_.resize(order);
}

std::optional<NGramEntry> NGramModel::Find(std::span<const TokenId> ngram) const {
  if (ngram.empty() || static_cast<int>(ngram.size()) > order_) return std::nullopt;
  const auto& table = tables_[ngram.size() - 1];
  auto it = table.find(Pack(ngram));
  if (it == table.end()) return std::nullopt;
  return it->second;
}

void NGramModel::Set(std::span<const TokenId> ngram, NGramEntry entry) {
  if (ngram.empty() || static_cast<int>(ngram.size()) > order_)
    throw DomainError("n-gram length outside 1..order");
  for (TokenId t : ngram) CheckToken(t);
  tables_[ngram.size() - 1][Pack(ngram)] = entry;
}

std::vector<std::pair<NGram, NGramEntry>> NGramModel::Entries(int k) const {
  return SortedEntries(tables_.at(k - 1), k);
}

double NGramModel::ConditionalLog10(std::span<const TokenId> context,
                                    TokenId token) const {
  CheckToken(token);
  const std::size_t ctx_len =
      std::min(context.size(), static_cast<std::size_t>(order_ - 1));
  auto ctx = context.last(ctx_len);
  for (TokenId t : ctx) CheckToken(t);

  double backoff = 0.0;
  for (std::size_t len = ctx_len;; --len) {
    auto h = ctx.last(len);
    // Key of (h, token): h occupies the low bits.
    const std::uint64_t hkey = Pack(h);
    const std::uint64_t key =
        hkey | (static_cast<std::uint64_t>(token + 1) << (kBits * len));
    const auto& table = tables_[len];
    if (auto it = table.find(key); it != table.end())
      return backoff + it->second.log10_prob;
    if (len == 0) break;
    const auto& ctx_table = tables_[len - 1];
    if (auto it = ctx_table.find(hkey);
        it != ctx_table.end() && it->second.log10_backoff)
      backoff += *it->second.log10_backoff;
  }
  // Token absent from the unigram table of an externally built model.
  if (auto it = tables_[0].find(Pack(std::array{kUnknownId})); it != tables_[0].end())
    return backoff + it->second.log10_prob;
  return NGramModel::kLog10Zero;
}

// --- Estimation --------------------------------------------------------------

NGramModel EstimateModel(const CountTable& counts, const SmoothingConfig& config,
                         std::vector<std::string>* warnings) {
  const int n = counts.order();
  const auto& top = counts.table(n);
  if (top.empty()) throw DomainError("count table is empty");

  const bool degenerate = std::all_of(top.begin(), top.end(),
                                      [](const auto& kv) { return kv.second == 1; });
  const double d = degenerate ? config.fallback_discount : config.discount;
  if (!(d > 0.0 && d < 1.0))
    throw DomainError("discount must be in (0, 1), got " + std::to_string(d));
  if (degenerate && warnings)
    warnings->push_back(
        "every highest-order n-gram occurs once; continuation counts are "
        "uninformative, using absolute discounting with D=" +
        std::to_string(d));

  // Adjusted counts: raw at the top order (and for n-grams starting with <s>,
  // which have no left context), continuation counts below.
  std::vector<std::unordered_map<std::uint64_t, double>> adjusted(n);
  for (int k = 1; k <= n; ++k) {
    auto& a = adjusted[k - 1];
    const bool raw = k == n || degenerate;
    for (const auto& [key, c] : counts.table(k))
      a[key] = (raw || FirstToken(key) == kBosId) ? static_cast<double>(c) : 0.0;
    if (raw) continue;
    for (const auto& [key, c] : counts.table(k + 1)) {
      const std::uint64_t s = Suffix(key);
      if (FirstToken(s) != kBosId) a[s] += 1.0;
    }
  }

  // Per-order context totals over predicted tokens (everything but <s>).
  std::vector<std::unordered_map<std::uint64_t, ContextStats>> stats(n);
  for (int k = 1; k <= n; ++k) {
    for (const auto& [key, a] : adjusted[k - 1]) {
      if (LastToken(key, k) == kBosId || a <= 0.0) continue;
      auto& s = stats[k - 1][Prefix(key, k)];
      s.total += a;
      s.types += 1;
    }
  }

  // Interpolated probabilities, lowest order first.
  std::vector<std::unordered_map<std::uint64_t, double>> prob(n);
  const double uniform = 1.0 / (kVocabSize - 1);
  {
    const ContextStats& s = stats[0].at(0);
    for (TokenId w = 0; w < kVocabSize; ++w) {
      if (w == kBosId) continue;
      const std::uint64_t key = static_cast<std::uint64_t>(w + 1);
      double a = 0.0;
      if (auto it = adjusted[0].find(key); it != adjusted[0].end()) a = it->second;
      prob[0][key] = std::max(a - d, 0.0) / s.total + s.gamma(d) * uniform;
    }
  }
  for (int k = 2; k <= n; ++k) {
    for (const auto& [key, a] : adjusted[k - 1]) {
      if (LastToken(key, k) == kBosId) continue;
      const ContextStats& s = stats[k - 1].at(Prefix(key, k));
      const double lower = prob[k - 2].at(Suffix(key));
      prob[k - 1][key] = std::max(a - d, 0.0) / s.total + s.gamma(d) * lower;
    }
  }

  NGramModel model(n);
  for (int k = 1; k <= n; ++k) {
    std::vector<std::uint64_t> keys;
    for (const auto& [key, c] : counts.table(k)) keys.push_back(key);
    if (k == 1)
      for (TokenId w = 0; w < kVocabSize; ++w)
        if (!counts.table(1).contains(static_cast<std::uint64_t>(w + 1)))
          keys.push_back(static_cast<std::uint64_t>(w + 1));
    for (std::uint64_t key : keys) {
      NGramEntry entry;
      entry.log10_prob = LastToken(key, k) == kBosId
                             ? NGramModel::kLog10Zero
                             : std::log10(prob[k - 1].at(key));
      if (k < n) {
        auto it = stats[k].find(key);
        entry.log10_backoff = it == stats[k].end() ? 0.0 : std::log10(it->second.gamma(d));
      }
      model.Set(Unpack(key, k), entry);
    }
  }
  return model;
}

NGramModel TrainModel(const std::vector<JamoSequence>& corpus, int order,
                      const SmoothingConfig& config, std::vector<std::string>* warnings) {
  return EstimateModel(CountNGrams(corpus, order), config, warnings);
}

double ConditionalLogProb(const NGramModel& model, std::span<const TokenId> context,
                          TokenId token) {
  return model.ConditionalLog10(context, token);
}

double ScoreSequence(const NGramModel& model, const JamoSequence& seq) {
  std::vector<TokenId> history(model.order() - 1, kBosId);
  double total = 0.0;
  for (const Jamo& j : seq) {
    total += model.ConditionalLog10(history, j.id());
    history.push_back(j.id());
  }
  return total + model.ConditionalLog10(history, kEosId);
}

// --- ARPA ------------------------------------------------------------------

namespace {

void AppendNumber(std::string& out, double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, end);
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

double ParseNumber(std::string_view s, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("expected a number, got '" + std::string(s) + "'", line);
  return value;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

}  // namespace

std::string WriteArpa(const NGramModel& model) {
  const Vocabulary& vocab = model.vocab();
  std::string out = "\\data\\\n";
  for (int k = 1; k <= model.order(); ++k)
    out += "ngram " + std::to_string(k) + "=" + std::to_string(model.size(k)) + "\n";
  for (int k = 1; k <= model.order(); ++k) {
    out += "\n\\" + std::to_string(k) + "-grams:\n";
    for (const auto& [ngram, entry] : model.Entries(k)) {
      AppendNumber(out, entry.log10_prob);
      out += '\t';
      for (std::size_t i = 0; i < ngram.size(); ++i) {
        if (i > 0) out += ' ';
        out += vocab.token(ngram[i]);
      }
      if (entry.log10_backoff) {
        out += '\t';
        AppendNumber(out, *entry.log10_backoff);
      }
      out += '\n';
    }
  }
  out += "\n\\end\\\n";
  return out;
}

NGramModel ParseArpa(std::string_view text) {
  const Vocabulary& vocab = Vocabulary::Default();
  enum class State { kPreamble, kHeader, kBody, kDone } state = State::kPreamble;
  std::vector<std::size_t> declared;
  std::vector<std::size_t> seen;
  std::optional<NGramModel> model;
  int section = 0;
  std::size_t section_line = 0;

  auto close_section = [&](std::size_t line) {
    if (section > 0 && seen[section - 1] != declared[section - 1])
      throw ParseError("\\" + std::to_string(section) + "-grams: header declares " +
                           std::to_string(declared[section - 1]) + " entries, found " +
                           std::to_string(seen[section - 1]),
                       line);
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size() && state != State::kDone) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = Trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;

    switch (state) {
      case State::kPreamble:
        if (line == "\\data\\") state = State::kHeader;
        break;
      case State::kHeader:
        if (line.starts_with("ngram ")) {
          auto eq = line.find('=');
          if (eq == std::string_view::npos)
            throw ParseError("malformed ngram count line", line_no);
          const int k = static_cast<int>(ParseNumber(Trim(line.substr(6, eq - 6)), line_no));
          const double c = ParseNumber(Trim(line.substr(eq + 1)), line_no);
          if (k != static_cast<int>(declared.size()) + 1 || c < 0)
            throw ParseError("ngram counts must be listed in order 1, 2, ...", line_no);
          declared.push_back(static_cast<std::size_t>(c));
          break;
        }
        if (declared.empty()) throw ParseError("missing ngram counts", line_no);
        if (static_cast<int>(declared.size()) > kMaxLmOrder)
          throw ParseError("order exceeds " + std::to_string(kMaxLmOrder), line_no);
        model.emplace(static_cast<int>(declared.size()));
        seen.assign(declared.size(), 0);
        state = State::kBody;
        [[fallthrough]];
      case State::kBody:
        if (line == "\\end\\") {
          close_section(section_line);
          for (std::size_t k = 1; k <= declared.size(); ++k)
            if (seen[k - 1] != declared[k - 1])
              throw ParseError("missing \\" + std::to_string(k) + "-grams: section", line_no);
          state = State::kDone;
          break;
        }
        if (line.front() == '\\') {
          close_section(line_no);
          if (!line.ends_with("-grams:"))
            throw ParseError("unexpected section '" + std::string(line) + "'", line_no);
          const int k = static_cast<int>(
              ParseNumber(line.substr(1, line.size() - 1 - 7), line_no));
          if (k != section + 1 || k > static_cast<int>(declared.size()))
            throw ParseError("unexpected section '" + std::string(line) + "'", line_no);
          section = k;
          section_line = line_no;
          break;
        }
        {
          if (section == 0) throw ParseError("n-gram line outside a section", line_no);
          auto fields = SplitFields(line);
          const std::size_t k = section;
          if (fields.size() != k + 1 && fields.size() != k + 2)
            throw ParseError("expected " + std::to_string(k) + " tokens", line_no);
          NGramEntry entry;
          entry.log10_prob = ParseNumber(fields[0], line_no);
          NGram ngram;
          for (std::size_t i = 1; i <= k; ++i) {
            auto id = vocab.Find(fields[i]);
            if (!id) throw ParseError("unknown token '" + std::string(fields[i]) + "'", line_no);
            ngram.push_back(*id);
          }
          if (fields.size() == k + 2) entry.log10_backoff = ParseNumber(fields[k + 1], line_no);
          if (model->Find(ngram))
            throw ParseError("duplicate n-gram", line_no);
          model->Set(ngram, entry);
          ++seen[k - 1];
          if (seen[k - 1] > declared[k - 1])
            throw ParseError("more " + std::to_string(k) + "-grams than declared", line_no);
        }
        break;
      case State::kDone:
        break;
    }
  }
  if (state != State::kDone)
    throw ParseError(state == State::kPreamble ? "missing \\data\\ header"
                                               : "missing \\end\\ marker",
                     line_no);
  return std::move(*model);
}

NGramModel LoadArpa(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseArpa(buf.str());
}

void SaveArpa(const NGramModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path);
  out << WriteArpa(model);
  if (!out) throw DomainError("failed writing " + path);
}

}  // namespace jamoeval
