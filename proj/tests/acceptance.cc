// Acceptance suite: one PASS/FAIL line per criterion, with wall time and the
// time budget where one applies. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.h"
#include "jamoeval/corpus.h"
#include "jamoeval/ctc.h"
#include "jamoeval/hangul.h"
#include "jamoeval/lm.h"
#include "jamoeval/metrics.h"
#include "jamoeval/report.h"
#include "jamoeval/rules.h"

namespace fs = std::filesystem;
using namespace jamoeval;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;  // 0 = untimed
  std::function<Outcome()> run;
};

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Runs the CLI; throws with its stderr on a nonzero exit.
std::string Cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  if (code != 0) {
    std::string cmd;
    for (const auto& a : args) cmd += a + " ";
    throw std::runtime_error("jamoeval " + cmd + "exited " + std::to_string(code) + ": " +
                             err.str());
  }
  return out.str();
}

fs::path Scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "jamoeval_acceptance" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// ---------------------------------------------------------------------------

Outcome HangulRoundTrip() {
  int ok = 0;
  for (char32_t cp = 0xAC00; cp <= 0xD7A3; ++cp)
    ok += ComposeJamo(DecomposeSyllable(cp)) == EncodeUtf8(cp);
  return {ok == 11172, Format("%d/11172 syllables exact", ok)};
}

Outcome DecomposeExample() {
  const std::string joined = Cli({"decompose", "--joined", "짜움"});
  const std::string spaced = Cli({"decompose", "짜움"});
  const bool pass = joined == "ㅉㅏㅇㅜㅁ\n" && spaced == "ㅉ ㅏ ㅇ ㅜ ㅁ\n";
  return {pass, "decompose 짜움 -> " + spaced.substr(0, spaced.size() - 1)};
}

Outcome AppliedWords() {
  const std::map<std::string, std::vector<std::string>> expected{
      {"호랑이", {"호라이"}}, {"단추", {"단뚜", "단두", "단투"}}, {"바지", {"바쥐", "봐지", "봐쥐"}}};
  int found = 0;
  bool double_rounding_depth2 = false;
  for (const auto& [word, forms] : expected) {
    std::map<std::string, std::size_t> depth;
    for (const auto& v : GenerateVariants(word, DefaultRules(), 2))
      depth[ComposeOrJamo(v.sequence)] = v.applications.size();
    for (const auto& f : forms) found += depth.count(f);
    if (word == "바지") double_rounding_depth2 = depth.count("봐쥐") && depth["봐쥐"] == 2;
  }
  return {found == 7 && double_rounding_depth2,
          Format("%d/7 applied words generated; 봐쥐 needs two applications: %s", found,
                 double_rounding_depth2 ? "yes" : "no")};
}

const ErrorLexicon& Lexicon73() {
  static const ErrorLexicon lex = BuildErrorLexicon(ClinicalWordList(), DefaultRules(), 2);
  return lex;
}

const NGramModel& LexiconModel() {
  static const NGramModel m = TrainModel(Lexicon73().Pronunciations(), 5);
  return m;
}

Outcome LmNormalization() {
  const NGramModel& m = LexiconModel();
  const auto corpus = Lexicon73().Pronunciations();
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int k = static_cast<int>(rng() % 5);
    std::vector<TokenId> ctx;
    if (i % 2 == 0) {
      // History observed in training, padded with <s>.
      const JamoSequence& s = corpus[rng() % corpus.size()];
      const int pos = static_cast<int>(rng() % (s.size() + 1));
      for (int j = pos - k; j < pos; ++j) ctx.push_back(j < 0 ? kBosId : s[j].id());
    } else {
      for (int j = 0; j < k; ++j) ctx.push_back(static_cast<TokenId>(rng() % kNumJamo));
    }
    double sum = 0.0;
    for (TokenId w = 0; w < kVocabSize; ++w)
      if (w != kBosId) sum += std::pow(10.0, m.ConditionalLog10(ctx, w));
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return {worst <= 1e-6,
          Format("1000 contexts, max |sum - 1| = %.3g (%zu pronunciations, 5-gram)", worst,
                 corpus.size())};
}

Outcome ArpaRoundTrip() {
  const NGramModel& m = LexiconModel();
  const NGramModel back = ParseArpa(WriteArpa(m));
  bool structure = back.order() == m.order();
  double worst = 0.0;
  std::size_t entries = 0;
  for (int k = 1; k <= m.order() && structure; ++k) {
    const auto a = m.Entries(k), b = back.Entries(k);
    structure = a.size() == b.size();
    for (std::size_t i = 0; structure && i < a.size(); ++i) {
      structure = a[i].first == b[i].first &&
                  a[i].second.log10_backoff.has_value() == b[i].second.log10_backoff.has_value();
      worst = std::max(worst, std::abs(a[i].second.log10_prob - b[i].second.log10_prob));
      if (a[i].second.log10_backoff)
        worst = std::max(worst, std::abs(*a[i].second.log10_backoff - *b[i].second.log10_backoff));
      ++entries;
    }
  }
  return {structure && worst <= 1e-9,
          Format("%zu entries, structure %s, max deviation %.3g", entries,
                 structure ? "identical" : "DIFFERS", worst)};
}

// Interpolated Kneser-Ney bigram written out term by term.
Outcome KneserNeyOracle() {
  const TokenId a = ParseJamo("ㄱ")[0].id(), b = ParseJamo("ㅏ")[0].id();
  const std::vector<std::vector<TokenId>> sentences{{a, b, a, b}, {a, b, b, a}};
  const double D = 0.75;
  std::map<std::pair<TokenId, TokenId>, int> c;
  for (const auto& s : sentences) {
    std::vector<TokenId> padded{kBosId};
    padded.insert(padded.end(), s.begin(), s.end());
    padded.push_back(kEosId);
    for (std::size_t i = 0; i + 1 < padded.size(); ++i) ++c[{padded[i], padded[i + 1]}];
  }
  std::map<TokenId, int> left_types;  // N1+(. w)
  int bigram_types = 0;
  for (const auto& [hw, n] : c) {
    ++left_types[hw.second];
    ++bigram_types;
  }
  const double uniform = 1.0 / (kVocabSize - 1);
  auto p_uni = [&](TokenId w) {
    const double cont = left_types.count(w) ? left_types.at(w) : 0;
    return std::max(cont - D, 0.0) / bigram_types +
           D * static_cast<double>(left_types.size()) / bigram_types * uniform;
  };
  auto p_bi = [&](TokenId h, TokenId w) {
    int total = 0, types = 0;
    for (const auto& [hw, n] : c)
      if (hw.first == h) total += n, ++types;
    if (total == 0) return p_uni(w);
    const double chw = c.count({h, w}) ? c.at({h, w}) : 0;
    return std::max(chw - D, 0.0) / total + D * types / total * p_uni(w);
  };

  std::vector<JamoSequence> corpus{ParseJamo("ㄱㅏㄱㅏ"), ParseJamo("ㄱㅏㅏㄱ")};
  const NGramModel m = TrainModel(corpus, 2);
  double worst = 0.0;
  int checked = 0;
  const TokenId unseen = ParseJamo("ㄴ")[0].id();
  for (TokenId h : {kBosId, a, b, unseen}) {
    for (TokenId w = 0; w < kVocabSize; ++w) {
      if (w == kBosId) continue;
      const std::vector<TokenId> ctx{h};
      worst = std::max(worst, std::abs(std::pow(10.0, m.ConditionalLog10(ctx, w)) - p_bi(h, w)));
      ++checked;
    }
  }
  // Spot value: P(ㅏ | ㄱ) = (3 - D)/4 + D*2/4 * p_uni(ㅏ), p_uni(ㅏ) = (2 - D)/6 + D*3/6/44.
  const double hand = (3 - D) / 4 + D * 2 / 4 * ((2 - D) / 6 + D * 3 / 6 / 44);
  worst = std::max(worst, std::abs(hand - p_bi(a, b)));
  return {worst <= 1e-9, Format("%d conditionals, max |diff| = %.3g", checked, worst)};
}

// Sum over all V^T frame paths, grouped by collapsed labeling.
std::map<std::vector<TokenId>, double> ExactLabelings(const EmissionMatrix& e, TokenId blank) {
  std::map<std::vector<TokenId>, double> out;
  const int T = e.frames(), V = e.vocab_size();
  std::vector<int> path(T, 0);
  while (true) {
    double logp = 0.0;
    std::vector<TokenId> labels;
    TokenId prev = -1;
    for (int t = 0; t < T; ++t) {
      logp += e.at(t, path[t]);
      if (path[t] != blank && path[t] != prev) labels.push_back(static_cast<TokenId>(path[t]));
      prev = static_cast<TokenId>(path[t]);
    }
    out[labels] += std::exp(logp);
    int t = T - 1;
    while (t >= 0 && ++path[t] == V) path[t--] = 0;
    if (t < 0) break;
  }
  return out;
}

Outcome CtcExactness() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal(0.0, 1.5);
  int agree = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int T = 1 + static_cast<int>(rng() % 5);
    const int V = 2 + static_cast<int>(rng() % 4);
    const TokenId blank = static_cast<TokenId>(rng() % V);
    std::vector<float> values;
    for (int t = 0; t < T; ++t) {
      std::vector<double> logits(V);
      double z = 0.0;
      for (double& x : logits) z += std::exp(x = normal(rng));
      for (double x : logits) values.push_back(static_cast<float>(x - std::log(z)));
    }
    const EmissionMatrix e(T, V, values);
    const auto exact = ExactLabelings(e, blank);
    double best = -1.0;
    for (const auto& [labels, p] : exact) best = std::max(best, p);

    DecodeConfig config;
    config.beam_width = 1 << 20;
    config.lm_weight = 0.0;
    config.length_bonus = 0.0;
    config.prune_logp = -std::numeric_limits<double>::infinity();
    const auto hyps = PrefixBeamSearch(e, blank, config);
    const auto& top = hyps.at(0);
    const auto it = exact.find(top.labels);
    agree += it != exact.end() && std::abs(it->second - best) <= 1e-9 * best &&
             std::abs(std::exp(top.am_logp) - best) <= 1e-6 * best;
  }
  return {agree == 100, Format("%d/100 beam tops equal the enumerated optimum", agree)};
}

Outcome AlignmentOracle() {
  const JamoSequence alphabet = ParseJamo("ㄱㄴㅏㅗ");
  std::vector<JamoSequence> by_length[9];
  by_length[0].push_back({});
  for (int len = 1; len <= 8; ++len)
    for (const auto& s : by_length[len - 1])
      for (const Jamo& j : alphabet) {
        auto x = s;
        x.push_back(j);
        by_length[len].push_back(std::move(x));
      }

  long long pairs = 0, bad = 0;
  for (int lr = 0; lr <= 8; ++lr)
    for (int lh = 0; lr + lh <= 8; ++lh)
      for (const auto& ref : by_length[lr])
        for (const auto& hyp : by_length[lh]) {
          // Memoized recursion on suffixes.
          std::vector<std::vector<int>> memo(lr + 1, std::vector<int>(lh + 1, -1));
          std::function<int(int, int)> dist = [&](int i, int j) -> int {
            if (i == lr) return lh - j;
            if (j == lh) return lr - i;
            int& m = memo[i][j];
            if (m >= 0) return m;
            return m = std::min({dist(i + 1, j + 1) + (ref[i] != hyp[j]), dist(i + 1, j) + 1,
                                 dist(i, j + 1) + 1});
          };
          const Alignment a = Align(ref, hyp);
          JamoSequence r2, h2;
          int c = 0, s = 0, d = 0, ins = 0;
          for (const auto& op : a.ops) {
            if (op.ref) r2.push_back(*op.ref);
            if (op.hyp) h2.push_back(*op.hyp);
            switch (op.kind) {
              case OpKind::kCorrect: ++c; if (*op.ref != *op.hyp) ++bad; break;
              case OpKind::kSubstitution: ++s; if (*op.ref == *op.hyp) ++bad; break;
              case OpKind::kDeletion: ++d; break;
              case OpKind::kInsertion: ++ins; break;
            }
          }
          const bool ok = a.errors() == dist(0, 0) && r2 == ref && h2 == hyp &&
                          c == a.correct && s == a.substitutions && d == a.deletions &&
                          ins == a.insertions && a.ref_length() == lr && a.hyp_length() == lh;
          bad += !ok;
          ++pairs;
        }
  return {bad == 0 && pairs > 0,
          Format("%lld pairs with |ref|+|hyp| <= 8 over 4 tokens, %lld mismatches", pairs, bad)};
}

Outcome PerSpotValue() {
  const Alignment a = Align(DecomposeText("호랑이"), DecomposeText("호라이"));
  const double per = PhonemeErrorRate(std::vector<Alignment>{a});
  return {std::abs(per - 1.0 / 7.0) <= 1e-12, Format("PER = %.15f", per)};
}

nlohmann::json ReadReport(const fs::path& dir) {
  return nlohmann::json::parse(Slurp(dir / "report.json"));
}

Outcome ZeroNoiseEndToEnd() {
  const fs::path dir = Scratch("zero_noise");
  Cli({"--seed", "1", "simulate", "--out", (dir / "corpus").string(), "--per-word", "5",
       "--temperature", "0"});
  Cli({"evaluate", "--manifest", (dir / "corpus/manifest.jsonl").string(), "--out",
       (dir / "report").string(), "--no-lm"});
  const auto s = ReadReport(dir / "report").at("summary");
  const std::size_t n = ReadReport(dir / "report").at("utterances").size();
  const double per = s.at("per"), c_per = s.at("c_per"), f1 = s.at("consonant_f1");
  return {n == 365 && per == 0.0 && c_per == 0.0 && f1 == 1.0,
          Format("%zu utterances, PER %g, C-PER %g, F1 %g", n, per, c_per, f1)};
}

// The full pipeline with relative paths inside `root`, so two runs see
// identical arguments.
void RunPipeline(const fs::path& root) {
  fs::create_directories(root);
  const fs::path cwd = fs::current_path();
  fs::current_path(root);
  try {
    std::ofstream words("words.txt");
    for (int i = 0; i < 40; ++i) words << ClinicalWordList()[i] << '\n';
    words.close();
    Cli({"lexicon", "build", "--words", "words.txt", "--out", "lex.tsv"});
    Cli({"lm", "train", "--order", "5", "--lexicon", "lex.tsv", "--out", "model.arpa"});
    Cli({"--seed", "2024", "simulate", "--words", "words.txt", "--per-word", "5",
         "--temperature", "0.5", "--out", "corpus"});
    Cli({"evaluate", "--manifest", "corpus/manifest.jsonl", "--out", "report_no_lm", "--no-lm",
         "--format", "json,csv,svg"});
    Cli({"evaluate", "--manifest", "corpus/manifest.jsonl", "--out", "report_lm", "--lm",
         "model.arpa", "--alpha", "0.5", "--format", "json,csv,svg"});
  } catch (...) {
    fs::current_path(cwd);
    throw;
  }
  fs::current_path(cwd);
}

std::map<std::string, std::string> Tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = Slurp(e.path());
  return files;
}

const fs::path& PipelineRoot() {
  static const fs::path root = Scratch("pipeline");
  return root;
}

Outcome LmFusionHarness() {
  RunPipeline(PipelineRoot() / "run1");
  RunPipeline(PipelineRoot() / "run2");
  double delta[2];
  std::size_t n = 0;
  double per_lm = 0, per_no = 0;
  bool identical = true;
  for (int r = 0; r < 2; ++r) {
    const fs::path dir = PipelineRoot() / ("run" + std::to_string(r + 1));
    const auto lm = ReadReport(dir / "report_lm"), no = ReadReport(dir / "report_no_lm");
    per_lm = lm.at("summary").at("per");
    per_no = no.at("summary").at("per");
    delta[r] = per_lm - per_no;
    n = lm.at("utterances").size();
  }
  for (const char* rep : {"report_lm/report.json", "report_no_lm/report.json"})
    identical = identical && Slurp(PipelineRoot() / "run1" / rep) == Slurp(PipelineRoot() / "run2" / rep);
  return {n == 200 && delta[0] == delta[1] && identical,
          Format("%zu utterances, PER alpha=0.5+LM %.6f vs alpha=0 %.6f, delta %+.6f in both runs%s",
                 n, per_lm, per_no, delta[0], identical ? ", reports byte-identical" : ", REPORTS DIFFER")};
}

Outcome PipelineDeterminism() {
  if (!fs::exists(PipelineRoot() / "run2")) {
    RunPipeline(PipelineRoot() / "run1");
    RunPipeline(PipelineRoot() / "run2");
  }
  const auto a = Tree(PipelineRoot() / "run1"), b = Tree(PipelineRoot() / "run2");
  std::size_t bytes = 0;
  for (const auto& [name, content] : a) bytes += content.size();
  return {a == b && !a.empty(), Format("%zu files, %zu bytes, trees %s", a.size(), bytes,
                                       a == b ? "byte-identical" : "DIFFER")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Hangul round trip", 1, HangulRoundTrip},
      {2, "decompose example", 0, DecomposeExample},
      {3, "applied-word variants", 1, AppliedWords},
      {4, "LM normalization", 10, LmNormalization},
      {5, "ARPA round trip", 1, ArpaRoundTrip},
      {6, "Kneser-Ney oracle", 0, KneserNeyOracle},
      {7, "CTC beam exactness", 30, CtcExactness},
      {8, "alignment oracle", 60, AlignmentOracle},
      {9, "PER spot value", 0, PerSpotValue},
      {10, "zero-noise end to end", 30, ZeroNoiseEndToEnd},
      {11, "LM fusion A/B harness", 0, LmFusionHarness},
      {12, "pipeline determinism", 0, PipelineDeterminism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_s == 0 || secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::string timing = Format("%.3f s", secs);
    if (c.budget_s > 0) timing += Format(" / limit %g s%s", c.budget_s, in_time ? "" : " EXCEEDED");
    std::cout << (pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << ": " << o.detail
              << " (" << timing << ")\n";
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
