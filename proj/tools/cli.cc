#include "cli.h"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "jamoeval/corpus.h"
#include "jamoeval/ctc.h"
#include "jamoeval/errors.h"
#include "jamoeval/lm.h"
#include "jamoeval/manifest.h"
#include "jamoeval/metrics.h"
#include "jamoeval/report.h"
#include "jamoeval/rules.h"
#include "jamoeval/simulator.h"

namespace jamoeval {
namespace {
namespace fs = std::filesystem;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteText(const std::string& path, const std::string& text) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw DomainError("cannot write " + path);
}

// One word per line; blank lines and '#' comments are skipped.
std::vector<std::string> ReadWordList(const std::string& path) {
  std::vector<std::string> words;
  std::istringstream in(ReadFile(path));
  std::string line;
  while (std::getline(in, line)) {
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (!line.empty() && line[0] != '#') words.push_back(line);
  }
  if (words.empty()) throw DomainError("word list " + path + " is empty");
  return words;
}

std::string Join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? sep : "") + parts[i];
  return s;
}

std::string RuleIds(const std::vector<RuleApplication>& apps) {
  std::vector<std::string> ids;
  for (const auto& a : apps) ids.push_back(a.rule_id);
  return Join(ids, ",");
}

struct RuleSource {
  std::string path;
  std::vector<std::string> only;

  void Register(CLI::App* app) {
    app->add_option("--rules", path, "Rule file (JSON); defaults to the built-in set");
    app->add_option("--rule", only, "Restrict to these rule ids");
  }
  std::vector<ErrorRule> Load() const {
    std::vector<ErrorRule> rules = path.empty() ? DefaultRules() : LoadRules(path);
    return only.empty() ? rules : SelectRules(rules, only);
  }
};

struct DecodeOptions {
  double alpha = DecodeConfig{}.lm_weight;
  double beta = DecodeConfig{}.length_bonus;
  int beam = DecodeConfig{}.beam_width;
  double prune = DecodeConfig{}.prune_logp;
  std::string lm_path;
  bool no_lm = false;
  bool greedy = false;
  CLI::Option* beta_opt = nullptr;

  void Register(CLI::App* app) {
    auto* lm = app->add_option("--lm", lm_path, "ARPA language model for shallow fusion");
    app->add_flag("--no-lm", no_lm, "Decode without a language model (alpha = beta = 0)")
        ->excludes(lm);
    app->add_option("--alpha", alpha, "LM weight")->capture_default_str();
    beta_opt = app->add_option("--beta", beta, "Length bonus per emitted token")
                   ->capture_default_str();
    app->add_option("--beam", beam, "Beam width")->capture_default_str()->check(
        CLI::PositiveNumber);
    app->add_option("--prune", prune, "Per-frame log-probability pruning threshold")
        ->capture_default_str();
    app->add_flag("--greedy", greedy, "Best-path decoding instead of beam search");
  }

  // Without an LM both fusion terms are off unless --beta is given.
  DecodeConfig Config() const {
    DecodeConfig c;
    c.beam_width = beam;
    c.prune_logp = prune;
    c.lm_weight = alpha;
    c.length_bonus = beta;
    if (lm_path.empty()) {
      c.lm_weight = 0.0;
      if (beta_opt->count() == 0) c.length_bonus = 0.0;
    }
    return c;
  }
  std::optional<NGramModel> LoadLm() const {
    if (lm_path.empty()) return std::nullopt;
    return LoadArpa(lm_path);
  }
};

std::string Fixed(double v) {
  std::ostringstream s;
  s.precision(6);
  s << std::fixed << v;
  return s.str();
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Jamo-level pronunciation error tooling for Korean speech recognition", "jamoeval"};
  app.set_config("--config", "", "TOML/INI file supplying option values");
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Random seed for simulation")->capture_default_str();

  // decompose
  auto* decompose = app.add_subcommand("decompose", "Split Hangul text into compatibility jamo");
  std::vector<std::string> texts;
  bool joined = false;
  decompose->add_option("text", texts, "Text to decompose")->required();
  decompose->add_flag("--joined", joined, "Print jamo without separating spaces");
  decompose->callback([&] {
    for (const auto& t : texts) {
      const JamoSequence seq = DecomposeText(t);
      out << (joined ? JamoString(seq) : SpacedJamoString(seq)) << '\n';
    }
  });

  // rules apply
  auto* rules = app.add_subcommand("rules", "Pronunciation error rules");
  rules->require_subcommand(1);
  auto* apply = rules->add_subcommand("apply", "List error variants of words");
  RuleSource apply_rules;
  apply_rules.Register(apply);
  std::vector<std::string> apply_words;
  int apply_depth = 2;
  apply->add_option("word", apply_words, "Words")->required();
  apply->add_option("--depth", apply_depth, "Maximum rule applications (1 or 2)")
      ->capture_default_str()
      ->check(CLI::Range(1, 2));
  apply->callback([&] {
    const auto rs = apply_rules.Load();
    for (const auto& w : apply_words)
      for (const auto& v : GenerateVariants(w, rs, apply_depth))
        out << w << '\t' << ComposeOrJamo(v.sequence) << '\t' << SpacedJamoString(v.sequence)
            << '\t' << RuleIds(v.applications) << '\n';
  });

  // lexicon build
  auto* lexicon = app.add_subcommand("lexicon", "Pronunciation error lexicon");
  lexicon->require_subcommand(1);
  auto* build = lexicon->add_subcommand("build", "Generate the error lexicon for a word list");
  RuleSource build_rules;
  build_rules.Register(build);
  std::string words_path, lexicon_out;
  int build_depth = 2;
  build->add_option("--words", words_path, "Word list, one per line; defaults to the clinical list");
  build->add_option("--depth", build_depth, "Maximum rule applications (1 or 2)")
      ->capture_default_str()
      ->check(CLI::Range(1, 2));
  build->add_option("--out", lexicon_out, "Output TSV (stdout if omitted)");
  build->callback([&] {
    const auto words = words_path.empty() ? ClinicalWordList() : ReadWordList(words_path);
    const ErrorLexicon lex = BuildErrorLexicon(words, build_rules.Load(), build_depth);
    if (lexicon_out.empty()) {
      out << lex.Serialize();
    } else {
      WriteText(lexicon_out, lex.Serialize());
      out << "wrote " << lex.entries().size() << " words, " << lex.num_variants()
          << " variants to " << lexicon_out << '\n';
    }
  });

  // lm train / lm score
  auto* lm = app.add_subcommand("lm", "Jamo n-gram language model");
  lm->require_subcommand(1);
  auto* train = lm->add_subcommand("train", "Train a Kneser-Ney model on lexicon pronunciations");
  int order = 5;
  double discount = SmoothingConfig{}.discount;
  std::string train_lexicon, train_out;
  train->add_option("--order", order, "N-gram order")->capture_default_str()->check(
      CLI::Range(1, 10));
  train->add_option("--discount", discount, "Kneser-Ney discount")->capture_default_str();
  train->add_option("--lexicon", train_lexicon, "Lexicon TSV")->required();
  train->add_option("--out", train_out, "Output ARPA file")->required();
  train->callback([&] {
    SmoothingConfig sc;
    sc.discount = discount;
    std::vector<std::string> warnings;
    const NGramModel model = TrainModel(
        ErrorLexicon::Parse(ReadFile(train_lexicon)).Pronunciations(), order, sc, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << '\n';
    SaveArpa(model, train_out);
    out << "wrote order-" << model.order() << " model to " << train_out << '\n';
  });
  auto* score_lm = lm->add_subcommand("score", "Log10 probability of words under a model");
  std::string score_model;
  std::vector<std::string> score_texts;
  score_lm->add_option("--lm", score_model, "ARPA file")->required();
  score_lm->add_option("text", score_texts, "Words (Hangul or jamo)")->required();
  score_lm->callback([&] {
    const NGramModel model = LoadArpa(score_model);
    for (const auto& t : score_texts)
      out << t << '\t' << Fixed(ScoreSequence(model, DecomposeText(t))) << '\n';
  });

  // decode
  auto* decode = app.add_subcommand("decode", "Decode an emission matrix");
  std::string emissions_path;
  int nbest = 1;
  DecodeOptions decode_opts;
  decode->add_option("emissions", emissions_path, "JEM1 emission file")->required();
  decode->add_option("--nbest", nbest, "Hypotheses to print")->capture_default_str()->check(
      CLI::PositiveNumber);
  decode_opts.Register(decode);
  decode->callback([&] {
    const EmissionMatrix e = ReadEmissions(emissions_path);
    std::vector<Hypothesis> hyps;
    if (decode_opts.greedy) {
      hyps.push_back(GreedyDecode(e));
    } else {
      const auto model = decode_opts.LoadLm();
      hyps = PrefixBeamDecode(e, decode_opts.Config(), model ? &*model : nullptr);
    }
    hyps.resize(std::min<std::size_t>(hyps.size(), nbest));
    for (const auto& h : hyps)
      out << ComposeOrJamo(h.sequence) << '\t' << SpacedJamoString(h.sequence) << '\t'
          << Fixed(h.combined) << '\t' << Fixed(h.am_logp) << '\t' << Fixed(h.lm_logp) << '\n';
  });

  // score
  auto* score = app.add_subcommand("score", "Align hypotheses against references");
  std::vector<std::string> refs, hyps;
  bool show_ops = false;
  score->add_option("--ref", refs, "Reference (as pronounced); repeatable")->required();
  score->add_option("--hyp", hyps, "Hypothesis; repeatable, paired with --ref")->required();
  score->add_flag("--ops", show_ops, "Print the alignment of each pair");
  score->callback([&] {
    if (refs.size() != hyps.size())
      throw DomainError("got " + std::to_string(refs.size()) + " --ref but " +
                        std::to_string(hyps.size()) + " --hyp");
    std::vector<Alignment> alignments;
    std::vector<SequencePair> pairs;
    for (std::size_t i = 0; i < refs.size(); ++i) {
      pairs.emplace_back(DecomposeText(refs[i]), DecomposeText(hyps[i]));
      alignments.push_back(Align(pairs.back().first, pairs.back().second));
      if (show_ops) {
        for (const auto& op : alignments.back().ops)
          out << ToString(op.kind) << '\t' << (op.ref ? op.ref->utf8() : "-") << '\t'
              << (op.hyp ? op.hyp->utf8() : "-") << '\n';
      }
    }
    int c = 0, s = 0, d = 0, ins = 0;
    for (const auto& a : alignments) {
      c += a.correct;
      s += a.substitutions;
      d += a.deletions;
      ins += a.insertions;
    }
    out << "correct " << c << " substitutions " << s << " deletions " << d << " insertions "
        << ins << '\n';
    out << "PER\t" << Fixed(PhonemeErrorRate(alignments)) << '\n';
    try {
      out << "C-PER\t" << Fixed(ConsonantErrorRate(pairs)) << '\n';
    } catch (const DomainError&) {
      out << "n/a\n";
    }
    try {
      out << "consonant-F1\t" << Fixed(ConsonantF1(alignments)) << '\n';
    } catch (const DomainError&) {
      out << "n/a\n";
    }
  });

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic mispronunciation corpus");
  RuleSource sim_rules;
  sim_rules.Register(simulate);
  CorpusConfig corpus;
  std::string sim_words, sim_out;
  bool uniform = false;
  simulate->add_option("--out", sim_out, "Output directory")->required();
  simulate->add_option("--words", sim_words, "Word list; defaults to the clinical list");
  simulate->add_option("--per-word", corpus.utterances_per_word, "Utterances per word")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--error-prob", corpus.error_prob, "Probability of a rule variant")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--depth", corpus.max_depth, "Maximum rule applications")
      ->capture_default_str()
      ->check(CLI::Range(1, 2));
  simulate->add_option("--temperature", corpus.noise.confusion_temperature,
                       "Acoustic confusion temperature (0 = clean)")
      ->capture_default_str();
  simulate->add_option("--blank-prob", corpus.noise.blank_insertion_prob,
                       "Probability of a blank frame between tokens")
      ->capture_default_str();
  simulate->add_option("--min-frames", corpus.noise.min_frames_per_token)->capture_default_str();
  simulate->add_option("--max-frames", corpus.noise.max_frames_per_token)->capture_default_str();
  simulate->add_flag("--uniform-confusions", uniform,
                     "Confuse all jamo pairs equally instead of by phonetic features");
  simulate->callback([&] {
    corpus.noise.seed = seed;
    corpus.noise.feature_biased = !uniform;
    const auto words = sim_words.empty() ? ClinicalWordList() : ReadWordList(sim_words);
    const CorpusManifest m = GenerateCorpus(words, sim_rules.Load(), corpus, sim_out);
    out << "wrote " << m.records.size() << " utterances to "
        << (fs::path(sim_out) / "manifest.jsonl").string() << '\n';
  });

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Decode and score a corpus manifest");
  std::string manifest_path, eval_out;
  std::vector<std::string> formats{"json", "csv"};
  int jobs = 0;
  DecodeOptions eval_opts;
  evaluate->add_option("--manifest", manifest_path, "Line-delimited JSON manifest")->required();
  evaluate->add_option("--out", eval_out, "Report directory")->required();
  evaluate->add_option("--format", formats, "Report formats: json, csv, svg")
      ->delimiter(',')
      ->check(CLI::IsMember({"json", "csv", "svg"}))
      ->capture_default_str();
  evaluate->add_option("--jobs", jobs, "Decoding threads (0 = all cores)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  eval_opts.Register(evaluate);
  evaluate->callback([&] {
    const CorpusManifest m = LoadManifest(manifest_path);
    RunConfig rc;
    rc.decoder = eval_opts.greedy ? DecoderKind::kGreedy : DecoderKind::kBeam;
    rc.decode = eval_opts.Config();
    if (!eval_opts.lm_path.empty()) rc.lm_path = eval_opts.lm_path;
    rc.output_dir = eval_out;
    rc.formats = formats;
    rc.jobs = jobs;
    const auto model = eval_opts.LoadLm();
    const EvaluationReport report = RunEvaluation(m, rc, model ? &*model : nullptr);
    EmitReport(report, eval_out, formats);
    out << "utterances\t" << report.utterances.size() << '\n'
        << "PER\t" << Fixed(report.per) << '\n'
        << "C-PER\t" << Fixed(report.c_per) << '\n'
        << "consonant-F1\t" << Fixed(report.consonant_f1) << '\n';
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace jamoeval
