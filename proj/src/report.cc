#include "jamoeval/report.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "jamoeval/errors.h"

namespace jamoeval {
namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string Number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

const std::string& ConsonantName(int c) { return Vocabulary::Default().token(c); }

ordered_json OptionalJamo(const std::optional<Jamo>& j) {
  return j ? ordered_json(j->utf8()) : ordered_json(nullptr);
}

std::optional<Jamo> JamoFromJson(const ordered_json& j) {
  if (j.is_null()) return std::nullopt;
  const JamoSequence seq = ParseJamo(j.get<std::string>());
  if (seq.size() != 1) throw FormatError("expected a single jamo, got " + j.dump());
  return seq[0];
}

OpKind ParseOpKind(const std::string& s) {
  for (OpKind k : {OpKind::kCorrect, OpKind::kSubstitution, OpKind::kDeletion, OpKind::kInsertion})
    if (ToString(k) == s) return k;
  throw FormatError("unknown alignment op '" + s + "'");
}

void WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path.string());
  out << content;
  if (!out) throw DomainError("failed writing " + path.string());
}

// White to dark red.
std::string HeatColor(double x) {
  const int g = static_cast<int>(std::lround(255 * (1.0 - x)));
  const int r = static_cast<int>(std::lround(255 - 80 * x));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, g);
  return buf;
}

}  // namespace

void RunConfig::Validate() const {
  for (const auto& f : formats)
    if (f != "json" && f != "csv" && f != "svg")
      throw DomainError("unknown report format '" + f + "' (expected json, csv or svg)");
  if (decode.beam_width < 1) throw DomainError("beam width must be at least 1");
  if (decode.lm_weight < 0) throw DomainError("LM weight must be non-negative");
  if (jobs < 0) throw DomainError("jobs must be non-negative");
}

EvaluationReport Summarize(std::vector<UtteranceResult> utterances, ReportSettings settings) {
  EvaluationReport report;
  report.settings = std::move(settings);
  std::vector<Alignment> alignments;
  std::vector<SequencePair> pairs;
  for (const auto& u : utterances) {
    alignments.push_back(u.alignment);
    pairs.emplace_back(u.target, u.hypothesis);
  }
  report.per = PhonemeErrorRate(alignments);
  report.c_per = ConsonantErrorRate(pairs);
  report.consonant_f1 = ConsonantF1(alignments);
  report.confusion = Confusion(alignments);
  report.utterances = std::move(utterances);
  return report;
}

EvaluationReport RunEvaluation(const CorpusManifest& manifest, const RunConfig& config,
                               const NGramModel* lm) {
  config.Validate();
  if (manifest.records.empty()) throw DomainError("manifest has no records");
  ReportSettings settings;
  settings.decoder = config.decoder == DecoderKind::kBeam ? "beam" : "greedy";
  if (config.decoder == DecoderKind::kBeam) {
    settings.beam_width = config.decode.beam_width;
    settings.lm_weight = lm ? config.decode.lm_weight : 0.0;
    settings.length_bonus = config.decode.length_bonus;
    settings.prune_logp = config.decode.prune_logp;
    if (lm) settings.lm = config.lm_path;
  }

  auto evaluate = [&](const UtteranceRecord& record) {
    UtteranceResult r;
    r.id = record.id;
    r.target = record.target.empty() ? DecomposeText(record.target_text) : record.target;
    if (record.hypothesis_text) {
      r.hypothesis = DecomposeText(*record.hypothesis_text);
    } else {
      r.decoded = true;
      const EmissionMatrix e = ReadEmissions(manifest.ResolveEmissionPath(record));
      if (config.decoder == DecoderKind::kGreedy) {
        const Hypothesis h = GreedyDecode(e);
        r.hypothesis = h.sequence;
        r.am_logp = h.am_logp;
        r.combined = h.combined;
      } else {
        DecodeConfig dc = config.decode;
        if (!lm) dc.lm_weight = 0.0;
        const auto hyps = PrefixBeamDecode(e, dc, lm);
        r.hypothesis = hyps.at(0).sequence;
        r.am_logp = hyps[0].am_logp;
        r.lm_logp = hyps[0].lm_logp;
        r.combined = hyps[0].combined;
      }
    }
    r.alignment = Align(r.target, r.hypothesis);
    return r;
  };

  const std::size_t n = manifest.records.size();
  std::vector<UtteranceResult> results(n);
  std::vector<std::string> failures(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = evaluate(manifest.records[i]);
      } catch (const std::exception& e) {
        failures[i] = e.what();
        if (failures[i].empty()) failures[i] = "unknown error";
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t jobs =
      std::min<std::size_t>(n, config.jobs > 0 ? static_cast<std::size_t>(config.jobs) : hw);
  {
    std::vector<std::jthread> pool;
    for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
  }
  // Report the first failing record in manifest order, whatever thread hit it.
  for (std::size_t i = 0; i < n; ++i)
    if (!failures[i].empty())
      throw DomainError("utterance '" + manifest.records[i].id + "': " + failures[i]);
  return Summarize(std::move(results), std::move(settings));
}

ordered_json ReportToJson(const EvaluationReport& report) {
  ordered_json j;
  std::int64_t c = 0, s = 0, d = 0, i = 0;
  for (const auto& u : report.utterances) {
    c += u.alignment.correct;
    s += u.alignment.substitutions;
    d += u.alignment.deletions;
    i += u.alignment.insertions;
  }
  j["summary"] = {{"utterances", report.utterances.size()},
                  {"reference_length", c + s + d},
                  {"correct", c},
                  {"substitutions", s},
                  {"deletions", d},
                  {"insertions", i},
                  {"per", report.per},
                  {"c_per", report.c_per},
                  {"consonant_f1", report.consonant_f1}};
  const ReportSettings& st = report.settings;
  j["settings"] = {{"decoder", st.decoder},
                   {"beam_width", st.beam_width},
                   {"lm_weight", st.lm_weight},
                   {"length_bonus", st.length_bonus},
                   {"prune_logp", st.prune_logp},
                   {"lm", st.lm ? ordered_json(*st.lm) : ordered_json(nullptr)}};

  ordered_json utts = ordered_json::array();
  for (const auto& u : report.utterances) {
    ordered_json ops = ordered_json::array();
    for (const auto& op : u.alignment.ops)
      ops.push_back({std::string(ToString(op.kind)), OptionalJamo(op.ref), OptionalJamo(op.hyp)});
    utts.push_back({{"id", u.id},
                    {"decoded", u.decoded},
                    {"target", JamoString(u.target)},
                    {"hypothesis", JamoString(u.hypothesis)},
                    {"hypothesis_text", ComposeOrJamo(u.hypothesis)},
                    {"am_logp", u.am_logp},
                    {"lm_logp", u.lm_logp},
                    {"combined", u.combined},
                    {"ops", ops}});
  }
  j["utterances"] = utts;

  const ConfusionMatrix& m = report.confusion;
  ordered_json names = ordered_json::array(), grid = ordered_json::array(),
               correct = ordered_json::array(), deletions = ordered_json::array(),
               substituted = ordered_json::array(), ratios = ordered_json::array();
  for (int r = 0; r < kNumConsonants; ++r) {
    names.push_back(ConsonantName(r));
    ordered_json row = ordered_json::array();
    for (int h = 0; h < kNumConsonants; ++h) row.push_back(m.substitutions(r, h));
    grid.push_back(row);
    correct.push_back(m.correct(r));
    deletions.push_back(m.deletions(r));
    substituted.push_back(m.substituted(r));
    ordered_json entry = {{"consonant", ConsonantName(r)}, {"references", m.references(r)}};
    if (auto q = m.ConsonantRatios(r)) {
      entry["correct"] = q->correct;
      entry["deletion"] = q->deletion;
      entry["substitution"] = q->substitution;
    }
    ratios.push_back(entry);
  }
  j["confusion"] = {{"consonants", names},
                    {"substitutions", grid},
                    {"correct", correct},
                    {"deletions", deletions},
                    {"substituted", substituted}};
  j["consonant_ratios"] = ratios;
  return j;
}

EvaluationReport ReportFromJson(const ordered_json& j) {
  try {
    ReportSettings st;
    const auto& js = j.at("settings");
    st.decoder = js.at("decoder").get<std::string>();
    st.beam_width = js.at("beam_width").get<int>();
    st.lm_weight = js.at("lm_weight").get<double>();
    st.length_bonus = js.at("length_bonus").get<double>();
    st.prune_logp = js.at("prune_logp").get<double>();
    if (!js.at("lm").is_null()) st.lm = js.at("lm").get<std::string>();

    std::vector<UtteranceResult> utts;
    for (const auto& ju : j.at("utterances")) {
      UtteranceResult u;
      u.id = ju.at("id").get<std::string>();
      u.decoded = ju.at("decoded").get<bool>();
      u.target = ParseJamo(ju.at("target").get<std::string>());
      u.hypothesis = ParseJamo(ju.at("hypothesis").get<std::string>());
      u.am_logp = ju.at("am_logp").get<double>();
      u.lm_logp = ju.at("lm_logp").get<double>();
      u.combined = ju.at("combined").get<double>();
      for (const auto& jo : ju.at("ops")) {
        AlignmentOp op{ParseOpKind(jo.at(0).get<std::string>()), JamoFromJson(jo.at(1)),
                       JamoFromJson(jo.at(2))};
        switch (op.kind) {
          case OpKind::kCorrect: ++u.alignment.correct; break;
          case OpKind::kSubstitution: ++u.alignment.substitutions; break;
          case OpKind::kDeletion: ++u.alignment.deletions; break;
          case OpKind::kInsertion: ++u.alignment.insertions; break;
        }
        u.alignment.ops.push_back(op);
      }
      utts.push_back(std::move(u));
    }
    EvaluationReport report = Summarize(std::move(utts), std::move(st));
    const auto& sum = j.at("summary");
    report.per = sum.at("per").get<double>();
    report.c_per = sum.at("c_per").get<double>();
    report.consonant_f1 = sum.at("consonant_f1").get<double>();
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
}

std::string ConfusionCsv(const ConfusionMatrix& m) {
  std::string out = "ref\\hyp";
  for (int h = 0; h < kNumConsonants; ++h) out += "," + ConsonantName(h);
  out += "\n";
  for (int r = 0; r < kNumConsonants; ++r) {
    out += ConsonantName(r);
    for (int h = 0; h < kNumConsonants; ++h)
      out += "," + std::to_string(r == h ? m.correct(r) : m.substitutions(r, h));
    out += "\n";
  }
  return out;
}

std::string ConsonantRatiosCsv(const ConfusionMatrix& m) {
  std::string out = "consonant,correct,deletion,substitution\n";
  for (int c = 0; c < kNumConsonants; ++c) {
    out += ConsonantName(c);
    if (auto q = m.ConsonantRatios(c))
      out += "," + Number(q->correct) + "," + Number(q->deletion) + "," + Number(q->substitution);
    else
      out += ",,,";
    out += "\n";
  }
  return out;
}

std::string ConsonantRatiosSvg(const ConfusionMatrix& m) {
  constexpr int kBar = 28, kGap = 8, kHeight = 200, kLeft = 40, kTop = 20;
  const int width = kLeft + kNumConsonants * (kBar + kGap) + 20;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
                    "\" height=\"" + std::to_string(kHeight + 80) +
                    "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<line x1=\"" + std::to_string(kLeft) + "\" y1=\"" + std::to_string(kTop + kHeight) +
         "\" x2=\"" + std::to_string(width - 10) + "\" y2=\"" + std::to_string(kTop + kHeight) +
         "\" stroke=\"black\"/>\n";
  const char* colors[3] = {"#4c9f70", "#d9a441", "#c8553d"};
  for (int c = 0; c < kNumConsonants; ++c) {
    const int x = kLeft + c * (kBar + kGap);
    double y = kTop + kHeight;
    if (auto q = m.ConsonantRatios(c)) {
      const double parts[3] = {q->correct, q->deletion, q->substitution};
      for (int k = 0; k < 3; ++k) {
        const double h = parts[k] * kHeight;
        y -= h;
        out += "<rect x=\"" + std::to_string(x) + "\" y=\"" + Number(y) + "\" width=\"" +
               std::to_string(kBar) + "\" height=\"" + Number(h) + "\" fill=\"" + colors[k] +
               "\"/>\n";
      }
    }
    out += "<text x=\"" + std::to_string(x + kBar / 2) + "\" y=\"" +
           std::to_string(kTop + kHeight + 16) + "\" text-anchor=\"middle\">" +
           ConsonantName(c) + "</text>\n";
  }
  const char* labels[3] = {"correct", "deletion", "substitution"};
  for (int k = 0; k < 3; ++k) {
    const int x = kLeft + k * 110;
    out += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(kTop + kHeight + 32) +
           "\" width=\"12\" height=\"12\" fill=\"" + colors[k] + "\"/>\n";
    out += "<text x=\"" + std::to_string(x + 16) + "\" y=\"" +
           std::to_string(kTop + kHeight + 43) + "\">" + labels[k] + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string SubstitutionHeatmapSvg(const ConfusionMatrix& m) {
  constexpr int kCell = 24, kLeft = 30, kTop = 30;
  const int size = kLeft + kNumConsonants * kCell + 10;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(size) +
                    "\" height=\"" + std::to_string(size) +
                    "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (int c = 0; c < kNumConsonants; ++c) {
    out += "<text x=\"" + std::to_string(kLeft + c * kCell + kCell / 2) + "\" y=\"" +
           std::to_string(kTop - 8) + "\" text-anchor=\"middle\">" + ConsonantName(c) +
           "</text>\n";
    out += "<text x=\"" + std::to_string(kLeft - 6) + "\" y=\"" +
           std::to_string(kTop + c * kCell + kCell / 2 + 4) + "\" text-anchor=\"end\">" +
           ConsonantName(c) + "</text>\n";
  }
  for (int r = 0; r < kNumConsonants; ++r) {
    const auto row = m.RatioRow(r);
    for (int h = 0; h < kNumConsonants; ++h)
      out += "<rect x=\"" + std::to_string(kLeft + h * kCell) + "\" y=\"" +
             std::to_string(kTop + r * kCell) + "\" width=\"" + std::to_string(kCell) +
             "\" height=\"" + std::to_string(kCell) + "\" fill=\"" + HeatColor(row[h]) +
             "\" stroke=\"#dddddd\"><title>" + ConsonantName(r) + "→" + ConsonantName(h) +
             ": " + Number(row[h]) + "</title></rect>\n";
  }
  out += "</svg>\n";
  return out;
}

std::vector<std::string> EmitReport(const EvaluationReport& report, const std::string& output_dir,
                                    const std::vector<std::string>& formats) {
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) throw DomainError("cannot create " + output_dir + ": " + ec.message());
  auto wants = [&](const char* f) {
    return std::find(formats.begin(), formats.end(), f) != formats.end();
  };
  std::vector<std::string> written;
  auto write = [&](const char* name, const std::string& content) {
    const fs::path p = fs::path(output_dir) / name;
    WriteFile(p, content);
    written.push_back(p.string());
  };
  if (wants("json")) write("report.json", ReportToJson(report).dump(2) + "\n");
  if (wants("csv")) {
    write("confusion.csv", ConfusionCsv(report.confusion));
    write("consonant_ratios.csv", ConsonantRatiosCsv(report.confusion));
  }
  if (wants("svg")) {
    write("consonant_ratios.svg", ConsonantRatiosSvg(report.confusion));
    write("substitution_heatmap.svg", SubstitutionHeatmapSvg(report.confusion));
  }
  return written;
}

}  // namespace jamoeval
