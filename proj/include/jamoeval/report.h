#ifndef JAMOEVAL_REPORT_H_
#define JAMOEVAL_REPORT_H_

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jamoeval/ctc.h"
#include "jamoeval/lm.h"
#include "jamoeval/manifest.h"
#include "jamoeval/metrics.h"

namespace jamoeval {

enum class DecoderKind { kBeam, kGreedy };

struct RunConfig {
  DecoderKind decoder = DecoderKind::kBeam;
  DecodeConfig decode;
  std::optional<std::string> lm_path;  // recorded in the report only
  std::string output_dir;
  std::vector<std::string> formats{"json", "csv"};  // subset of json, csv, svg
  int jobs = 0;  // decoding threads; 0 = hardware concurrency

  void Validate() const;
};

struct UtteranceResult {
  std::string id;
  bool decoded = false;  // false for hypothesis-only records
  JamoSequence target;
  JamoSequence hypothesis;
  Alignment alignment;
  double am_logp = 0.0;
  double lm_logp = 0.0;
  double combined = 0.0;

  friend bool operator==(const UtteranceResult&, const UtteranceResult&) = default;
};

struct ReportSettings {
  std::string decoder = "beam";
  int beam_width = 0;
  double lm_weight = 0.0;
  double length_bonus = 0.0;
  double prune_logp = 0.0;
  std::optional<std::string> lm;

  friend bool operator==(const ReportSettings&, const ReportSettings&) = default;
};

struct EvaluationReport {
  ReportSettings settings;
  std::vector<UtteranceResult> utterances;  // manifest order
  double per = 0.0;
  double c_per = 0.0;
  double consonant_f1 = 0.0;
  ConfusionMatrix confusion;

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

// Aggregates already-decoded utterances. Throws DomainError when a metric is
// undefined for the corpus.
EvaluationReport Summarize(std::vector<UtteranceResult> utterances, ReportSettings settings);

// Decodes emission records (greedy or beam with optional LM), takes
// hypothesis records as given, aligns against the targets and aggregates.
// Utterances are decoded in parallel; results keep manifest order. A failing
// utterance aborts the run with a DomainError naming its id (the first one in
// manifest order).
EvaluationReport RunEvaluation(const CorpusManifest& manifest, const RunConfig& config,
                               const NGramModel* lm = nullptr);

nlohmann::ordered_json ReportToJson(const EvaluationReport& report);
// Throws FormatError on missing or mistyped fields.
EvaluationReport ReportFromJson(const nlohmann::ordered_json& json);

// Rows and columns are the 19 consonants; the diagonal holds correct counts,
// off-diagonal cells substitution counts.
std::string ConfusionCsv(const ConfusionMatrix& confusion);
// consonant,correct,deletion,substitution as shares of reference
// occurrences; empty fields for consonants that never occur.
std::string ConsonantRatiosCsv(const ConfusionMatrix& confusion);
std::string ConsonantRatiosSvg(const ConfusionMatrix& confusion);
std::string SubstitutionHeatmapSvg(const ConfusionMatrix& confusion);

// Writes report.json, confusion.csv, consonant_ratios.csv and the SVGs as
// selected by `formats`. Returns the written paths.
std::vector<std::string> EmitReport(const EvaluationReport& report, const std::string& output_dir,
                                    const std::vector<std::string>& formats);

}  // namespace jamoeval

#endif  // JAMOEVAL_REPORT_H_
