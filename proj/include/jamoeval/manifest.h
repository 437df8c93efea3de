#ifndef JAMOEVAL_MANIFEST_H_
#define JAMOEVAL_MANIFEST_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jamoeval/hangul.h"

namespace jamoeval {

// One utterance. Exactly one of emission_path / hypothesis_text is set.
struct UtteranceRecord {
  std::string id;
  std::optional<std::string> emission_path;  // as written, relative to the manifest
  std::optional<std::string> hypothesis_text;
  std::string target_text;  // as pronounced
  std::optional<std::string> gold_word;
  // Simulator ground truth; empty for real corpora.
  std::vector<std::string> rules;
  std::vector<std::pair<std::string, std::string>> substitutions;  // (intended, realized)

  std::size_t line = 0;  // 1-based source line, 0 if constructed in memory
  JamoSequence target;   // decomposed target_text, filled by the loader

  friend bool operator==(const UtteranceRecord& a, const UtteranceRecord& b) {
    return a.id == b.id && a.emission_path == b.emission_path &&
           a.hypothesis_text == b.hypothesis_text && a.target_text == b.target_text &&
           a.gold_word == b.gold_word && a.rules == b.rules &&
           a.substitutions == b.substitutions;
  }
};

struct CorpusManifest {
  std::vector<UtteranceRecord> records;
  std::string base_dir;  // directory emission paths are relative to

  std::string ResolveEmissionPath(const UtteranceRecord& record) const;
};

// One JSON object per line, keys in a fixed order.
std::string SerializeManifestRecord(const UtteranceRecord& record);
std::string SerializeManifest(const CorpusManifest& manifest);

// Throws ParseError (with line number and record id where known) on
// malformed JSON, missing fields, duplicate ids, records with both or
// neither of emission_path/hypothesis_text, and undecomposable targets.
// With check_files, emission files must exist under base_dir.
CorpusManifest ParseManifest(std::string_view text, const std::string& base_dir,
                             bool check_files = true);
CorpusManifest LoadManifest(const std::string& path);
void WriteManifest(const CorpusManifest& manifest, const std::string& path);

}  // namespace jamoeval

#endif  // JAMOEVAL_MANIFEST_H_
