#include "jamoeval/manifest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "jamoeval/errors.h"

namespace jamoeval {
namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

const std::set<std::string>& KnownKeys() {
  static const std::set<std::string> keys{"id",       "emission_path", "hypothesis_text",
                                          "target_text", "gold_word",  "rules",
                                          "substitutions"};
  return keys;
}

std::string RequireString(const ordered_json& obj, const char* key, std::size_t line,
                          const std::string& id) {
  if (!obj.contains(key)) throw ParseError("record '" + id + "' is missing \"" + key + "\"", line);
  if (!obj[key].is_string())
    throw ParseError("record '" + id + "': \"" + key + "\" must be a string", line);
  return obj[key].get<std::string>();
}

}  // namespace

std::string CorpusManifest::ResolveEmissionPath(const UtteranceRecord& record) const {
  if (!record.emission_path) throw DomainError("record '" + record.id + "' has no emission file");
  fs::path p(*record.emission_path);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (fs::path(base_dir) / p).string();
}

std::string SerializeManifestRecord(const UtteranceRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  if (r.emission_path) j["emission_path"] = *r.emission_path;
  if (r.hypothesis_text) j["hypothesis_text"] = *r.hypothesis_text;
  j["target_text"] = r.target_text;
  if (r.gold_word) j["gold_word"] = *r.gold_word;
  if (!r.rules.empty()) j["rules"] = r.rules;
  if (!r.substitutions.empty()) {
    ordered_json subs = ordered_json::array();
    for (const auto& [from, to] : r.substitutions) subs.push_back({from, to});
    j["substitutions"] = subs;
  }
  return j.dump();
}

std::string SerializeManifest(const CorpusManifest& manifest) {
  std::string out;
  for (const auto& r : manifest.records) out += SerializeManifestRecord(r) + "\n";
  return out;
}

CorpusManifest ParseManifest(std::string_view text, const std::string& base_dir,
                             bool check_files) {
  CorpusManifest manifest;
  manifest.base_dir = base_dir;
  std::set<std::string> seen;
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    ordered_json obj;
    try {
      obj = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!obj.is_object()) throw ParseError("record must be a JSON object", line_no);

    UtteranceRecord r;
    r.line = line_no;
    r.id = RequireString(obj, "id", line_no, "?");
    for (const auto& [key, value] : obj.items())
      if (!KnownKeys().contains(key))
        throw ParseError("record '" + r.id + "': unknown field \"" + key + "\"", line_no);
    if (r.id.empty()) throw ParseError("record id is empty", line_no);
    if (!seen.insert(r.id).second) throw ParseError("duplicate record id '" + r.id + "'", line_no);

    const bool has_em = obj.contains("emission_path");
    const bool has_hyp = obj.contains("hypothesis_text");
    if (has_em == has_hyp)
      throw ParseError("record '" + r.id +
                           "' needs exactly one of \"emission_path\" and \"hypothesis_text\"",
                       line_no);
    if (has_em) r.emission_path = RequireString(obj, "emission_path", line_no, r.id);
    if (has_hyp) r.hypothesis_text = RequireString(obj, "hypothesis_text", line_no, r.id);
    r.target_text = RequireString(obj, "target_text", line_no, r.id);
    if (obj.contains("gold_word")) r.gold_word = RequireString(obj, "gold_word", line_no, r.id);
    try {
      if (obj.contains("rules")) r.rules = obj["rules"].get<std::vector<std::string>>();
      if (obj.contains("substitutions"))
        for (const auto& pair : obj["substitutions"]) {
          if (!pair.is_array() || pair.size() != 2) throw DomainError("bad pair");
          r.substitutions.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
        }
    } catch (const std::exception&) {
      throw ParseError("record '" + r.id + "': malformed \"rules\" or \"substitutions\"",
                       line_no);
    }

    try {
      r.target = DecomposeText(r.target_text);
      if (r.hypothesis_text) DecomposeText(*r.hypothesis_text);
    } catch (const DomainError& e) {
      throw ParseError("record '" + r.id + "': " + e.what(), line_no);
    }
    if (r.emission_path && check_files) {
      const std::string path = manifest.ResolveEmissionPath(r);
      if (!fs::is_regular_file(path))
        throw ParseError("record '" + r.id + "': emission file not found: " + path, line_no);
    }
    manifest.records.push_back(std::move(r));
  }
  return manifest;
}

CorpusManifest LoadManifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open manifest " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseManifest(buf.str(), fs::path(path).parent_path().string());
}

void WriteManifest(const CorpusManifest& manifest, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path);
  out << SerializeManifest(manifest);
  if (!out) throw DomainError("failed writing " + path);
}

}  // namespace jamoeval
