#include "jamoeval/rules.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "jamoeval/errors.h"
#include "nlohmann/json.hpp"

namespace jamoeval {

extern const char kDefaultRulesJson[];  // generated from data/default_rules.json

namespace {

using Json = nlohmann::ordered_json;

constexpr std::array<std::string_view, 3> kMainNames = {
    "word-error-pattern", "segmental-change", "distortion"};

// --- Rule file parsing ---------------------------------------------------

// Byte offsets of the elements of the top-level JSON array, used to attach
// line numbers to semantic errors. Assumes `text` is valid JSON.
std::vector<std::size_t> TopLevelElementOffsets(std::string_view text) {
  std::vector<std::size_t> offsets;
  int depth = 0;
  bool in_string = false;
  bool expect_element = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == ' ' || c == '\n' || c == '\r' || c == '\t') continue;
    if (depth == 1 && expect_element && c != ']') {
      offsets.push_back(i);
      expect_element = false;
    }
    switch (c) {
      case '"':
        in_string = true;
        break;
      case '[':
      case '{':
        if (++depth == 1) expect_element = true;
        break;
      case ']':
      case '}':
        --depth;
        break;
      case ',':
        if (depth == 1) expect_element = true;
        break;
      default:
        break;
    }
  }
  return offsets;
}

std::size_t LineOf(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + offset, '\n'));
}

class RuleReader {
 public:
  RuleReader(const Json& rule, std::size_t line) : rule_(rule), line_(line) {}

  ErrorRule Read() {
    if (!rule_.is_object()) Fail("rule must be a JSON object");
    CheckKeys(rule_, {"id", "main", "middle", "sub", "match", "action",
                      "comment"});
    ErrorRule out;
    out.id = RequiredString(rule_, "id");
    if (out.id.empty()) Fail("rule id must not be empty");
    const std::string main = RequiredString(rule_, "main");
    auto main_it = std::find(kMainNames.begin(), kMainNames.end(), main);
    if (main_it == kMainNames.end()) Fail("unknown main category '" + main + "'");
    out.main = static_cast<MainCategory>(main_it - kMainNames.begin());
    out.middle = RequiredString(rule_, "middle");
    out.sub = RequiredString(rule_, "sub");
    const auto& taxonomy = Taxonomy();
    bool known = std::any_of(taxonomy.begin(), taxonomy.end(),
                             [&](const TaxonomyRow& row) {
                               return row.main == out.main &&
                                      row.middle == out.middle &&
                                      row.sub == out.sub;
                             });
    if (!known) {
      Fail("unknown category '" + main + " / " + out.middle + " / " +
           out.sub + "'");
    }
    if (!rule_.contains("action")) Fail("missing 'action'");
    out.match = ReadMatch(rule_.value("match", Json::object()));
    out.action = ReadAction(rule_["action"]);
    return out;
  }

 private:
  [[noreturn]] void Fail(const std::string& what) const {
    const std::string id =
        rule_.is_object() && rule_.contains("id") && rule_["id"].is_string()
            ? "rule '" + rule_["id"].get<std::string>() + "': "
            : "";
    throw ParseError(id + what, line_);
  }

  void CheckKeys(const Json& obj, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        Fail("unknown field '" + key + "'");
      }
    }
  }

  std::string RequiredString(const Json& obj, const char* key) {
    if (!obj.contains(key) || !obj[key].is_string()) {
      Fail(std::string("missing string field '") + key + "'");
    }
    return obj[key].get<std::string>();
  }

  std::vector<std::string> StringList(const Json& value, const char* what) {
    std::vector<std::string> out;
    if (value.is_string()) {
      out.push_back(value.get<std::string>());
      return out;
    }
    if (!value.is_array()) Fail(std::string(what) + " must be a string array");
    for (const auto& v : value) {
      if (!v.is_string()) Fail(std::string(what) + " must be a string array");
      out.push_back(v.get<std::string>());
    }
    return out;
  }

  JamoSequence ToJamo(const std::string& text) {
    JamoSequence seq;
    try {
      seq = ParseJamo(text);
    } catch (const DomainError&) {
      Fail("'" + text + "' contains tokens outside the 40 jamo");
    }
    if (seq.empty()) Fail("empty token pattern");
    return seq;
  }

  template <typename Enum>
  std::vector<Enum> EnumList(const Json& value, const char* what,
                             std::optional<Enum> (*parse)(std::string_view)) {
    std::vector<Enum> out;
    for (const auto& name : StringList(value, what)) {
      auto parsed = parse(name);
      if (!parsed || *parsed == Enum{}) {
        Fail(std::string("unknown ") + what + " '" + name + "'");
      }
      out.push_back(*parsed);
    }
    return out;
  }

  RuleMatch ReadMatch(const Json& match) {
    if (!match.is_object()) Fail("'match' must be an object");
    CheckKeys(match, {"literal", "features", "position", "role"});
    RuleMatch out;
    if (match.contains("literal")) {
      for (const auto& text : StringList(match["literal"], "literal")) {
        out.literals.push_back(ToJamo(text));
      }
      if (out.literals.empty()) Fail("'literal' must not be empty");
    }
    if (match.contains("features")) {
      const Json& f = match["features"];
      if (!f.is_object()) Fail("'features' must be an object");
      CheckKeys(f, {"kind", "place", "manner", "phonation", "rounded"});
      FeaturePredicate pred;
      if (f.contains("kind")) {
        const std::string kind = f["kind"].is_string() ? f["kind"].get<std::string>() : "";
        if (kind != "consonant" && kind != "vowel") {
          Fail("feature 'kind' must be \"consonant\" or \"vowel\"");
        }
        pred.consonant = kind == "consonant";
      }
      if (f.contains("place")) pred.places = EnumList<Place>(f["place"], "place", ParsePlace);
      if (f.contains("manner")) pred.manners = EnumList<Manner>(f["manner"], "manner", ParseManner);
      if (f.contains("phonation")) {
        pred.phonations = EnumList<Phonation>(f["phonation"], "phonation", ParsePhonation);
      }
      if (f.contains("rounded")) {
        if (!f["rounded"].is_boolean()) Fail("'rounded' must be a boolean");
        pred.rounded = f["rounded"].get<bool>();
      }
      out.features = pred;
    }
    if (match.contains("position")) {
      const std::string pos = match["position"].is_string() ? match["position"].get<std::string>() : "";
      if (pos == "any") out.position = Position::kAny;
      else if (pos == "initial") out.position = Position::kInitial;
      else if (pos == "medial") out.position = Position::kMedial;
      else if (pos == "final") out.position = Position::kFinal;
      else Fail("unknown position '" + pos + "'");
    }
    if (match.contains("role")) {
      const std::string role = match["role"].is_string() ? match["role"].get<std::string>() : "";
      if (role == "onset") out.role = Role::kOnset;
      else if (role == "nucleus") out.role = Role::kNucleus;
      else if (role == "coda") out.role = Role::kCoda;
      else if (role != "any") Fail("unknown role '" + role + "'");
    }
    return out;
  }

  RuleAction ReadAction(const Json& action) {
    if (!action.is_object()) Fail("'action' must be an object");
    CheckKeys(action, {"kind", "tokens", "map", "direction", "unit"});
    RuleAction out;
    const std::string kind = RequiredString(action, "kind");
    if (kind == "delete") out.kind = ActionKind::kDelete;
    else if (kind == "substitute") out.kind = ActionKind::kSubstitute;
    else if (kind == "insert") out.kind = ActionKind::kInsert;
    else if (kind == "reduplicate") out.kind = ActionKind::kReduplicate;
    else if (kind == "transpose") out.kind = ActionKind::kTranspose;
    else if (kind == "simplify-cluster") out.kind = ActionKind::kSimplifyCluster;
    else Fail("unknown action kind '" + kind + "'");

    if (action.contains("tokens")) {
      for (const auto& text : StringList(action["tokens"], "tokens")) {
        out.tokens.push_back(ToJamo(text));
      }
    }
    if (action.contains("map")) {
      const Json& map = action["map"];
      if (!map.is_object()) Fail("'map' must be an object");
      for (const auto& [key, value] : map.items()) {
        std::vector<JamoSequence> alternatives;
        for (const auto& text : StringList(value, "map value")) {
          alternatives.push_back(ToJamo(text));
        }
        if (alternatives.empty()) Fail("empty substitution set for '" + key + "'");
        out.map.emplace_back(ToJamo(key), std::move(alternatives));
      }
    }
    if (action.contains("direction")) {
      const std::string dir = action["direction"].is_string() ? action["direction"].get<std::string>() : "";
      if (dir == "before") out.direction = Direction::kBefore;
      else if (dir == "after") out.direction = Direction::kAfter;
      else if (dir == "first") out.direction = Direction::kFirst;
      else if (dir == "second") out.direction = Direction::kSecond;
      else Fail("unknown direction '" + dir + "'");
    }
    if (action.contains("unit")) {
      const std::string unit = action["unit"].is_string() ? action["unit"].get<std::string>() : "";
      if (unit == "phoneme") out.unit = Unit::kPhoneme;
      else if (unit == "syllable") out.unit = Unit::kSyllable;
      else Fail("unknown unit '" + unit + "'");
    }

    const bool before_after = out.direction == Direction::kBefore ||
                              out.direction == Direction::kAfter;
    switch (out.kind) {
      case ActionKind::kDelete:
        break;
      case ActionKind::kSubstitute:
        if (out.tokens.empty() == out.map.empty()) {
          Fail("substitute needs exactly one of a non-empty 'tokens' or 'map'");
        }
        break;
      case ActionKind::kInsert:
        if (out.tokens.empty()) Fail("insert needs non-empty 'tokens'");
        if (!before_after) Fail("insert needs direction \"before\" or \"after\"");
        break;
      case ActionKind::kReduplicate:
        out.unit = Unit::kSyllable;
        if (!before_after) Fail("reduplicate needs direction \"before\" or \"after\"");
        break;
      case ActionKind::kTranspose:
        if (!before_after) Fail("transpose needs direction \"before\" or \"after\"");
        break;
      case ActionKind::kSimplifyCluster:
        if (out.direction != Direction::kFirst && out.direction != Direction::kSecond) {
          Fail("simplify-cluster needs direction \"first\" or \"second\"");
        }
        break;
    }
    if (out.kind != ActionKind::kSubstitute && !out.map.empty()) {
      Fail("'map' is only valid for substitute");
    }
    return out;
  }

  const Json& rule_;
  std::size_t line_;
};

// --- Matching ------------------------------------------------------------

bool PositionMatches(Position wanted, const SyllableSlot& slot,
                     int num_syllables) {
  if (wanted == Position::kAny) return true;
  const bool first = slot.syllable == 0;
  const bool last = slot.syllable == num_syllables - 1;
  switch (slot.role) {
    case Role::kOnset:
      return (wanted == Position::kInitial && first) ||
             (wanted == Position::kMedial && !first);
    case Role::kCoda:
      return (wanted == Position::kFinal && last) ||
             (wanted == Position::kMedial && !last);
    case Role::kNucleus:
      return (wanted == Position::kInitial && first) ||
             (wanted == Position::kFinal && last) ||
             (wanted == Position::kMedial && !first && !last);
  }
  return false;
}

bool PatternAt(const JamoSequence& word, int site, const JamoSequence& pattern) {
  if (site + pattern.size() > word.size()) return false;
  return std::equal(pattern.begin(), pattern.end(), word.begin() + site);
}

const Jamo kNullOnset = *Jamo::FromCodepoint(U'ㅇ');

bool IsNullOnset(const JamoSequence& word, const SyllableStructure& syl,
                 int k) {
  return word[k] == kNullOnset && syl.slots[k].role == Role::kOnset;
}

struct SiteMatch {
  int span = 1;
  // Substitution alternatives for map-driven rules.
  const std::vector<JamoSequence>* alternatives = nullptr;
};

std::optional<SiteMatch> MatchAt(const ErrorRule& rule, const JamoSequence& word,
                                 const SyllableStructure& syl, int k) {
  const RuleMatch& m = rule.match;
  SiteMatch out;
  bool explicit_literal = false;
  if (!m.literals.empty()) {
    auto it = std::find_if(m.literals.begin(), m.literals.end(),
                           [&](const JamoSequence& p) { return PatternAt(word, k, p); });
    if (it == m.literals.end()) return std::nullopt;
    out.span = static_cast<int>(it->size());
    explicit_literal = true;
  }
  if (IsNullOnset(word, syl, k) && !explicit_literal) return std::nullopt;
  if (m.features && !m.features->Matches(word[k])) return std::nullopt;
  if (m.role && syl.slots[k].role != *m.role) return std::nullopt;
  if (!PositionMatches(m.position, syl.slots[k], syl.num_syllables)) {
    return std::nullopt;
  }
  if (!rule.action.map.empty()) {
    auto it = std::find_if(rule.action.map.begin(), rule.action.map.end(),
                           [&](const auto& entry) { return PatternAt(word, k, entry.first); });
    if (it == rule.action.map.end()) return std::nullopt;
    out.span = static_cast<int>(it->first.size());
    out.alternatives = &it->second;
  }
  return out;
}

JamoSequence Splice(const JamoSequence& word, int begin, int end,
                    const JamoSequence& replacement) {
  JamoSequence out(word.begin(), word.begin() + begin);
  out.insert(out.end(), replacement.begin(), replacement.end());
  out.insert(out.end(), word.begin() + end, word.end());
  return out;
}

// Candidate rewrites of `word` for one matched site, before filtering.
std::vector<JamoSequence> Rewrite(const ErrorRule& rule, const JamoSequence& word,
                                  const SyllableStructure& syl, int k,
                                  const SiteMatch& match) {
  const RuleAction& a = rule.action;
  const int n = static_cast<int>(word.size());
  const int syllable = syl.slots[k].syllable;
  const auto [syl_begin, syl_end] = syl.spans[syllable];
  std::vector<JamoSequence> out;

  switch (a.kind) {
    case ActionKind::kDelete:
      if (a.unit == Unit::kSyllable) {
        out.push_back(Splice(word, syl_begin, syl_end, {}));
      } else if (match.span == 1 && syl.slots[k].role == Role::kOnset) {
        // A deleted onset leaves the null onset behind.
        out.push_back(Splice(word, k, k + 1, {kNullOnset}));
      } else {
        out.push_back(Splice(word, k, k + match.span, {}));
      }
      break;

    case ActionKind::kSubstitute: {
      const auto& alternatives = match.alternatives ? *match.alternatives : a.tokens;
      for (const auto& alt : alternatives) {
        out.push_back(Splice(word, k, k + match.span, alt));
      }
      break;
    }

    case ActionKind::kInsert: {
      int at;
      if (a.unit == Unit::kSyllable) {
        at = a.direction == Direction::kBefore ? syl_begin : syl_end;
      } else {
        at = a.direction == Direction::kBefore ? k : k + match.span;
      }
      for (const auto& alt : a.tokens) out.push_back(Splice(word, at, at, alt));
      break;
    }

    case ActionKind::kReduplicate: {
      const int source = syllable + (a.direction == Direction::kBefore ? -1 : 1);
      if (source < 0 || source >= syl.num_syllables) break;
      const auto [src_begin, src_end] = syl.spans[source];
      JamoSequence copy(word.begin() + src_begin, word.begin() + src_end);
      out.push_back(Splice(word, syl_begin, syl_end, copy));
      break;
    }

    case ActionKind::kTranspose: {
      const int other = syllable + (a.direction == Direction::kBefore ? -1 : 1);
      if (other < 0 || other >= syl.num_syllables) break;
      const auto [other_begin, other_end] = syl.spans[other];
      if (a.unit == Unit::kSyllable) {
        const int lo_b = std::min(syl_begin, other_begin);
        const int hi_b = std::max(syl_begin, other_begin);
        const int lo_e = std::min(syl_end, other_end);
        const int hi_e = std::max(syl_end, other_end);
        JamoSequence swapped(word.begin(), word.begin() + lo_b);
        swapped.insert(swapped.end(), word.begin() + hi_b, word.begin() + hi_e);
        swapped.insert(swapped.end(), word.begin() + lo_b, word.begin() + lo_e);
        swapped.insert(swapped.end(), word.begin() + hi_e, word.end());
        out.push_back(std::move(swapped));
      } else {
        for (int j = other_begin; j < other_end; ++j) {
          if (syl.slots[j].role == syl.slots[k].role) {
            JamoSequence swapped = word;
            std::swap(swapped[k], swapped[j]);
            out.push_back(std::move(swapped));
            break;
          }
        }
      }
      break;
    }

    case ActionKind::kSimplifyCluster: {
      const int next = k + 1;
      if (!word[k].is_consonant() || next >= n || !word[next].is_consonant() ||
          IsNullOnset(word, syl, next)) {
        break;
      }
      if (a.direction == Direction::kFirst) {
        out.push_back(Splice(word, k, k + 1, {}));
      } else if (syl.slots[next].role == Role::kOnset) {
        out.push_back(Splice(word, next, next + 1, {kNullOnset}));
      } else {
        out.push_back(Splice(word, next, next + 1, {}));
      }
      break;
    }
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool IdsLess(const JamoSequence& a, const JamoSequence& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

// --- Public API ----------------------------------------------------------

std::string_view ToString(MainCategory category) {
  return kMainNames[static_cast<int>(category)];
}

const std::vector<TaxonomyRow>& Taxonomy() {
  using M = MainCategory;
  static const std::vector<TaxonomyRow> rows = {
      {M::kWordErrorPattern, "Deletion", "Syllable deletion"},
      {M::kWordErrorPattern, "Deletion", "Word-initial consonant deletion"},
      {M::kWordErrorPattern, "Deletion", "Word-medial consonant deletion"},
      {M::kWordErrorPattern, "Deletion", "Liquid deletion"},
      {M::kWordErrorPattern, "Deletion", "Word-medial coda deletion"},
      {M::kWordErrorPattern, "Deletion", "Word-final coda deletion"},
      {M::kWordErrorPattern, "Insertion", "Syllable insertion"},
      {M::kWordErrorPattern, "Insertion", "Vowel insertion"},
      {M::kWordErrorPattern, "Insertion", "Consonant insertion"},
      {M::kWordErrorPattern, "Reduplication", "Syllable reduplication"},
      {M::kWordErrorPattern, "Reduplication", "Vowel harmony"},
      {M::kWordErrorPattern, "Reduplication", "Consonant harmony"},
      {M::kWordErrorPattern, "Transposition and Migration", "Syllable transposition"},
      {M::kWordErrorPattern, "Transposition and Migration", "Phoneme transposition"},
      {M::kWordErrorPattern, "Consonant cluster simplification",
       "Typical consonant cluster simplification"},
      {M::kWordErrorPattern, "Consonant cluster simplification",
       "Atypical consonant cluster simplification"},
      {M::kSegmentalChange, "Place of articulation", "Fronting"},
      {M::kSegmentalChange, "Place of articulation", "Bilabial"},
      {M::kSegmentalChange, "Place of articulation", "Alveolo-Palatal"},
      {M::kSegmentalChange, "Place of articulation", "Velar"},
      {M::kSegmentalChange, "Place of articulation", "Glottal"},
      {M::kSegmentalChange, "Manner of articulation", "Gliding"},
      {M::kSegmentalChange, "Manner of articulation", "Denasalisation"},
      {M::kSegmentalChange, "Manner of articulation", "Nasal"},
      {M::kSegmentalChange, "Manner of articulation", "Plosive"},
      {M::kSegmentalChange, "Manner of articulation", "Affricative"},
      {M::kSegmentalChange, "Manner of articulation", "Fricative"},
      {M::kSegmentalChange, "Manner of articulation", "Stopping of liquid"},
      {M::kSegmentalChange, "Manner of articulation", "Liquid simplification"},
      {M::kSegmentalChange, "Phonation Types", "Tense"},
      {M::kSegmentalChange, "Phonation Types", "Lax"},
      {M::kSegmentalChange, "Phonation Types", "Aspiration"},
      {M::kSegmentalChange, "Phonation Types", "Unaspiration"},
      {M::kDistortion, "Place of articulation", "Lip rounding"},
      {M::kDistortion, "Place of articulation", "Labiodental"},
      {M::kDistortion, "Place of articulation", "Interdental"},
      {M::kDistortion, "Place of articulation", "Tongue tip"},
      {M::kDistortion, "Place of articulation", "Palatal"},
  };
  return rows;
}

bool FeaturePredicate::Matches(Jamo jamo) const {
  if (consonant && *consonant != jamo.is_consonant()) return false;
  const PhonemeFeatures f = FeaturesOf(jamo);
  auto allows = [](const auto& list, auto value) {
    return list.empty() || std::find(list.begin(), list.end(), value) != list.end();
  };
  if (!allows(places, f.place) || !allows(manners, f.manner) ||
      !allows(phonations, f.phonation)) {
    return false;
  }
  return !rounded || *rounded == f.rounded;
}

std::vector<ErrorRule> ParseRules(std::string_view json_text) {
  if (json_text.find_first_not_of(" \t\r\n") == std::string_view::npos) return {};
  Json doc;
  try {
    doc = Json::parse(json_text.begin(), json_text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("syntax error: ") + e.what(),
                     LineOf(json_text, e.byte > 0 ? e.byte - 1 : 0));
  }
  if (doc.is_null()) return {};
  if (!doc.is_array()) throw ParseError("rule file must be a JSON array", 1);

  const auto offsets = TopLevelElementOffsets(json_text);
  std::vector<ErrorRule> rules;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::size_t line = i < offsets.size() ? LineOf(json_text, offsets[i]) : 0;
    ErrorRule rule = RuleReader(doc[i], line).Read();
    if (!seen.insert(rule.id).second) {
      throw ParseError("duplicate rule id '" + rule.id + "'", line);
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::vector<ErrorRule> LoadRules(const std::string& path) {
  return ParseRules(ReadFile(path));
}

const std::string& DefaultRulesJson() {
  static const std::string text(kDefaultRulesJson);
  return text;
}

const std::vector<ErrorRule>& DefaultRules() {
  static const std::vector<ErrorRule> rules = ParseRules(DefaultRulesJson());
  return rules;
}

std::vector<ErrorRule> SelectRules(const std::vector<ErrorRule>& rules,
                                   const std::vector<std::string>& ids) {
  for (const auto& id : ids) {
    if (std::none_of(rules.begin(), rules.end(),
                     [&](const ErrorRule& r) { return r.id == id; })) {
      throw DomainError("unknown rule id '" + id + "'");
    }
  }
  std::vector<ErrorRule> out;
  for (const auto& rule : rules) {
    if (std::find(ids.begin(), ids.end(), rule.id) != ids.end()) {
      out.push_back(rule);
    }
  }
  return out;
}

std::vector<RuleApplication> ApplyRule(const ErrorRule& rule,
                                       const JamoSequence& word) {
  std::vector<RuleApplication> out;
  if (word.empty()) return out;
  const SyllableStructure syl = AnalyzeSyllables(word);
  std::set<JamoSequence> produced;
  for (int k = 0; k < static_cast<int>(word.size()); ++k) {
    auto match = MatchAt(rule, word, syl, k);
    if (!match) continue;
    for (auto& after : Rewrite(rule, word, syl, k, *match)) {
      if (after.empty() || after == word) continue;
      if (!produced.insert(after).second) continue;
      out.push_back({rule.id, k, word, std::move(after)});
    }
  }
  return out;
}

std::vector<Variant> GenerateVariants(std::string_view word,
                                      const std::vector<ErrorRule>& rules,
                                      int max_depth) {
  if (max_depth < 1 || max_depth > 2) {
    throw DomainError("max_depth must be 1 or 2, got " + std::to_string(max_depth));
  }
  const JamoSequence gold = DecomposeText(word);
  if (gold.empty()) throw DomainError("word '" + std::string(word) + "' is empty");

  std::map<JamoSequence, Variant, decltype(&IdsLess)> found(&IdsLess);
  std::vector<const Variant*> frontier;
  for (const auto& rule : rules) {
    for (auto& app : ApplyRule(rule, gold)) {
      JamoSequence after = app.after;
      auto [it, inserted] = found.try_emplace(after, Variant{after, {std::move(app)}});
      if (inserted) frontier.push_back(&it->second);
    }
  }
  if (max_depth == 2) {
    for (const Variant* first : frontier) {
      for (const auto& rule : rules) {
        for (auto& app : ApplyRule(rule, first->sequence)) {
          if (app.after == gold) continue;
          JamoSequence after = app.after;
          found.try_emplace(after, Variant{after, {first->applications[0], std::move(app)}});
        }
      }
    }
  }
  std::vector<Variant> out;
  out.reserve(found.size());
  for (auto& [seq, variant] : found) out.push_back(std::move(variant));
  return out;
}

std::vector<JamoSequence> ErrorLexicon::Pronunciations() const {
  std::vector<JamoSequence> out;
  for (const auto& [word, entry] : entries_) {
    out.push_back(entry.gold);
    for (const auto& v : entry.variants) out.push_back(v.sequence);
  }
  return out;
}

std::size_t ErrorLexicon::num_variants() const {
  std::size_t n = 0;
  for (const auto& [word, entry] : entries_) n += entry.variants.size();
  return n;
}

std::string ErrorLexicon::Serialize() const {
  std::string out;
  for (const auto& [word, entry] : entries_) {
    out += word + "\t" + JamoString(entry.gold) + "\t\n";
    for (const auto& v : entry.variants) {
      out += word + "\t" + JamoString(v.sequence) + "\t";
      for (std::size_t i = 0; i < v.rule_ids.size(); ++i) {
        if (i > 0) out.push_back(',');
        out += v.rule_ids[i];
      }
      out.push_back('\n');
    }
  }
  return out;
}

ErrorLexicon ErrorLexicon::Parse(std::string_view text) {
  ErrorLexicon lexicon;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (fields.size() < 2 || fields.size() > 3) {
      throw ParseError("expected word<TAB>jamo[<TAB>rule-ids]", line_no);
    }
    const std::string word(fields[0]);
    LexiconEntry* entry;
    JamoSequence seq;
    try {
      auto [it, inserted] = lexicon.entries_.try_emplace(word);
      entry = &it->second;
      if (inserted) entry->gold = DecomposeText(word);
      seq = ParseJamo(fields[1]);
    } catch (const DomainError& e) {
      throw ParseError(e.what(), line_no);
    }
    if (seq.empty()) throw ParseError("empty pronunciation", line_no);
    if (seq == entry->gold) continue;
    LexiconVariant variant{seq, {}};
    if (fields.size() == 3 && !fields[2].empty()) {
      std::string_view ids = fields[2];
      std::size_t s = 0;
      while (true) {
        std::size_t comma = ids.find(',', s);
        variant.rule_ids.emplace_back(ids.substr(s, comma == std::string_view::npos ? comma : comma - s));
        if (comma == std::string_view::npos) break;
        s = comma + 1;
      }
    }
    auto it = std::lower_bound(entry->variants.begin(), entry->variants.end(), seq,
                               [](const LexiconVariant& v, const JamoSequence& s) {
                                 return IdsLess(v.sequence, s);
                               });
    if (it != entry->variants.end() && it->sequence == seq) continue;
    entry->variants.insert(it, std::move(variant));
  }
  return lexicon;
}

ErrorLexicon BuildErrorLexicon(const std::vector<std::string>& words,
                               const std::vector<ErrorRule>& rules,
                               int max_depth) {
  if (words.empty()) throw DomainError("word list is empty");
  ErrorLexicon lexicon;
  for (const auto& word : words) {
    if (lexicon.entries().count(word)) continue;
    LexiconEntry entry;
    entry.gold = DecomposeText(word);
    for (auto& v : GenerateVariants(word, rules, max_depth)) {
      LexiconVariant lv{std::move(v.sequence), {}};
      for (const auto& app : v.applications) lv.rule_ids.push_back(app.rule_id);
      entry.variants.push_back(std::move(lv));
    }
    lexicon.entries().emplace(word, std::move(entry));
  }
  return lexicon;
}

}  // namespace jamoeval
