#ifndef JAMOEVAL_RULES_H_
#define JAMOEVAL_RULES_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jamoeval/hangul.h"

namespace jamoeval {

// Top level of the error taxonomy.
enum class MainCategory { kWordErrorPattern, kSegmentalChange, kDistortion };

std::string_view ToString(MainCategory category);

struct TaxonomyRow {
  MainCategory main;
  std::string_view middle;
  std::string_view sub;
};

// The 38 (main, middle, sub) rows every rule must be filed under.
const std::vector<TaxonomyRow>& Taxonomy();

// Where in the word a matched token sits. Onsets are word-initial in the
// first syllable and word-medial elsewhere; codas are word-final in the last
// syllable and word-medial elsewhere; nuclei are initial/final in the
// first/last syllable and medial otherwise.
enum class Position { kAny, kInitial, kMedial, kFinal };

// Empty vectors / nullopt mean "no constraint".
struct FeaturePredicate {
  std::optional<bool> consonant;
  std::vector<Place> places;
  std::vector<Manner> manners;
  std::vector<Phonation> phonations;
  std::optional<bool> rounded;

  bool Matches(Jamo jamo) const;
};

// A site matches when one of `literals` starts there (multi-jamo patterns
// are allowed), or, without literals, when the single token there satisfies
// `features`. Role and position are checked on the first token of the match.
// An onset ㅇ is a null onset: it only matches a literal that names ㅇ.
struct RuleMatch {
  std::vector<JamoSequence> literals;
  std::optional<FeaturePredicate> features;
  Position position = Position::kAny;
  std::optional<Role> role;
};

enum class ActionKind {
  kDelete,
  kSubstitute,
  kInsert,
  kReduplicate,
  kTranspose,
  kSimplifyCluster,
};

enum class Direction { kNone, kBefore, kAfter, kFirst, kSecond };
enum class Unit { kPhoneme, kSyllable };

struct RuleAction {
  ActionKind kind = ActionKind::kDelete;
  // Replacement or insertion alternatives, tried in file order.
  std::vector<JamoSequence> tokens;
  // Pattern-specific substitution alternatives; the keys double as the
  // rule's literal patterns.
  std::vector<std::pair<JamoSequence, std::vector<JamoSequence>>> map;
  Direction direction = Direction::kNone;
  Unit unit = Unit::kPhoneme;
};

struct ErrorRule {
  std::string id;
  MainCategory main = MainCategory::kWordErrorPattern;
  std::string middle;
  std::string sub;
  RuleMatch match;
  RuleAction action;
};

// One rewrite of `before` into `after` by `rule_id`, anchored at token
// index `site` of `before`.
struct RuleApplication {
  std::string rule_id;
  int site = 0;
  JamoSequence before;
  JamoSequence after;

  friend bool operator==(const RuleApplication&, const RuleApplication&) = default;
};

// Parses the JSON rule file format. Throws ParseError (with the line of the
// offending rule where possible) on syntax errors, duplicate ids, unknown
// category or feature names, and tokens outside the 40 jamo.
std::vector<ErrorRule> ParseRules(std::string_view json_text);
std::vector<ErrorRule> LoadRules(const std::string& path);

// The bundled ruleset covering the taxonomy's reproducible subcategories.
const std::string& DefaultRulesJson();
const std::vector<ErrorRule>& DefaultRules();

// Rules whose id is in `ids`, in ruleset order. Throws DomainError for ids
// that do not exist.
std::vector<ErrorRule> SelectRules(const std::vector<ErrorRule>& rules,
                                   const std::vector<std::string>& ids);

// Every distinct rewrite of `word` by `rule`: sites left to right, then
// alternatives in file order. Rewrites that change nothing or empty the word
// are dropped.
std::vector<RuleApplication> ApplyRule(const ErrorRule& rule,
                                       const JamoSequence& word);

struct Variant {
  JamoSequence sequence;
  std::vector<RuleApplication> applications;  // 1 or 2 entries
};

// All forms reachable from the word's decomposition by 1..max_depth
// sequential rule applications, excluding the gold form. A form reachable
// several ways keeps its shortest derivation (first in rule order on ties).
// Sorted by token ids. Throws DomainError unless 1 <= max_depth <= 2.
std::vector<Variant> GenerateVariants(std::string_view word,
                                      const std::vector<ErrorRule>& rules,
                                      int max_depth);

struct LexiconVariant {
  JamoSequence sequence;
  std::vector<std::string> rule_ids;  // empty for manually added variants
};

struct LexiconEntry {
  JamoSequence gold;
  std::vector<LexiconVariant> variants;  // sorted by token ids, gold excluded
};

// Word -> pronunciation-error variants.
class ErrorLexicon {
 public:
  std::map<std::string, LexiconEntry>& entries() { return entries_; }
  const std::map<std::string, LexiconEntry>& entries() const { return entries_; }

  // Gold forms and all variants, one sequence per pronunciation, in file
  // order. This is the language-model training corpus.
  std::vector<JamoSequence> Pronunciations() const;
  std::size_t num_variants() const;

  // "word<TAB>jamo<TAB>rule-ids" lines; the gold line of each word comes
  // first with an empty rule-id field.
  std::string Serialize() const;
  // Inverse of Serialize. Lines whose sequence equals the word's
  // decomposition are its gold form; other lines without rule ids are
  // manual variants. Blank lines and lines starting with '#' are skipped.
  static ErrorLexicon Parse(std::string_view text);

 private:
  std::map<std::string, LexiconEntry> entries_;
};

ErrorLexicon BuildErrorLexicon(const std::vector<std::string>& words,
                               const std::vector<ErrorRule>& rules,
                               int max_depth);

}  // namespace jamoeval

#endif  // JAMOEVAL_RULES_H_
