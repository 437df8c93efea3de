#ifndef JAMOEVAL_HANGUL_H_
#define JAMOEVAL_HANGUL_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace jamoeval {

// Dense id into the 45-entry model vocabulary. Ids 0..39 are jamo, 40..44
// are the special tokens.
using TokenId = std::int32_t;

inline constexpr int kNumConsonants = 19;
inline constexpr int kNumVowels = 21;
inline constexpr int kNumJamo = kNumConsonants + kNumVowels;

inline constexpr TokenId kDelimiterId = 40;
inline constexpr TokenId kUnknownId = 41;
inline constexpr TokenId kPadId = 42;  // also the CTC blank
inline constexpr TokenId kBosId = 43;
inline constexpr TokenId kEosId = 44;
inline constexpr int kVocabSize = 45;

// One of the 19 consonant or 21 vowel compatibility jamo (U+3131..U+3163).
class Jamo {
 public:
  // Returns nullopt for anything outside the 40-jamo inventory, including
  // the compatibility cluster letters such as U+3133.
  static std::optional<Jamo> FromCodepoint(char32_t cp);
  // Throws DomainError for ids outside 0..39.
  static Jamo FromId(TokenId id);

  char32_t codepoint() const { return codepoint_; }
  TokenId id() const { return id_; }
  bool is_consonant() const { return id_ < kNumConsonants; }
  bool is_vowel() const { return !is_consonant(); }
  std::string utf8() const;

  friend bool operator==(Jamo a, Jamo b) { return a.id_ == b.id_; }
  friend auto operator<=>(Jamo a, Jamo b) { return a.id_ <=> b.id_; }

 private:
  Jamo(char32_t cp, TokenId id) : codepoint_(cp), id_(id) {}
  char32_t codepoint_;
  TokenId id_;
};

using JamoSequence = std::vector<Jamo>;

// Parses a string made only of compatibility jamo (e.g. "ㅎㅗㄹㅏ"); spaces
// between jamo are allowed. Throws DomainError otherwise.
JamoSequence ParseJamo(std::string_view utf8);
// Concatenated jamo characters, no separators.
std::string JamoString(const JamoSequence& seq);
// Jamo separated by single spaces ("ㅉ ㅏ ㅇ ㅜ ㅁ").
std::string SpacedJamoString(const JamoSequence& seq);
std::vector<TokenId> ToIds(const JamoSequence& seq);

// --- UTF-8 -------------------------------------------------------------

// Throws DomainError on malformed input.
std::u32string DecodeUtf8(std::string_view utf8);
std::string EncodeUtf8(std::u32string_view text);
std::string EncodeUtf8(char32_t cp);

// --- Syllable codec ----------------------------------------------------

inline constexpr char32_t kSyllableFirst = 0xAC00;
inline constexpr char32_t kSyllableLast = 0xD7A3;

inline bool IsSyllable(char32_t cp) {
  return cp >= kSyllableFirst && cp <= kSyllableLast;
}

// Onset, vowel, then coda jamo if any. Coda clusters are emitted as their two
// component consonants. Throws DomainError for non-syllable scalars.
JamoSequence DecomposeSyllable(char32_t syllable);

// Decomposes every Hangul syllable in `text`, passes compatibility jamo
// through, and drops whitespace and punctuation. Anything else (Latin,
// digits, conjoining jamo, ...) raises DomainError.
JamoSequence DecomposeText(std::string_view utf8);

// Shortest syllable string whose decomposition is `seq`. Parsing is greedy
// left to right; a consonant is an onset when a vowel follows it and a coda
// otherwise, and two trailing consonants merge into a cluster coda when
// Unicode has one. Throws CompositionError on sequences that do not parse.
std::string ComposeJamo(const JamoSequence& seq);

// ComposeJamo, or the plain jamo string when the sequence does not compose.
std::string ComposeOrJamo(const JamoSequence& seq);

// --- Syllable structure used by the rule engine -------------------------

enum class Role { kOnset, kNucleus, kCoda };

// Per-token syllable membership from a lenient version of the ComposeJamo
// grammar: vowels are nuclei, a consonant followed by a vowel starts a new
// syllable as its onset, every other consonant is a coda of the preceding
// syllable (or an onset-only syllable at the very start).
struct SyllableSlot {
  int syllable;
  Role role;
};

struct SyllableStructure {
  std::vector<SyllableSlot> slots;  // one per token
  int num_syllables = 0;
  // Token index range [begin, end) of every syllable.
  std::vector<std::pair<int, int>> spans;
};

SyllableStructure AnalyzeSyllables(const JamoSequence& seq);

// --- Vocabulary --------------------------------------------------------

class Vocabulary {
 public:
  // 19 consonants and 21 vowels in dictionary order, then "<space>",
  // "<unk>", "<pad>", "<s>", "</s>".
  static const Vocabulary& Default();

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  // nullopt for strings not in the vocabulary.
  std::optional<TokenId> Find(std::string_view token) const;
  TokenId blank_id() const { return kPadId; }

  // One token per line, line number (0-based) = id.
  std::string Serialize() const;

 private:
  Vocabulary();
  std::vector<std::string> tokens_;
};

// Same object as Vocabulary::Default(); kept as a free function for callers
// that treat vocabulary construction as a pipeline step.
const Vocabulary& BuildVocabulary();

// --- Phoneme features --------------------------------------------------

enum class Place { kNone, kBilabial, kAlveolar, kAlveoloPalatal, kVelar, kGlottal };
enum class Manner { kNone, kPlosive, kNasal, kAffricate, kFricative, kLiquid };
enum class Phonation { kNone, kLax, kTense, kAspirated };

struct PhonemeFeatures {
  Place place = Place::kNone;
  Manner manner = Manner::kNone;
  Phonation phonation = Phonation::kNone;
  bool rounded = false;

  friend bool operator==(const PhonemeFeatures&, const PhonemeFeatures&) = default;
};

PhonemeFeatures FeaturesOf(Jamo jamo);
// Throws DomainError for the special tokens.
PhonemeFeatures FeaturesOf(TokenId id);

std::string_view ToString(Place place);
std::string_view ToString(Manner manner);
std::string_view ToString(Phonation phonation);
std::optional<Place> ParsePlace(std::string_view name);
std::optional<Manner> ParseManner(std::string_view name);
std::optional<Phonation> ParsePhonation(std::string_view name);

}  // namespace jamoeval

#endif  // JAMOEVAL_HANGUL_H_
