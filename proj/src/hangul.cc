#include "jamoeval/hangul.h"

#include <algorithm>
#include <sstream>

#include "jamoeval/errors.h"

namespace jamoeval {
namespace {

// Compatibility jamo in vocabulary order. The consonant order coincides with
// the Unicode onset order and the vowel order with the nucleus order.
constexpr std::array<char32_t, kNumJamo> kJamoCodepoints = {
    0x3131, 0x3132, 0x3134, 0x3137, 0x3138, 0x3139, 0x3141, 0x3142,
    0x3143, 0x3145, 0x3146, 0x3147, 0x3148, 0x3149, 0x314A, 0x314B,
    0x314C, 0x314D, 0x314E,
    0x314F, 0x3150, 0x3151, 0x3152, 0x3153, 0x3154, 0x3155, 0x3156,
    0x3157, 0x3158, 0x3159, 0x315A, 0x315B, 0x315C, 0x315D, 0x315E,
    0x315F, 0x3160, 0x3161, 0x3162, 0x3163};

// Consonant ids, named for readability of the tables below.
enum : TokenId {
  kG = 0, kGG, kN, kD, kDD, kR, kM, kB, kBB, kS, kSS, kNg, kJ, kJJ, kCh, kK,
  kT, kP, kH
};

struct Coda {
  TokenId first;
  TokenId second;  // -1 for single consonants
};

// Jongseong index 1..27 -> consonant ids (index 0 = no coda).
constexpr std::array<Coda, 28> kCodas = {{
    {-1, -1}, {kG, -1}, {kGG, -1}, {kG, kS}, {kN, -1}, {kN, kJ}, {kN, kH},
    {kD, -1}, {kR, -1}, {kR, kG}, {kR, kM}, {kR, kB}, {kR, kS}, {kR, kT},
    {kR, kP}, {kR, kH}, {kM, -1}, {kB, -1}, {kB, kS}, {kS, -1}, {kSS, -1},
    {kNg, -1}, {kJ, -1}, {kCh, -1}, {kK, -1}, {kT, -1}, {kP, -1}, {kH, -1},
}};

// Compatibility cluster letters (U+3133 ...) and their component consonants.
struct ClusterLetter {
  char32_t codepoint;
  TokenId first;
  TokenId second;
};
constexpr std::array<ClusterLetter, 11> kClusterLetters = {{
    {0x3133, kG, kS}, {0x3135, kN, kJ}, {0x3136, kN, kH}, {0x313A, kR, kG},
    {0x313B, kR, kM}, {0x313C, kR, kB}, {0x313D, kR, kS}, {0x313E, kR, kT},
    {0x313F, kR, kP}, {0x3140, kR, kH}, {0x3144, kB, kS},
}};

int CodaIndex(TokenId first, TokenId second) {
  for (int i = 1; i < static_cast<int>(kCodas.size()); ++i) {
    if (kCodas[i].first == first && kCodas[i].second == second) return i;
  }
  return -1;
}

std::string CodepointName(char32_t cp) {
  std::ostringstream out;
  out << "U+" << std::uppercase << std::hex;
  out.width(4);
  out.fill('0');
  out << static_cast<std::uint32_t>(cp);
  return out.str();
}

bool IsSpace(char32_t cp) {
  switch (cp) {
    case ' ': case '\t': case '\n': case '\r': case '\v': case '\f':
    case 0x00A0: case 0x1680: case 0x3000: case 0xFEFF:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200B;
  }
}

bool IsPunctuation(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  return (cp >= 0x00A1 && cp <= 0x00BF) ||  // Latin-1 punctuation
         (cp >= 0x2010 && cp <= 0x205E) ||  // general punctuation
         (cp >= 0x3001 && cp <= 0x303F) ||  // CJK symbols and punctuation
         (cp >= 0xFF01 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) ||
         (cp >= 0xFF3B && cp <= 0xFF40) || (cp >= 0xFF5B && cp <= 0xFF65);
}

void AppendUtf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

constexpr std::array<PhonemeFeatures, kNumConsonants> kConsonantFeatures = {{
    {Place::kVelar, Manner::kPlosive, Phonation::kLax},                // ㄱ
    {Place::kVelar, Manner::kPlosive, Phonation::kTense},              // ㄲ
    {Place::kAlveolar, Manner::kNasal, Phonation::kLax},               // ㄴ
    {Place::kAlveolar, Manner::kPlosive, Phonation::kLax},             // ㄷ
    {Place::kAlveolar, Manner::kPlosive, Phonation::kTense},           // ㄸ
    {Place::kAlveolar, Manner::kLiquid, Phonation::kLax},              // ㄹ
    {Place::kBilabial, Manner::kNasal, Phonation::kLax},               // ㅁ
    {Place::kBilabial, Manner::kPlosive, Phonation::kLax},             // ㅂ
    {Place::kBilabial, Manner::kPlosive, Phonation::kTense},           // ㅃ
    {Place::kAlveolar, Manner::kFricative, Phonation::kAspirated},     // ㅅ [sʰ]
    {Place::kAlveolar, Manner::kFricative, Phonation::kTense},         // ㅆ
    {Place::kVelar, Manner::kNasal, Phonation::kLax},                  // ㅇ
    {Place::kAlveoloPalatal, Manner::kAffricate, Phonation::kLax},     // ㅈ
    {Place::kAlveoloPalatal, Manner::kAffricate, Phonation::kTense},   // ㅉ
    {Place::kAlveoloPalatal, Manner::kAffricate, Phonation::kAspirated},  // ㅊ
    {Place::kVelar, Manner::kPlosive, Phonation::kAspirated},          // ㅋ
    {Place::kAlveolar, Manner::kPlosive, Phonation::kAspirated},       // ㅌ
    {Place::kBilabial, Manner::kPlosive, Phonation::kAspirated},       // ㅍ
    {Place::kGlottal, Manner::kFricative, Phonation::kAspirated},      // ㅎ
}};

// ㅗ ㅘ ㅙ ㅚ ㅛ ㅜ ㅝ ㅞ ㅟ ㅠ
bool IsRoundedVowel(char32_t cp) {
  return (cp >= 0x3157 && cp <= 0x3160);
}

}  // namespace

// --- Jamo ----------------------------------------------------------------

std::optional<Jamo> Jamo::FromCodepoint(char32_t cp) {
  auto it = std::find(kJamoCodepoints.begin(), kJamoCodepoints.end(), cp);
  if (it == kJamoCodepoints.end()) return std::nullopt;
  return Jamo(cp, static_cast<TokenId>(it - kJamoCodepoints.begin()));
}

Jamo Jamo::FromId(TokenId id) {
  if (id < 0 || id >= kNumJamo) {
    throw DomainError("token id " + std::to_string(id) + " is not a jamo");
  }
  return Jamo(kJamoCodepoints[id], id);
}

std::string Jamo::utf8() const { return EncodeUtf8(codepoint_); }

JamoSequence ParseJamo(std::string_view utf8) {
  JamoSequence seq;
  for (char32_t cp : DecodeUtf8(utf8)) {
    if (cp == ' ') continue;
    auto jamo = Jamo::FromCodepoint(cp);
    if (!jamo) {
      throw DomainError("not a jamo: " + EncodeUtf8(cp) + " (" +
                        CodepointName(cp) + ")");
    }
    seq.push_back(*jamo);
  }
  return seq;
}

std::string JamoString(const JamoSequence& seq) {
  std::string out;
  for (Jamo j : seq) AppendUtf8(out, j.codepoint());
  return out;
}

std::string SpacedJamoString(const JamoSequence& seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i > 0) out.push_back(' ');
    AppendUtf8(out, seq[i].codepoint());
  }
  return out;
}

std::vector<TokenId> ToIds(const JamoSequence& seq) {
  std::vector<TokenId> ids;
  ids.reserve(seq.size());
  for (Jamo j : seq) ids.push_back(j.id());
  return ids;
}

// --- UTF-8 ---------------------------------------------------------------

std::u32string DecodeUtf8(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  while (i < utf8.size()) {
    auto lead = static_cast<unsigned char>(utf8[i]);
    int extra;
    char32_t cp;
    if (lead < 0x80) {
      extra = 0;
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      extra = 1;
      cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      extra = 2;
      cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
      extra = 3;
      cp = lead & 0x07;
    } else {
      throw DomainError("invalid UTF-8 lead byte at offset " +
                        std::to_string(i));
    }
    if (i + extra >= utf8.size()) {
      throw DomainError("truncated UTF-8 sequence at offset " +
                        std::to_string(i));
    }
    for (int k = 1; k <= extra; ++k) {
      auto cont = static_cast<unsigned char>(utf8[i + k]);
      if ((cont & 0xC0) != 0x80) {
        throw DomainError("invalid UTF-8 continuation byte at offset " +
                          std::to_string(i + k));
      }
      cp = (cp << 6) | (cont & 0x3F);
    }
    static constexpr char32_t kMinForLength[] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMinForLength[extra] || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      throw DomainError("invalid UTF-8 scalar at offset " + std::to_string(i));
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

std::string EncodeUtf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size() * 3);
  for (char32_t cp : text) AppendUtf8(out, cp);
  return out;
}

std::string EncodeUtf8(char32_t cp) {
  std::string out;
  AppendUtf8(out, cp);
  return out;
}

// --- Syllable codec ------------------------------------------------------

JamoSequence DecomposeSyllable(char32_t syllable) {
  if (!IsSyllable(syllable)) {
    throw DomainError("not a precomposed Hangul syllable: " +
                      CodepointName(syllable));
  }
  const int index = static_cast<int>(syllable - kSyllableFirst);
  const int onset = index / (21 * 28);
  const int vowel = (index / 28) % 21;
  const int coda = index % 28;
  JamoSequence seq;
  seq.push_back(Jamo::FromId(onset));
  seq.push_back(Jamo::FromId(kNumConsonants + vowel));
  if (coda > 0) {
    seq.push_back(Jamo::FromId(kCodas[coda].first));
    if (kCodas[coda].second >= 0) {
      seq.push_back(Jamo::FromId(kCodas[coda].second));
    }
  }
  return seq;
}

JamoSequence DecomposeText(std::string_view utf8) {
  JamoSequence seq;
  for (char32_t cp : DecodeUtf8(utf8)) {
    if (IsSyllable(cp)) {
      JamoSequence part = DecomposeSyllable(cp);
      seq.insert(seq.end(), part.begin(), part.end());
    } else if (auto jamo = Jamo::FromCodepoint(cp)) {
      seq.push_back(*jamo);
    } else if (auto it = std::find_if(
                   kClusterLetters.begin(), kClusterLetters.end(),
                   [cp](const ClusterLetter& c) { return c.codepoint == cp; });
               it != kClusterLetters.end()) {
      seq.push_back(Jamo::FromId(it->first));
      seq.push_back(Jamo::FromId(it->second));
    } else if (IsSpace(cp) || IsPunctuation(cp)) {
      continue;
    } else {
      throw DomainError("cannot decompose character " + EncodeUtf8(cp) +
                        " (" + CodepointName(cp) + ")");
    }
  }
  return seq;
}

std::string ComposeJamo(const JamoSequence& seq) {
  const std::size_t n = seq.size();
  auto is_vowel_at = [&](std::size_t k) { return k < n && seq[k].is_vowel(); };
  auto is_coda_consonant_at = [&](std::size_t k) {
    return k < n && seq[k].is_consonant() && !is_vowel_at(k + 1);
  };

  std::u32string out;
  std::size_t i = 0;
  while (i < n) {
    if (seq[i].is_vowel()) {
      throw CompositionError("vowel " + seq[i].utf8() + " has no onset", i);
    }
    if (!is_vowel_at(i + 1)) {
      throw CompositionError("consonant " + seq[i].utf8() + " has no vowel",
                             i);
    }
    const int onset = seq[i].id();
    const int vowel = seq[i + 1].id() - kNumConsonants;
    std::size_t next = i + 2;
    int coda = 0;
    if (is_coda_consonant_at(next)) {
      const TokenId first = seq[next].id();
      int cluster = is_coda_consonant_at(next + 1)
                        ? CodaIndex(first, seq[next + 1].id())
                        : -1;
      if (cluster > 0) {
        coda = cluster;
        next += 2;
      } else {
        coda = CodaIndex(first, -1);
        if (coda < 0) {
          throw CompositionError(
              "consonant " + seq[next].utf8() + " cannot close a syllable",
              next);
        }
        next += 1;
      }
    }
    out.push_back(kSyllableFirst +
                  static_cast<char32_t>((onset * 21 + vowel) * 28 + coda));
    i = next;
  }
  return EncodeUtf8(out);
}

std::string ComposeOrJamo(const JamoSequence& seq) {
  try {
    return ComposeJamo(seq);
  } catch (const CompositionError&) {
    return JamoString(seq);
  }
}

SyllableStructure AnalyzeSyllables(const JamoSequence& seq) {
  SyllableStructure out;
  out.slots.reserve(seq.size());
  const int n = static_cast<int>(seq.size());
  for (int k = 0; k < n; ++k) {
    if (seq[k].is_vowel()) {
      const bool attaches = k > 0 && out.slots[k - 1].role == Role::kOnset;
      if (!attaches) {
        out.spans.emplace_back(k, k);
        ++out.num_syllables;
      }
      out.slots.push_back({out.num_syllables - 1, Role::kNucleus});
    } else if (k + 1 < n && seq[k + 1].is_vowel()) {
      out.spans.emplace_back(k, k);
      ++out.num_syllables;
      out.slots.push_back({out.num_syllables - 1, Role::kOnset});
    } else if (out.num_syllables > 0) {
      out.slots.push_back({out.num_syllables - 1, Role::kCoda});
    } else {
      out.spans.emplace_back(k, k);
      ++out.num_syllables;
      out.slots.push_back({0, Role::kOnset});
    }
    out.spans.back().second = k + 1;
  }
  return out;
}

// --- Vocabulary ----------------------------------------------------------

Vocabulary::Vocabulary() {
  tokens_.reserve(kVocabSize);
  for (char32_t cp : kJamoCodepoints) tokens_.push_back(EncodeUtf8(cp));
  tokens_.insert(tokens_.end(), {"<space>", "<unk>", "<pad>", "<s>", "</s>"});
}

const Vocabulary& Vocabulary::Default() {
  static const Vocabulary vocab;
  return vocab;
}

std::optional<TokenId> Vocabulary::Find(std::string_view token) const {
  auto it = std::find(tokens_.begin(), tokens_.end(), token);
  if (it == tokens_.end()) return std::nullopt;
  return static_cast<TokenId>(it - tokens_.begin());
}

std::string Vocabulary::Serialize() const {
  std::string out;
  for (const auto& t : tokens_) {
    out += t;
    out.push_back('\n');
  }
  return out;
}

const Vocabulary& BuildVocabulary() { return Vocabulary::Default(); }

// --- Features ------------------------------------------------------------

PhonemeFeatures FeaturesOf(Jamo jamo) {
  if (jamo.is_consonant()) return kConsonantFeatures[jamo.id()];
  PhonemeFeatures f;
  f.rounded = IsRoundedVowel(jamo.codepoint());
  return f;
}

PhonemeFeatures FeaturesOf(TokenId id) {
  if (id < 0 || id >= kNumJamo) {
    throw DomainError("token " +
                      (id >= 0 && id < kVocabSize
                           ? Vocabulary::Default().token(id)
                           : std::to_string(id)) +
                      " has no phoneme features");
  }
  return FeaturesOf(Jamo::FromId(id));
}

namespace {
constexpr std::array<std::string_view, 6> kPlaceNames = {
    "none", "bilabial", "alveolar", "alveolo-palatal", "velar", "glottal"};
constexpr std::array<std::string_view, 6> kMannerNames = {
    "none", "plosive", "nasal", "affricate", "fricative", "liquid"};
constexpr std::array<std::string_view, 4> kPhonationNames = {
    "none", "lax", "tense", "aspirated"};

template <typename Enum, std::size_t N>
std::optional<Enum> ParseEnum(const std::array<std::string_view, N>& names,
                              std::string_view name) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == name) return static_cast<Enum>(i);
  }
  return std::nullopt;
}
}  // namespace

std::string_view ToString(Place place) {
  return kPlaceNames[static_cast<int>(place)];
}
std::string_view ToString(Manner manner) {
  return kMannerNames[static_cast<int>(manner)];
}
std::string_view ToString(Phonation phonation) {
  return kPhonationNames[static_cast<int>(phonation)];
}
std::optional<Place> ParsePlace(std::string_view name) {
  return ParseEnum<Place>(kPlaceNames, name);
}
std::optional<Manner> ParseManner(std::string_view name) {
  return ParseEnum<Manner>(kMannerNames, name);
}
std::optional<Phonation> ParsePhonation(std::string_view name) {
  return ParseEnum<Phonation>(kPhonationNames, name);
}

}  // namespace jamoeval
