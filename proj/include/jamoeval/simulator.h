#ifndef JAMOEVAL_SIMULATOR_H_
#define JAMOEVAL_SIMULATOR_H_

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "jamoeval/ctc.h"
#include "jamoeval/hangul.h"
#include "jamoeval/manifest.h"
#include "jamoeval/rules.h"

namespace jamoeval {

// mt19937_64 with distribution code of our own, so draws are identical on
// every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }
  // Uniform in [0, n); n > 0.
  std::uint64_t Below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 mix of a base seed and an index; gives each utterance its own
// stream so generation order does not matter.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index);

struct NoiseConfig {
  std::uint64_t seed = 0;
  int min_frames_per_token = 2;
  int max_frames_per_token = 4;
  double blank_insertion_prob = 0.3;
  double confusion_temperature = 0.0;  // 0: the spoken token is always realized, rows one-hot
  bool feature_biased = true;

  // Throws DomainError on out-of-range values.
  void Validate() const;
};

// Confusability distance between two tokens; 0 only for a == b. With
// feature bias, consonants sharing place, manner and phonation are closer.
double ConfusionDistance(TokenId a, TokenId b, bool feature_biased);

struct SyntheticUtterance {
  std::string gold_word;
  JamoSequence gold;
  JamoSequence spoken_variant;
  std::vector<std::string> rules;
};

// With probability error_prob a uniformly chosen variant, otherwise gold.
SyntheticUtterance SimulateMispronunciation(const std::string& word,
                                            const std::vector<Variant>& variants,
                                            double error_prob, Rng& rng);
// Generates the depth-2 variants itself.
SyntheticUtterance SimulateMispronunciation(const std::string& word,
                                            const std::vector<ErrorRule>& rules,
                                            double error_prob, Rng& rng);

struct SynthesizedEmissions {
  EmissionMatrix emissions;
  JamoSequence realized;  // what the frames actually encode
  std::vector<std::pair<Jamo, Jamo>> substitutions;  // (spoken, realized)
};

// Each spoken token is realized as itself or, with probability growing in
// the temperature, a confusable jamo; it then occupies 2..4 frames whose
// rows are a softmax of -distance/temperature around the realized token.
// Blank frames separate tokens with blank_insertion_prob and always separate
// repeated tokens. The number of draws does not depend on the temperature.
SynthesizedEmissions SynthesizeEmissions(const JamoSequence& seq, const NoiseConfig& config,
                                         Rng& rng);

struct CorpusConfig {
  NoiseConfig noise;
  double error_prob = 0.5;
  int utterances_per_word = 5;
  int max_depth = 2;
};

// Writes <output_dir>/emissions/<id>.jem and <output_dir>/manifest.jsonl.
// Utterance k uses DeriveSeed(noise.seed, k).
CorpusManifest GenerateCorpus(const std::vector<std::string>& words,
                              const std::vector<ErrorRule>& rules,
                              const CorpusConfig& config, const std::string& output_dir);

}  // namespace jamoeval

#endif  // JAMOEVAL_SIMULATOR_H_
