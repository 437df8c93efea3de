#include "jamoeval/simulator.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "jamoeval/errors.h"

namespace jamoeval {
namespace fs = std::filesystem;

namespace {

constexpr double kFloor = 1e-12;

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool IsSpecial(TokenId t) { return t >= kNumJamo; }

// Emission row centred on `center`, as natural-log probabilities.
void AppendRow(std::vector<float>& values, TokenId center, double temperature, bool biased) {
  std::array<double, kVocabSize> p{};
  if (temperature == 0.0) {
    p[center] = 1.0;
  } else {
    for (TokenId v = 0; v < kVocabSize; ++v)
      p[v] = std::exp(-ConfusionDistance(center, v, biased) / temperature);
  }
  double total = 0.0;
  for (double& x : p) {
    x = std::max(x, kFloor);
    total += x;
  }
  for (double x : p) values.push_back(static_cast<float>(std::log(x / total)));
}

// Inverse-CDF draw over jamo ordered by distance from `spoken` (itself
// first), so a fixed u realizes the spoken token at every temperature up to
// some threshold.
TokenId SampleRealized(TokenId spoken, double u, double temperature, bool biased) {
  if (temperature == 0.0) return spoken;
  std::vector<std::pair<double, TokenId>> order;
  order.reserve(kNumJamo);
  for (TokenId v = 0; v < kNumJamo; ++v)
    order.emplace_back(ConfusionDistance(spoken, v, biased), v);
  std::sort(order.begin(), order.end());
  double total = 0.0;
  for (const auto& [d, v] : order) total += std::exp(-d / temperature);
  double acc = 0.0;
  for (const auto& [d, v] : order) {
    acc += std::exp(-d / temperature) / total;
    if (u < acc) return v;
  }
  return order.back().second;
}

}  // namespace

std::uint64_t Rng::Below(std::uint64_t n) {
  if (n == 0) throw DomainError("Rng::Below(0)");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = Next();
  } while (x >= limit);
  return x % n;
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(seed ^ SplitMix64(index));
}

void NoiseConfig::Validate() const {
  if (min_frames_per_token < 1 || max_frames_per_token < min_frames_per_token)
    throw DomainError("frames per token must satisfy 1 <= min <= max");
  if (!(blank_insertion_prob >= 0.0 && blank_insertion_prob <= 1.0))
    throw DomainError("blank insertion probability must be in [0, 1]");
  if (!(confusion_temperature >= 0.0) || !std::isfinite(confusion_temperature))
    throw DomainError("confusion temperature must be finite and >= 0");
}

double ConfusionDistance(TokenId a, TokenId b, bool feature_biased) {
  if (a == b) return 0.0;
  if (a == kPadId || b == kPadId) return IsSpecial(a) && IsSpecial(b) ? 10.0 : 3.0;
  if (IsSpecial(a) || IsSpecial(b)) return 10.0;
  if (!feature_biased) return 4.0;
  const Jamo ja = Jamo::FromId(a), jb = Jamo::FromId(b);
  if (ja.is_consonant() && jb.is_consonant()) {
    const PhonemeFeatures fa = FeaturesOf(ja), fb = FeaturesOf(jb);
    return 2.0 + std::abs(static_cast<int>(fa.place) - static_cast<int>(fb.place)) +
           (fa.manner != fb.manner) + (fa.phonation != fb.phonation);
  }
  if (ja.is_vowel() && jb.is_vowel())
    return 2.0 + (FeaturesOf(ja).rounded != FeaturesOf(jb).rounded);
  return 8.0;
}

SyntheticUtterance SimulateMispronunciation(const std::string& word,
                                            const std::vector<Variant>& variants,
                                            double error_prob, Rng& rng) {
  if (!(error_prob >= 0.0 && error_prob <= 1.0))
    throw DomainError("error probability must be in [0, 1]");
  SyntheticUtterance u;
  u.gold_word = word;
  u.gold = DecomposeText(word);
  u.spoken_variant = u.gold;
  if (rng.Uniform() < error_prob && !variants.empty()) {
    const Variant& v = variants[rng.Below(variants.size())];
    u.spoken_variant = v.sequence;
    for (const auto& app : v.applications) u.rules.push_back(app.rule_id);
  }
  return u;
}

SyntheticUtterance SimulateMispronunciation(const std::string& word,
                                            const std::vector<ErrorRule>& rules,
                                            double error_prob, Rng& rng) {
  return SimulateMispronunciation(word, GenerateVariants(word, rules, 2), error_prob, rng);
}

SynthesizedEmissions SynthesizeEmissions(const JamoSequence& seq, const NoiseConfig& config,
                                         Rng& rng) {
  config.Validate();
  if (seq.empty()) throw DomainError("cannot synthesize emissions for an empty sequence");
  const double tau = config.confusion_temperature;
  const bool biased = config.feature_biased;
  SynthesizedEmissions out;
  std::vector<float> values;
  int frames = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const double gap = i > 0 ? rng.Uniform() : 1.0;
    const double u = rng.Uniform();
    const int span = config.min_frames_per_token +
                     static_cast<int>(rng.Below(config.max_frames_per_token -
                                                config.min_frames_per_token + 1));
    const TokenId realized = SampleRealized(seq[i].id(), u, tau, biased);
    if (i > 0 && (gap < config.blank_insertion_prob || realized == out.realized.back().id())) {
      AppendRow(values, kPadId, tau, biased);
      ++frames;
    }
    for (int f = 0; f < span; ++f) AppendRow(values, realized, tau, biased);
    frames += span;
    const Jamo r = Jamo::FromId(realized);
    out.realized.push_back(r);
    if (r != seq[i]) out.substitutions.emplace_back(seq[i], r);
  }
  out.emissions = EmissionMatrix(frames, kVocabSize, std::move(values));
  return out;
}

CorpusManifest GenerateCorpus(const std::vector<std::string>& words,
                              const std::vector<ErrorRule>& rules, const CorpusConfig& config,
                              const std::string& output_dir) {
  config.noise.Validate();
  if (words.empty()) throw DomainError("word list is empty");
  if (config.utterances_per_word < 1) throw DomainError("utterances per word must be >= 1");

  std::error_code ec;
  fs::create_directories(fs::path(output_dir) / "emissions", ec);
  if (ec) throw DomainError("cannot create " + output_dir + ": " + ec.message());

  CorpusManifest manifest;
  manifest.base_dir = output_dir;
  std::uint64_t index = 0;
  for (const std::string& word : words) {
    const std::vector<Variant> variants = GenerateVariants(word, rules, config.max_depth);
    for (int rep = 0; rep < config.utterances_per_word; ++rep, ++index) {
      Rng rng(DeriveSeed(config.noise.seed, index));
      const SyntheticUtterance utt =
          SimulateMispronunciation(word, variants, config.error_prob, rng);
      const SynthesizedEmissions syn = SynthesizeEmissions(utt.spoken_variant, config.noise, rng);

      char id[32];
      std::snprintf(id, sizeof id, "utt%05llu", static_cast<unsigned long long>(index));
      UtteranceRecord r;
      r.id = id;
      r.emission_path = "emissions/" + r.id + ".jem";
      r.target_text = ComposeOrJamo(utt.spoken_variant);
      r.gold_word = word;
      r.rules = utt.rules;
      for (const auto& [from, to] : syn.substitutions)
        r.substitutions.emplace_back(from.utf8(), to.utf8());
      r.target = utt.spoken_variant;
      WriteEmissions(syn.emissions, manifest.ResolveEmissionPath(r));
      manifest.records.push_back(std::move(r));
    }
  }
  WriteManifest(manifest, (fs::path(output_dir) / "manifest.jsonl").string());
  return manifest;
}

}  // namespace jamoeval
