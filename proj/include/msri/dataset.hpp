// Dataset construction: paradigm/instance file I/O, multi-source sampling,
// nested halvings for learning curves, and source-availability histograms.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "msri/datamodel.hpp"

namespace msri {

struct SamplerConfig {
  int k_extra = 3;  // additional source forms per base pair
  std::uint64_t seed = 0;
  bool exclude_target_slot = true;
};

// Counts of target forms with 1, 2, 3, or >=4 available sources.
struct SourceHistogram {
  std::array<std::uint64_t, 4> counts{};

  std::uint64_t total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
};

// One seed (source, target) pair plus the lemma whose paradigm supplies the
// extra sources.
struct BasePair {
  std::string lemma;
  SourcePair source;
  SourcePair target;
};

// --- file I/O (UTF-8 TSV, LF endings) ---

// 3 columns: lemma <TAB> tag <TAB> form. Identical duplicate rows collapse;
// same (lemma, tag) with different forms is a ConflictError.
ParadigmTable load_paradigms(const std::string& path, const TagSchema& schema);
void save_paradigms(const std::string& path, const ParadigmTable& table, const TagSchema& schema);

// 2k+2 columns: src_tag_1 <TAB> src_form_1 ... trg_tag <TAB> trg_form, ragged
// k across lines, trg_form "_" when absent.
std::vector<Instance> load_instances(const std::string& path, const TagSchema& schema);
void save_instances(const std::string& path, std::span<const Instance> instances,
                    const TagSchema& schema);

void save_histogram(const std::string& path, const SourceHistogram& hist);

// Lemma whose paradigm contains (form, tag); lexicographically smallest on
// ambiguity.
std::string resolve_lemma(const ParadigmTable& paradigms, const SourcePair& slot);

// Base pairs from a k=1 instance file, resolving each source against the
// paradigm table.
std::vector<BasePair> make_base_pairs(const ParadigmTable& paradigms,
                                      std::span<const Instance> singles);

// --- construction ---

// Each base pair becomes one instance: its source plus up to k_extra further
// slots drawn uniformly without replacement from the same paradigm, never the
// base slot itself and (by default) never the target slot. Fewer eligible
// slots yield ragged k. Per-instance RNG streams make the result independent
// of iteration order.
std::vector<Instance> sample_multisource(const ParadigmTable& paradigms,
                                         std::span<const BasePair> base,
                                         const SamplerConfig& cfg);

// Copies with every instance cut down to its first k sources; k <= 0 keeps
// everything.
std::vector<Instance> restrict_sources(std::span<const Instance> instances, int k);

// Nested subsets of sizes N, floor(N/2), ..., floor(N/2^levels); each subset
// of the previous one, selection uniform given seed.
std::vector<std::vector<Instance>> halve_training(std::span<const Instance> instances, int levels,
                                                  std::uint64_t seed);

SourceHistogram source_histogram(std::span<const Instance> instances);

// --- synthetic benchmark language ---

// A toy agglutinative language. Every form is head ++ vowel ++ tail ++ suffix,
// where the consonant frame (head, tail) identifies the lemma. Slot roles:
//   0        citation: neutral vowel, common suffix (the base source)
//   1        reveals the lemma's vowel class
//   2        reveals the lemma's suffix class
//   3        SingleForm target: needs the vowel class, so only slot 1 helps
//   4        MultiForm target: needs both classes, so slots 1 and 2 together
//   5..      neutral fillers
// Class priors per dimension are geometrically skewed 3:1 so that a
// majority-class guesser stays well above uniform chance.
struct SyntheticSpec {
  int classes = 2;  // classes per dimension (vowel and suffix are independent)
  int slots = 6;    // at least 5
  std::vector<std::u32string> vowels;  // [neutral] alone disables alternation,
                                       // otherwise [neutral, one per class]
  std::vector<std::vector<std::u32string>> suffixes;  // 1 or classes+1 rows of
                                                      // `slots` suffixes
  int lemma_count = 100;
  std::uint64_t seed = 0;
  int dev_lemmas = -1;   // -1 = lemma_count / 10, at least 1
  int test_lemmas = -1;  // likewise
};

// Flat `key = value` lines, '#' comments. Keys: classes, slots, vowels
// (comma-separated), suffixes (rows ';'-separated, cells ','-separated),
// lemma_count, seed, dev_lemmas, test_lemmas. Unknown keys are SpecErrors.
SyntheticSpec parse_synthetic_spec(const std::string& text);
SyntheticSpec load_synthetic_spec(const std::string& path);

struct LemmaFrame {
  std::string name;  // citation form, also the paradigm key
  std::u32string head, tail;
  int vowel_class = 0;
  int suffix_class = 0;
};

struct SyntheticLanguage {
  static constexpr int kBaseSlot = 0;
  static constexpr int kVowelSlot = 1;
  static constexpr int kSuffixSlot = 2;
  static constexpr int kSingleFormSlot = 3;
  static constexpr int kMultiFormSlot = 4;

  SyntheticSpec spec;  // validated, with defaults resolved
  std::vector<LemmaFrame> lemmas;
  ParadigmTable table;
  std::vector<std::string> train_lemmas, dev_lemmas, test_lemmas;  // sorted

  MorphTag slot_tag(int slot) const;
  // The surface form of a lemma frame in the given classes at the given slot.
  std::u32string render(const LemmaFrame& frame, int vowel_class, int suffix_class,
                        int slot) const;
};

// Deterministic in (spec, seed); the seed argument wins over spec.seed.
// Splits are lemma-disjoint.
SyntheticLanguage generate_synthetic_language(const SyntheticSpec& spec, std::uint64_t seed);

// Two instances per lemma, one per designated target slot. The base source is
// the citation slot; k_extra extras are drawn without replacement from the
// remaining non-target slots under per-instance RNG streams.
std::vector<Instance> synthesize_instances(const SyntheticLanguage& lang,
                                           std::span<const std::string> lemmas, int k_extra,
                                           std::uint64_t seed);

// The generator's own oracle: every form the instance's target slot could
// take across all (lemma, classes) assignments consistent with the sources.
// Sorted and deduplicated; a singleton means the target is fully determined.
std::vector<std::u32string> synthetic_possible_targets(const SyntheticLanguage& lang,
                                                       const Instance& ins);

}  // namespace msri
