// Alphabets, tags, paradigms, and the symbol-sequence encodings the model
// consumes. Forms are NFC-normalized sequences of Unicode scalar values; one
// scalar = one symbol. Tags are ordered sequences of subtags.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace msri {

// How raw tag strings split into subtags. Delimiter style covers UniMorph
// ("V;IND;FUT;2;SG"), camel-case covers tags written like "1stSgPres".
struct TagSchema {
  enum class Kind { kDelimiter, kCamelCase };
  Kind kind = Kind::kDelimiter;
  char32_t sep = U';';

  static TagSchema delimiter(char32_t sep = U';') { return {Kind::kDelimiter, sep}; }
  static TagSchema camel_case() { return {Kind::kCamelCase, 0}; }
};

struct MorphTag {
  std::vector<std::string> subtags;  // UTF-8, NFC, order as written

  bool operator==(const MorphTag&) const = default;
  auto operator<=>(const MorphTag&) const = default;
};

MorphTag decompose_tag(const std::string& raw, const TagSchema& schema);
// Inverse of decompose_tag for well-formed raw tags (join with the delimiter,
// or plain concatenation for camel-case).
std::string serialize_tag(const MorphTag& tag, const TagSchema& schema);

struct SourcePair {
  std::u32string form;
  MorphTag tag;

  bool operator==(const SourcePair&) const = default;
};

struct Instance {
  std::vector<SourcePair> sources;  // k >= 1
  MorphTag target_tag;
  std::optional<std::u32string> target_form;  // absent at prediction time
};

struct ParadigmSlot {
  MorphTag tag;
  std::u32string form;

  bool operator==(const ParadigmSlot&) const = default;
  auto operator<=>(const ParadigmSlot&) const = default;
};

// Lemma -> inflected forms with their tags. Slots are kept sorted so every
// downstream choice is independent of input row order.
struct ParadigmTable {
  std::map<std::string, std::vector<ParadigmSlot>> entries;

  const std::vector<ParadigmSlot>& paradigm(const std::string& lemma) const;
  std::size_t total_slots() const;
};

// Joint symbol index: four controls, then language characters sorted by
// codepoint, then subtags sorted lexicographically.
class SymbolVocab {
public:
  static constexpr int kStart = 0;  // S_start
  static constexpr int kEnd = 1;    // S_end
  static constexpr int kPad = 2;
  static constexpr int kUnk = 3;
  static constexpr int kNumControls = 4;

  SymbolVocab() = default;
  SymbolVocab(std::vector<char32_t> chars, std::vector<std::string> subtags);

  int size() const { return kNumControls + static_cast<int>(chars_.size() + subtags_.size()); }
  int char_id(char32_t c) const;                // kUnk when unseen
  int subtag_id(const std::string& sub) const;  // kUnk when unseen
  bool is_char_id(int id) const;
  bool is_subtag_id(int id) const;
  char32_t char_at(int id) const;
  std::string symbol_name(int id) const;  // human-readable label for reports

  const std::vector<char32_t>& chars() const { return chars_; }
  const std::vector<std::string>& subtags() const { return subtags_; }

  bool operator==(const SymbolVocab&) const = default;

private:
  std::vector<char32_t> chars_;       // sorted by codepoint
  std::vector<std::string> subtags_;  // sorted lexicographically
};

// Vocab over every form character and tag subtag in the instances (sources
// and targets alike), plus the controls.
SymbolVocab build_vocab(std::span<const Instance> instances);

// [S_start] ++ source-tag subtags ++ form chars ++ target-tag subtags ++ [S_end]
std::vector<int> encode_source(const SourcePair& source, const MorphTag& target_tag,
                               const SymbolVocab& vocab);
// [S_start] ++ form chars ++ [S_end]
std::vector<int> encode_target(const std::u32string& form, const SymbolVocab& vocab);
// Characters of an id sequence; controls are dropped, unknown ids render as
// U+FFFD. Inverse of encode_target on in-vocab forms.
std::u32string decode_form(std::span<const int> ids, const SymbolVocab& vocab);

}  // namespace msri
