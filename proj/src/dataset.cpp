#include "msri/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "msri/error.hpp"
#include "msri/rng.hpp"
#include "msri/unicode.hpp"

namespace msri {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cols.push_back(line.substr(start));
      return cols;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

// Strips a trailing CR so CRLF files load; the writer always emits LF.
void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::u32string parse_form(const std::string& raw, std::size_t line_no) {
  if (raw.empty()) throw ParseError(line_no, "empty form");
  try {
    return [&] {
      auto cps = uni::nfc(uni::decode_utf8(raw));
      return std::u32string(cps.begin(), cps.end());
    }();
  } catch (const std::invalid_argument& e) {
    throw ParseError(line_no, std::string("bad UTF-8: ") + e.what());
  }
}

MorphTag parse_tag(const std::string& raw, const TagSchema& schema, std::size_t line_no) {
  try {
    return decompose_tag(raw, schema);
  } catch (const Error& e) {
    throw ParseError(line_no, e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(line_no, std::string("bad UTF-8: ") + e.what());
  }
}

std::string form_utf8(const std::u32string& f) {
  return uni::encode_utf8(std::vector<char32_t>(f.begin(), f.end()));
}

}  // namespace

ParadigmTable load_paradigms(const std::string& path, const TagSchema& schema) {
  std::ifstream in = open_in(path);
  ParadigmTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty()) continue;
    std::vector<std::string> cols = split_tabs(line);
    if (cols.size() != 3)
      throw ParseError(line_no, "expected 3 columns, got " + std::to_string(cols.size()));
    if (cols[0].empty()) throw ParseError(line_no, "empty lemma");
    const std::string lemma = uni::nfc_utf8(cols[0]);
    ParadigmSlot slot{parse_tag(cols[1], schema, line_no), parse_form(cols[2], line_no)};

    auto& slots = table.entries[lemma];
    bool dup = false;
    for (const ParadigmSlot& s : slots) {
      if (s.tag == slot.tag) {
        if (s.form == slot.form) {
          dup = true;
          break;
        }
        throw ConflictError("lemma '" + lemma + "' tag '" + serialize_tag(slot.tag, schema) +
                            "' maps to both '" + form_utf8(s.form) + "' and '" +
                            form_utf8(slot.form) + "'");
      }
    }
    if (!dup) slots.push_back(std::move(slot));
  }
  for (auto& [lemma, slots] : table.entries) std::sort(slots.begin(), slots.end());
  return table;
}

void save_paradigms(const std::string& path, const ParadigmTable& table,
                    const TagSchema& schema) {
  std::ofstream out = open_out(path);
  for (const auto& [lemma, slots] : table.entries)
    for (const ParadigmSlot& s : slots)
      out << lemma << '\t' << serialize_tag(s.tag, schema) << '\t' << form_utf8(s.form) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

std::vector<Instance> load_instances(const std::string& path, const TagSchema& schema) {
  std::ifstream in = open_in(path);
  std::vector<Instance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty()) continue;
    std::vector<std::string> cols = split_tabs(line);
    if (cols.size() < 4 || cols.size() % 2 != 0)
      throw ParseError(line_no,
                       "expected 2k+2 columns (k >= 1), got " + std::to_string(cols.size()));
    Instance ins;
    const std::size_t k = cols.size() / 2 - 1;
    for (std::size_t m = 0; m < k; ++m) {
      SourcePair src;
      src.tag = parse_tag(cols[2 * m], schema, line_no);
      src.form = parse_form(cols[2 * m + 1], line_no);
      ins.sources.push_back(std::move(src));
    }
    ins.target_tag = parse_tag(cols[cols.size() - 2], schema, line_no);
    const std::string& trg = cols.back();
    if (trg != "_") ins.target_form = parse_form(trg, line_no);
    out.push_back(std::move(ins));
  }
  return out;
}

void save_instances(const std::string& path, std::span<const Instance> instances,
                    const TagSchema& schema) {
  std::ofstream out = open_out(path);
  for (const Instance& ins : instances) {
    for (const SourcePair& s : ins.sources)
      out << serialize_tag(s.tag, schema) << '\t' << form_utf8(s.form) << '\t';
    out << serialize_tag(ins.target_tag, schema) << '\t'
        << (ins.target_form ? form_utf8(*ins.target_form) : std::string("_")) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void save_histogram(const std::string& path, const SourceHistogram& hist) {
  std::ofstream out = open_out(path);
  out << "1\t" << hist.counts[0] << "\n2\t" << hist.counts[1] << "\n3\t" << hist.counts[2]
      << "\n4plus\t" << hist.counts[3] << '\n';
  if (!out) throw IoError("write failed: " + path);
}

std::string resolve_lemma(const ParadigmTable& paradigms, const SourcePair& slot) {
  for (const auto& [lemma, slots] : paradigms.entries) {  // map order = lexicographic
    for (const ParadigmSlot& s : slots)
      if (s.tag == slot.tag && s.form == slot.form) return lemma;
  }
  throw UnknownLemma("no paradigm contains form '" + form_utf8(slot.form) + "'");
}

std::vector<BasePair> make_base_pairs(const ParadigmTable& paradigms,
                                      std::span<const Instance> singles) {
  std::vector<BasePair> out;
  out.reserve(singles.size());
  for (const Instance& ins : singles) {
    if (ins.sources.size() != 1)
      throw InstanceMismatch("base pair rows must have exactly one source");
    if (!ins.target_form) throw InstanceMismatch("base pair rows need a target form");
    BasePair bp;
    bp.source = ins.sources[0];
    bp.target = SourcePair{*ins.target_form, ins.target_tag};
    bp.lemma = resolve_lemma(paradigms, bp.source);
    out.push_back(std::move(bp));
  }
  return out;
}

std::vector<Instance> sample_multisource(const ParadigmTable& paradigms,
                                         std::span<const BasePair> base,
                                         const SamplerConfig& cfg) {
  std::vector<Instance> out;
  out.reserve(base.size());
  for (std::size_t idx = 0; idx < base.size(); ++idx) {
    const BasePair& bp = base[idx];
    const std::vector<ParadigmSlot>& slots = paradigms.paradigm(bp.lemma);

    std::vector<const ParadigmSlot*> eligible;
    for (const ParadigmSlot& s : slots) {
      if (s.tag == bp.source.tag && s.form == bp.source.form) continue;
      if (cfg.exclude_target_slot && s.tag == bp.target.tag && s.form == bp.target.form) continue;
      eligible.push_back(&s);
    }

    Instance ins;
    ins.sources.push_back(bp.source);
    const std::size_t want = std::min<std::size_t>(static_cast<std::size_t>(cfg.k_extra),
                                                   eligible.size());
    SplitMix64 rng(derive_stream(cfg.seed, idx));
    for (std::size_t j : sample_without_replacement(eligible.size(), want, rng))
      ins.sources.push_back(SourcePair{eligible[j]->form, eligible[j]->tag});
    ins.target_tag = bp.target.tag;
    ins.target_form = bp.target.form;
    out.push_back(std::move(ins));
  }
  return out;
}

std::vector<Instance> restrict_sources(std::span<const Instance> instances, int k) {
  std::vector<Instance> out(instances.begin(), instances.end());
  if (k > 0)
    for (Instance& ins : out)
      if (ins.sources.size() > static_cast<std::size_t>(k))
        ins.sources.resize(static_cast<std::size_t>(k));
  return out;
}

std::vector<std::vector<Instance>> halve_training(std::span<const Instance> instances, int levels,
                                                  std::uint64_t seed) {
  if (levels < 0) throw TooFewInstances("levels must be >= 0");
  const std::size_t n = instances.size();
  if (n >> levels == 0)
    throw TooFewInstances(std::to_string(n) + " instances cannot halve " +
                          std::to_string(levels) + " times");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  SplitMix64 rng(seed);
  shuffle(order, rng);

  std::vector<std::vector<Instance>> out;
  std::size_t size = n;
  for (int level = 0; level <= levels; ++level) {
    std::vector<std::size_t> picked(order.begin(),
                                    order.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(picked.begin(), picked.end());  // keep original relative order
    std::vector<Instance> subset;
    subset.reserve(size);
    for (std::size_t i : picked) subset.push_back(instances[i]);
    out.push_back(std::move(subset));
    size /= 2;
  }
  return out;
}

SourceHistogram source_histogram(std::span<const Instance> instances) {
  SourceHistogram h;
  for (const Instance& ins : instances) {
    const std::size_t k = ins.sources.size();
    if (k >= 4)
      ++h.counts[3];
    else if (k >= 1)
      ++h.counts[k - 1];
  }
  return h;
}

// --- synthetic benchmark language ---

namespace {

constexpr std::u32string_view kConsonants = U"bdgklmnprst";
constexpr std::u32string_view kDefaultVowels = U"eaiou";  // neutral first
const char* const kDefaultCommonSuffixes[] = {"",   "ta", "ko", "ri", "mu", "na",
                                              "pe", "li", "so", "du", "ga", "no"};
const char* const kClassMarks = "snrl";  // prefixed to class-row suffixes

// Stream indices for derive_stream; lemma indices stay far below kInstances.
constexpr std::uint64_t kSplitStream = 0x53504C4954;
constexpr std::uint64_t kInstanceStreams = std::uint64_t{1} << 32;

std::u32string to_u32(const std::string& s) {
  auto v = uni::decode_utf8(s);
  return std::u32string(v.begin(), v.end());
}

std::string to_utf8(const std::u32string& s) {
  return uni::encode_utf8(std::vector<char32_t>(s.begin(), s.end()));
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t at = s.find(sep, start);
    if (at == std::string::npos) {
      out.push_back(trim(s.substr(start)));
      return out;
    }
    out.push_back(trim(s.substr(start, at - start)));
    start = at + 1;
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw SpecError("bad integer for " + key + ": '" + value + "'");
  }
}

// Fills defaults and checks every structural constraint.
SyntheticSpec validate_spec(SyntheticSpec spec) {
  if (spec.classes < 1) throw SpecError("classes must be at least 1");
  if (spec.slots < 5) throw SpecError("slots must be at least 5 (five designated roles)");
  if (spec.lemma_count < 1) throw SpecError("lemma_count must be at least 1");

  if (spec.vowels.empty()) {
    if (spec.classes + 1 > static_cast<int>(kDefaultVowels.size()))
      throw SpecError("more than 4 classes need an explicit vowels list");
    for (int i = 0; i <= spec.classes; ++i) spec.vowels.push_back({kDefaultVowels[i]});
  }
  if (spec.vowels.size() != 1 && spec.vowels.size() != static_cast<std::size_t>(spec.classes) + 1)
    throw SpecError("vowels must list the neutral vowel alone or one entry per class after it");
  for (std::size_t i = 0; i < spec.vowels.size(); ++i) {
    if (spec.vowels[i].empty()) throw SpecError("vowels must be non-empty");
    for (std::size_t j = i + 1; j < spec.vowels.size(); ++j)
      if (spec.vowels[i] == spec.vowels[j]) throw SpecError("vowels must be distinct");
  }

  if (spec.suffixes.empty()) {
    if (spec.classes > 4) throw SpecError("more than 4 classes need an explicit suffix table");
    std::vector<std::u32string> common;
    const int pool = static_cast<int>(std::size(kDefaultCommonSuffixes));
    for (int s = 0; s < spec.slots; ++s) {
      std::u32string suf = to_u32(kDefaultCommonSuffixes[s % pool]);
      for (int rep = 0; rep < s / pool; ++rep) suf += suf.empty() ? U"ha" : suf;
      common.push_back(suf);
    }
    spec.suffixes.push_back(common);
    for (int u = 0; u < spec.classes; ++u) {
      std::vector<std::u32string> row = common;
      const char32_t mark = static_cast<char32_t>(kClassMarks[u]);
      row[SyntheticLanguage::kSuffixSlot] =
          mark + row[SyntheticLanguage::kSuffixSlot];
      row[SyntheticLanguage::kMultiFormSlot] =
          mark + row[SyntheticLanguage::kMultiFormSlot];
      spec.suffixes.push_back(row);
    }
  }
  if (spec.suffixes.size() != 1 &&
      spec.suffixes.size() != static_cast<std::size_t>(spec.classes) + 1)
    throw SpecError("suffixes must hold the common row alone or one row per class after it");
  for (const auto& row : spec.suffixes)
    if (row.size() != static_cast<std::size_t>(spec.slots))
      throw SpecError("every suffix row needs one entry per slot");
  if (spec.suffixes.size() > 1) {
    for (int col : {SyntheticLanguage::kSuffixSlot, SyntheticLanguage::kMultiFormSlot})
      for (std::size_t a = 1; a < spec.suffixes.size(); ++a)
        for (std::size_t b = a + 1; b < spec.suffixes.size(); ++b)
          if (spec.suffixes[a][static_cast<std::size_t>(col)] ==
              spec.suffixes[b][static_cast<std::size_t>(col)])
            throw SpecError("class suffix rows collide at a revealing slot");
  }

  if (spec.dev_lemmas < 0) spec.dev_lemmas = std::max(1, spec.lemma_count / 10);
  if (spec.test_lemmas < 0) spec.test_lemmas = std::max(1, spec.lemma_count / 10);
  if (spec.dev_lemmas + spec.test_lemmas >= spec.lemma_count)
    throw SpecError("dev and test splits leave no training lemmata");
  return spec;
}

// Geometrically skewed class draw: weight 3^(classes-1-c) for class c.
int draw_class(SplitMix64& rng, int classes) {
  std::uint64_t total = 0, w = 1;
  std::vector<std::uint64_t> weights(static_cast<std::size_t>(classes));
  for (int c = classes - 1; c >= 0; --c) {
    weights[static_cast<std::size_t>(c)] = w;
    total += w;
    w *= 3;
  }
  std::uint64_t r = rng.below(total);
  for (int c = 0; c < classes; ++c) {
    if (r < weights[static_cast<std::size_t>(c)]) return c;
    r -= weights[static_cast<std::size_t>(c)];
  }
  return classes - 1;
}

}  // namespace

MorphTag SyntheticLanguage::slot_tag(int slot) const {
  return MorphTag{{"V", "F" + std::to_string(slot + 1)}};
}

std::u32string SyntheticLanguage::render(const LemmaFrame& frame, int vowel_class,
                                         int suffix_class, int slot) const {
  const bool class_vowel =
      spec.vowels.size() > 1 &&
      (slot == kVowelSlot || slot == kSingleFormSlot || slot == kMultiFormSlot);
  const bool class_suffix =
      spec.suffixes.size() > 1 && (slot == kSuffixSlot || slot == kMultiFormSlot);
  const std::u32string& vowel =
      class_vowel ? spec.vowels[static_cast<std::size_t>(vowel_class) + 1] : spec.vowels[0];
  const auto& row = class_suffix ? spec.suffixes[static_cast<std::size_t>(suffix_class) + 1]
                                 : spec.suffixes[0];
  return frame.head + vowel + frame.tail + row[static_cast<std::size_t>(slot)];
}

SyntheticLanguage generate_synthetic_language(const SyntheticSpec& raw, std::uint64_t seed) {
  SyntheticLanguage lang;
  lang.spec = validate_spec(raw);
  lang.spec.seed = seed;
  const SyntheticSpec& spec = lang.spec;

  const std::size_t base = kConsonants.size();
  for (int i = 0; i < spec.lemma_count; ++i) {
    // Consonant frame from the base-11 digits of the lemma index, two minimum.
    std::vector<std::size_t> digits;
    for (std::size_t rest = static_cast<std::size_t>(i); rest > 0; rest /= base)
      digits.push_back(rest % base);
    while (digits.size() < 2) digits.push_back(0);
    std::reverse(digits.begin(), digits.end());

    LemmaFrame f;
    f.head = kConsonants[digits[0]];
    for (std::size_t d = 1; d < digits.size(); ++d) f.tail += kConsonants[digits[d]];
    SplitMix64 rng(derive_stream(seed, static_cast<std::uint64_t>(i)));
    f.vowel_class = draw_class(rng, spec.classes);
    f.suffix_class = draw_class(rng, spec.classes);
    f.name = to_utf8(f.head + spec.vowels[0] + f.tail);

    std::vector<ParadigmSlot> slots;
    for (int s = 0; s < spec.slots; ++s)
      slots.push_back({lang.slot_tag(s), lang.render(f, f.vowel_class, f.suffix_class, s)});
    std::sort(slots.begin(), slots.end());
    lang.table.entries[f.name] = std::move(slots);
    lang.lemmas.push_back(std::move(f));
  }

  std::vector<std::size_t> order(static_cast<std::size_t>(spec.lemma_count));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  SplitMix64 split_rng(derive_stream(seed, kSplitStream));
  shuffle(order, split_rng);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::string& name = lang.lemmas[order[i]].name;
    if (i < static_cast<std::size_t>(spec.test_lemmas))
      lang.test_lemmas.push_back(name);
    else if (i < static_cast<std::size_t>(spec.test_lemmas + spec.dev_lemmas))
      lang.dev_lemmas.push_back(name);
    else
      lang.train_lemmas.push_back(name);
  }
  std::sort(lang.train_lemmas.begin(), lang.train_lemmas.end());
  std::sort(lang.dev_lemmas.begin(), lang.dev_lemmas.end());
  std::sort(lang.test_lemmas.begin(), lang.test_lemmas.end());
  return lang;
}

std::vector<Instance> synthesize_instances(const SyntheticLanguage& lang,
                                           std::span<const std::string> lemmas, int k_extra,
                                           std::uint64_t seed) {
  if (k_extra < 0) throw SpecError("k_extra must be non-negative");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < lang.lemmas.size(); ++i) index[lang.lemmas[i].name] = i;

  // Extras come from every slot that is neither the base nor a target.
  std::vector<int> eligible;
  for (int s = 0; s < lang.spec.slots; ++s)
    if (s != SyntheticLanguage::kBaseSlot && s != SyntheticLanguage::kSingleFormSlot &&
        s != SyntheticLanguage::kMultiFormSlot)
      eligible.push_back(s);

  std::vector<Instance> out;
  for (const std::string& name : lemmas) {
    auto it = index.find(name);
    if (it == index.end()) throw UnknownLemma(name);
    const LemmaFrame& f = lang.lemmas[it->second];
    const int targets[] = {SyntheticLanguage::kSingleFormSlot, SyntheticLanguage::kMultiFormSlot};
    for (int t = 0; t < 2; ++t) {
      SplitMix64 rng(
          derive_stream(seed, kInstanceStreams + 2 * static_cast<std::uint64_t>(it->second) +
                                  static_cast<std::uint64_t>(t)));
      const std::size_t extras =
          std::min<std::size_t>(static_cast<std::size_t>(k_extra), eligible.size());
      Instance ins;
      auto add_source = [&](int slot) {
        ins.sources.push_back(
            {lang.render(f, f.vowel_class, f.suffix_class, slot), lang.slot_tag(slot)});
      };
      add_source(SyntheticLanguage::kBaseSlot);
      for (std::size_t pick : sample_without_replacement(eligible.size(), extras, rng))
        add_source(eligible[pick]);
      ins.target_tag = lang.slot_tag(targets[t]);
      ins.target_form = lang.render(f, f.vowel_class, f.suffix_class, targets[t]);
      out.push_back(std::move(ins));
    }
  }
  return out;
}

std::vector<std::u32string> synthetic_possible_targets(const SyntheticLanguage& lang,
                                                       const Instance& ins) {
  std::map<MorphTag, int> slot_of;
  for (int s = 0; s < lang.spec.slots; ++s) slot_of[lang.slot_tag(s)] = s;
  auto slot_for = [&](const MorphTag& tag) {
    auto it = slot_of.find(tag);
    if (it == slot_of.end()) throw SpecError("tag does not name a synthetic slot");
    return it->second;
  };
  const int target_slot = slot_for(ins.target_tag);

  std::vector<std::u32string> forms;
  for (const LemmaFrame& f : lang.lemmas) {
    for (int v = 0; v < lang.spec.classes; ++v) {
      for (int u = 0; u < lang.spec.classes; ++u) {
        bool ok = true;
        for (const SourcePair& src : ins.sources)
          if (lang.render(f, v, u, slot_for(src.tag)) != src.form) {
            ok = false;
            break;
          }
        if (ok) forms.push_back(lang.render(f, v, u, target_slot));
      }
    }
  }
  std::sort(forms.begin(), forms.end());
  forms.erase(std::unique(forms.begin(), forms.end()), forms.end());
  return forms;
}

SyntheticSpec parse_synthetic_spec(const std::string& text) {
  SyntheticSpec spec;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw SpecError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "classes") {
      spec.classes = static_cast<int>(parse_int(key, value));
    } else if (key == "slots") {
      spec.slots = static_cast<int>(parse_int(key, value));
    } else if (key == "lemma_count") {
      spec.lemma_count = static_cast<int>(parse_int(key, value));
    } else if (key == "dev_lemmas") {
      spec.dev_lemmas = static_cast<int>(parse_int(key, value));
    } else if (key == "test_lemmas") {
      spec.test_lemmas = static_cast<int>(parse_int(key, value));
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "vowels") {
      spec.vowels.clear();
      for (const std::string& v : split_on(value, ','))
        spec.vowels.push_back(to_u32(uni::nfc_utf8(v)));
    } else if (key == "suffixes") {
      spec.suffixes.clear();
      for (const std::string& row : split_on(value, ';')) {
        std::vector<std::u32string> cells;
        for (const std::string& cell : split_on(row, ','))
          cells.push_back(to_u32(uni::nfc_utf8(cell)));
        spec.suffixes.push_back(std::move(cells));
      }
    } else {
      throw SpecError("unknown key '" + key + "' on line " + std::to_string(lineno));
    }
  }
  return spec;
}

SyntheticSpec load_synthetic_spec(const std::string& path) {
  std::ifstream in = open_in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_synthetic_spec(buf.str());
}

}  // namespace msri
