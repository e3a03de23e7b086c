// Checkpoint file: magic+version, model config, vocab, then each parameter as
// (name, rows, cols, row-major f64). Values round-trip bit-exactly; the format
// is little-endian and the build is gated to little-endian hosts.
#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "msri/error.hpp"
#include "msri/model.hpp"
#include "msri/unicode.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace msri {

namespace {

constexpr char kMagic[8] = {'M', 'S', 'R', 'I', 'M', 'D', 'L', '1'};

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_bytes(std::ofstream& out, const void* p, std::size_t n) {
  out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void put_string(std::ofstream& out, const std::string& s) {
  put<std::uint64_t>(out, s.size());
  put_bytes(out, s.data(), s.size());
}

template <typename T>
T get(std::ifstream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("truncated checkpoint");
  return v;
}

std::string get_string(std::ifstream& in) {
  const auto n = get<std::uint64_t>(in);
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw IoError("truncated checkpoint");
  return s;
}

}  // namespace

void save_checkpoint(const std::string& path, ModelParams& params, const SymbolVocab& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  put_bytes(out, kMagic, sizeof(kMagic));

  const ModelConfig& c = params.config;
  put<std::int32_t>(out, c.embed_dim);
  put<std::int32_t>(out, c.hidden_dim);
  put<std::int32_t>(out, c.max_k);
  put<std::uint8_t>(out, c.share_encoder_params ? 1 : 0);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(c.arch));
  put<std::int32_t>(out, c.beam_width);
  put<std::int32_t>(out, c.max_output_len);

  put<std::uint64_t>(out, vocab.chars().size());
  for (char32_t ch : vocab.chars()) put<std::uint32_t>(out, static_cast<std::uint32_t>(ch));
  put<std::uint64_t>(out, vocab.subtags().size());
  for (const std::string& s : vocab.subtags()) put_string(out, s);

  std::vector<Parameter*> ps = params.all();
  put<std::uint64_t>(out, ps.size());
  for (Parameter* p : ps) {
    put_string(out, p->name);
    put<std::uint64_t>(out, static_cast<std::uint64_t>(p->rows()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(p->cols()));
    put_bytes(out, p->value.data(), sizeof(double) * static_cast<std::size_t>(p->value.size()));
  }
  if (!out) throw IoError("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError("not a checkpoint file: " + path);

  ModelConfig c;
  c.embed_dim = get<std::int32_t>(in);
  c.hidden_dim = get<std::int32_t>(in);
  c.max_k = get<std::int32_t>(in);
  c.share_encoder_params = get<std::uint8_t>(in) != 0;
  c.arch = static_cast<Arch>(get<std::uint8_t>(in));
  c.beam_width = get<std::int32_t>(in);
  c.max_output_len = get<std::int32_t>(in);

  std::vector<char32_t> chars(get<std::uint64_t>(in));
  for (char32_t& ch : chars) ch = static_cast<char32_t>(get<std::uint32_t>(in));
  std::vector<std::string> subtags(get<std::uint64_t>(in));
  for (std::string& s : subtags) s = get_string(in);

  Checkpoint ck{ModelParams{}, SymbolVocab(std::move(chars), std::move(subtags))};
  ck.params = init_params(c, ck.vocab);

  std::map<std::string, Parameter*> by_name;
  for (Parameter* p : ck.params.all()) by_name[p->name] = p;

  const auto count = get<std::uint64_t>(in);
  if (count != by_name.size())
    throw IoError("checkpoint holds " + std::to_string(count) + " parameters, expected " +
                  std::to_string(by_name.size()));
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::string name = get_string(in);
    auto it = by_name.find(name);
    if (it == by_name.end()) throw IoError("unknown parameter in checkpoint: " + name);
    Parameter* p = it->second;
    const auto rows = get<std::uint64_t>(in);
    const auto cols = get<std::uint64_t>(in);
    if (rows != static_cast<std::uint64_t>(p->rows()) ||
        cols != static_cast<std::uint64_t>(p->cols()))
      throw IoError("shape mismatch for parameter " + name);
    in.read(reinterpret_cast<char*>(p->value.data()),
            static_cast<std::streamsize>(sizeof(double) * rows * cols));
    if (!in) throw IoError("truncated checkpoint");
  }
  return ck;
}

}  // namespace msri
