// The multi-source encoder-decoder: k bidirectional GRU encoders (weights
// shared or per-source), one jointly normalized attention layer over every
// position of every source, and a GRU decoder whose output distribution
// conditions on (state, context, previous symbol). Includes the single-encoder
// variant that concatenates all sources into one input sequence.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "msri/datamodel.hpp"
#include "msri/numerics.hpp"

namespace msri {

enum class Arch : std::uint8_t { kMultiEncoder = 0, kConcatSingleEncoder = 1 };

struct ModelConfig {
  int embed_dim = 300;
  int hidden_dim = 100;
  int max_k = 4;  // encoder weight sets when not shared
  bool share_encoder_params = true;
  Arch arch = Arch::kMultiEncoder;
  int beam_width = 1;
  int max_output_len = 64;
};

struct GruWeights {
  Parameter Wz, Uz, bz, Wr, Ur, br, Wh, Uh, bh;

  GruWeights() = default;
  GruWeights(const std::string& prefix, int in_dim, int hid);
  void collect(std::vector<Parameter*>& out);
};

struct ModelParams {
  ModelConfig config;
  Parameter embed;                 // |V| x embed_dim
  std::vector<GruWeights> enc_fwd; // one set when shared, else max_k
  std::vector<GruWeights> enc_bwd;
  GruWeights dec;                  // input: embed_dim + 2*hidden_dim
  Parameter Wa, Ua, va;            // score = va^T tanh(Wa s_prev + Ua h_mi)
  Parameter Winit, binit;          // s0 = tanh(Winit * mean(bwd state) + binit)
  Parameter Wout, bout;            // logits over |V|

  // Stable parameter list; assigns each Parameter's index.
  std::vector<Parameter*> all();
  const GruWeights& encoder_fwd(int m) const;
  const GruWeights& encoder_bwd(int m) const;
  GruWeights& encoder_fwd(int m);
  GruWeights& encoder_bwd(int m);
};

// Identity initialization: square weight matrices become I, rectangular ones
// get 1s on the top-left diagonal block, biases stay zero. Deterministic.
ModelParams init_params(const ModelConfig& config, const SymbolVocab& vocab);
// Gaussian refill (scale 0.25) from per-parameter derived streams; for tests
// and randomized oracles.
void randomize_params(ModelParams& params, std::uint64_t seed, double scale = 0.25);

// Integer encoding of one instance, ready for the tape. Multi-encoder: one id
// sequence per source. Concat variant: a single sequence.
struct EncodedInstance {
  std::vector<std::vector<int>> sources;
  std::vector<int> target;  // empty when the instance has no target form
};
EncodedInstance encode_instance(const Instance& ins, const SymbolVocab& vocab,
                                const ModelConfig& config);
// All k encode_source sequences back to back, each keeping its delimiters.
std::vector<int> concat_sources(const Instance& ins, const SymbolVocab& vocab);

// h = (1-z) . h_prev + z . h~   (standard GRU)
Tape::Var gru_step(Tape& t, GruWeights& w, Tape::Var x, Tape::Var h_prev);

struct SourceEncoding {
  std::vector<Tape::Var> states;     // h_mi = [fwd_i ; bwd_i], dim 2*hidden
  std::vector<std::uint8_t> mask;    // 1 = padded position, excluded everywhere
  Tape::Var bwd_first = -1;          // backward state at position 1 (for s0)
};
// Bidirectional encoding of one source; mask may be empty (= nothing padded).
SourceEncoding encode(Tape& t, std::span<const int> ids, std::span<const std::uint8_t> mask,
                      int encoder_index, ModelParams& params);

// Per-instance attention precomputation: Ua * h_mi once per position.
struct AttnPrecomp {
  std::vector<Tape::Var> states;          // flattened over sources, in order
  std::vector<Tape::Var> proj;            // Ua * h
  std::vector<std::uint8_t> mask;
  std::vector<std::pair<int, int>> origin;  // (source m, position i)
  Tape::Var va_vec = -1;
};
AttnPrecomp precompute_attention(Tape& t, std::span<const SourceEncoding> encoded,
                                 ModelParams& params);

struct AttendResult {
  Tape::Var context;  // c_t, dim 2*hidden
  Vec alpha;          // over all positions incl. masked (exact 0 there)
};
// One softmax jointly over every unmasked position of every source.
AttendResult attend(Tape& t, Tape::Var s_prev, const AttnPrecomp& pre, ModelParams& params);

Tape::Var initial_state(Tape& t, std::span<const SourceEncoding> encoded, ModelParams& params);

struct StepResult {
  Tape::Var state;
  Tape::Var logits;
  Vec alpha;
};
StepResult decode_step(Tape& t, int y_prev, Tape::Var s_prev, const AttnPrecomp& pre,
                       ModelParams& params);

struct ForwardResult {
  Tape::Var loss = -1;  // sum of per-step cross entropies
  double logprob = 0.0;
  Tensor alpha;  // rows = decoder steps, cols = all source positions
};
// Teacher-forced log p(target | sources). Requires a target.
ForwardResult forward_logprob(Tape& t, const EncodedInstance& enc, ModelParams& params);

struct Prediction {
  std::u32string form;
  std::vector<int> output_ids;  // characters only, no controls
  double logprob = 0.0;
  Tensor alpha;  // one row per decode step of the returned hypothesis
  bool empty_warning = false;
};
// Beam search restricted to language characters plus the end symbol. Beam 1 is
// greedy. Hypotheses at max_output_len are closed with the end symbol. Ties
// break toward the lexicographically smaller id sequence.
Prediction predict(const EncodedInstance& enc, ModelParams& params, const SymbolVocab& vocab);

// --- checkpointing (bit-exact round trip) ---
struct Checkpoint {
  ModelParams params;
  SymbolVocab vocab;
};
void save_checkpoint(const std::string& path, ModelParams& params, const SymbolVocab& vocab);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace msri
