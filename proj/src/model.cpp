#include "msri/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "msri/error.hpp"
#include "msri/rng.hpp"

namespace msri {

namespace {

void set_identity(Parameter& p) {
  p.value.setZero();
  const Eigen::Index n = std::min(p.rows(), p.cols());
  for (Eigen::Index i = 0; i < n; ++i) p.value(i, i) = 1.0;
}

Vec log_softmax(const Vec& z) {
  const double m = z.maxCoeff();
  const double lse = m + std::log((z.array() - m).exp().sum());
  return (z.array() - lse).matrix();
}

}  // namespace

GruWeights::GruWeights(const std::string& prefix, int in_dim, int hid)
    : Wz(prefix + ".Wz", hid, in_dim),
      Uz(prefix + ".Uz", hid, hid),
      bz(prefix + ".bz", hid, 1),
      Wr(prefix + ".Wr", hid, in_dim),
      Ur(prefix + ".Ur", hid, hid),
      br(prefix + ".br", hid, 1),
      Wh(prefix + ".Wh", hid, in_dim),
      Uh(prefix + ".Uh", hid, hid),
      bh(prefix + ".bh", hid, 1) {}

void GruWeights::collect(std::vector<Parameter*>& out) {
  for (Parameter* p : {&Wz, &Uz, &bz, &Wr, &Ur, &br, &Wh, &Uh, &bh}) out.push_back(p);
}

std::vector<Parameter*> ModelParams::all() {
  std::vector<Parameter*> ps;
  ps.push_back(&embed);
  for (std::size_t m = 0; m < enc_fwd.size(); ++m) {
    enc_fwd[m].collect(ps);
    enc_bwd[m].collect(ps);
  }
  dec.collect(ps);
  for (Parameter* p : {&Wa, &Ua, &va, &Winit, &binit, &Wout, &bout}) ps.push_back(p);
  for (std::size_t i = 0; i < ps.size(); ++i) ps[i]->index = static_cast<int>(i);
  return ps;
}

const GruWeights& ModelParams::encoder_fwd(int m) const {
  const int i = config.share_encoder_params ? 0 : m;
  if (i < 0 || i >= static_cast<int>(enc_fwd.size()))
    throw IndexOutOfRange("encoder " + std::to_string(m) + " with max_k " +
                          std::to_string(config.max_k));
  return enc_fwd[static_cast<std::size_t>(i)];
}
const GruWeights& ModelParams::encoder_bwd(int m) const {
  const int i = config.share_encoder_params ? 0 : m;
  if (i < 0 || i >= static_cast<int>(enc_bwd.size()))
    throw IndexOutOfRange("encoder " + std::to_string(m) + " with max_k " +
                          std::to_string(config.max_k));
  return enc_bwd[static_cast<std::size_t>(i)];
}
GruWeights& ModelParams::encoder_fwd(int m) {
  return const_cast<GruWeights&>(std::as_const(*this).encoder_fwd(m));
}
GruWeights& ModelParams::encoder_bwd(int m) {
  return const_cast<GruWeights&>(std::as_const(*this).encoder_bwd(m));
}

ModelParams init_params(const ModelConfig& config, const SymbolVocab& vocab) {
  if (config.embed_dim <= 0 || config.hidden_dim <= 0 || config.max_k <= 0 ||
      config.beam_width < 1 || config.max_output_len < 1)
    throw ShapeMismatch("model config dimensions must be positive");
  const int V = vocab.size();
  const int e = config.embed_dim;
  const int h = config.hidden_dim;

  ModelParams p;
  p.config = config;
  p.embed = Parameter("embed", V, e);
  const int n_enc = config.share_encoder_params ? 1 : config.max_k;
  for (int m = 0; m < n_enc; ++m) {
    const std::string prefix = "enc" + std::to_string(m);
    p.enc_fwd.emplace_back(prefix + ".fwd", e, h);
    p.enc_bwd.emplace_back(prefix + ".bwd", e, h);
  }
  p.dec = GruWeights("dec", e + 2 * h, h);
  p.Wa = Parameter("attn.Wa", h, h);
  p.Ua = Parameter("attn.Ua", h, 2 * h);
  p.va = Parameter("attn.va", h, 1);
  p.Winit = Parameter("init.W", h, h);
  p.binit = Parameter("init.b", h, 1);
  p.Wout = Parameter("out.W", V, h + 2 * h + e);
  p.bout = Parameter("out.b", V, 1);

  for (Parameter* q : p.all()) {
    if (q->cols() == 1 && q->name != "attn.va") continue;  // biases stay zero
    set_identity(*q);
  }
  set_identity(p.va);  // rectangular-identity reading: first unit vector
  return p;
}

void randomize_params(ModelParams& params, std::uint64_t seed, double scale) {
  std::vector<Parameter*> ps = params.all();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    SplitMix64 r(derive_stream(seed, i));
    double* d = ps[i]->value.data();
    for (Eigen::Index j = 0; j < ps[i]->value.size(); ++j) d[j] = scale * r.next_gaussian();
  }
}

std::vector<int> concat_sources(const Instance& ins, const SymbolVocab& vocab) {
  std::vector<int> out;
  for (const SourcePair& s : ins.sources) {
    std::vector<int> part = encode_source(s, ins.target_tag, vocab);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

EncodedInstance encode_instance(const Instance& ins, const SymbolVocab& vocab,
                                const ModelConfig& config) {
  if (ins.sources.empty()) throw ShapeMismatch("instance without sources");
  EncodedInstance enc;
  if (config.arch == Arch::kConcatSingleEncoder) {
    enc.sources.push_back(concat_sources(ins, vocab));
  } else {
    for (const SourcePair& s : ins.sources)
      enc.sources.push_back(encode_source(s, ins.target_tag, vocab));
  }
  if (ins.target_form) enc.target = encode_target(*ins.target_form, vocab);
  return enc;
}

Tape::Var gru_step(Tape& t, GruWeights& w, Tape::Var x, Tape::Var h_prev) {
  auto z = t.sigmoid(t.affine2(w.Wz, x, w.Uz, h_prev, w.bz));
  auto r = t.sigmoid(t.affine2(w.Wr, x, w.Ur, h_prev, w.br));
  auto rh = t.mul(r, h_prev);
  auto hb = t.tanh(t.affine2(w.Wh, x, w.Uh, rh, w.bh));
  return t.add(t.mul(t.one_minus(z), h_prev), t.mul(z, hb));
}

SourceEncoding encode(Tape& t, std::span<const int> ids, std::span<const std::uint8_t> mask,
                      int encoder_index, ModelParams& params) {
  if (ids.empty()) throw ShapeMismatch("encode of empty sequence");
  if (!mask.empty() && mask.size() != ids.size())
    throw ShapeMismatch("mask length vs id sequence");
  GruWeights& fwd = params.encoder_fwd(encoder_index);
  GruWeights& bwd = params.encoder_bwd(encoder_index);
  const int h = params.config.hidden_dim;
  const std::size_t n = ids.size();

  std::vector<std::size_t> live;  // unmasked positions, in order
  for (std::size_t i = 0; i < n; ++i)
    if (mask.empty() || !mask[i]) live.push_back(i);

  std::vector<Tape::Var> embeds(n, -1);
  for (std::size_t i : live) embeds[i] = t.embedding_row(params.embed, ids[i]);

  // Masked positions hold a constant zero state: never attended, never read.
  const Tape::Var zero2h = t.input(Vec::Zero(2 * h));
  std::vector<Tape::Var> f(n, -1), b(n, -1);

  Tape::Var hf = t.input(Vec::Zero(h));
  for (std::size_t i : live) {
    hf = gru_step(t, fwd, embeds[i], hf);
    f[i] = hf;
  }
  Tape::Var hb = t.input(Vec::Zero(h));
  for (auto it = live.rbegin(); it != live.rend(); ++it) {
    hb = gru_step(t, bwd, embeds[*it], hb);
    b[*it] = hb;
  }

  SourceEncoding out;
  out.mask.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (f[i] < 0) {
      out.mask[i] = 1;
      out.states.push_back(zero2h);
    } else {
      std::array<Tape::Var, 2> parts = {f[i], b[i]};
      out.states.push_back(t.concat(parts));
    }
  }
  if (!live.empty()) out.bwd_first = b[live.front()];
  return out;
}

AttnPrecomp precompute_attention(Tape& t, std::span<const SourceEncoding> encoded,
                                 ModelParams& params) {
  AttnPrecomp pre;
  pre.va_vec = t.param_vector(params.va);
  for (std::size_t m = 0; m < encoded.size(); ++m) {
    const SourceEncoding& e = encoded[m];
    for (std::size_t i = 0; i < e.states.size(); ++i) {
      pre.states.push_back(e.states[i]);
      pre.mask.push_back(e.mask[i]);
      pre.origin.emplace_back(static_cast<int>(m), static_cast<int>(i));
      pre.proj.push_back(e.mask[i] ? -1 : t.matvec(params.Ua, e.states[i]));
    }
  }
  return pre;
}

AttendResult attend(Tape& t, Tape::Var s_prev, const AttnPrecomp& pre, ModelParams& params) {
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < pre.states.size(); ++i)
    if (!pre.mask[i]) live.push_back(i);
  if (live.empty()) throw AllMasked();

  const Tape::Var ws = t.matvec(params.Wa, s_prev);
  std::vector<Tape::Var> scores;
  scores.reserve(live.size());
  for (std::size_t i : live) scores.push_back(t.dot(pre.va_vec, t.tanh(t.add(ws, pre.proj[i]))));

  const Tape::Var alpha_var = t.softmax(t.stack_scalars(scores));
  std::vector<Tape::Var> vecs;
  vecs.reserve(live.size());
  for (std::size_t i : live) vecs.push_back(pre.states[i]);

  AttendResult out;
  out.context = t.weighted_sum(alpha_var, vecs);
  out.alpha = Vec::Zero(static_cast<Eigen::Index>(pre.states.size()));
  const Vec& a = t.value(alpha_var);
  for (std::size_t j = 0; j < live.size(); ++j)
    out.alpha[static_cast<Eigen::Index>(live[j])] = a[static_cast<Eigen::Index>(j)];
  return out;
}

Tape::Var initial_state(Tape& t, std::span<const SourceEncoding> encoded, ModelParams& params) {
  std::vector<Tape::Var> firsts;
  for (const SourceEncoding& e : encoded)
    if (e.bwd_first >= 0) firsts.push_back(e.bwd_first);
  if (firsts.empty()) throw AllMasked();
  const auto n = static_cast<Eigen::Index>(firsts.size());
  const Tape::Var weights = t.input(Vec::Constant(n, 1.0 / static_cast<double>(n)));
  const Tape::Var mean = t.weighted_sum(weights, firsts);
  return t.tanh(t.affine(params.Winit, mean, params.binit));
}

StepResult decode_step(Tape& t, int y_prev, Tape::Var s_prev, const AttnPrecomp& pre,
                       ModelParams& params) {
  const Tape::Var e = t.embedding_row(params.embed, y_prev);
  AttendResult att = attend(t, s_prev, pre, params);
  std::array<Tape::Var, 2> xin = {e, att.context};
  const Tape::Var x = t.concat(xin);
  const Tape::Var s = gru_step(t, params.dec, x, s_prev);
  std::array<Tape::Var, 3> oin = {s, att.context, e};
  const Tape::Var logits = t.affine(params.Wout, t.concat(oin), params.bout);
  return StepResult{s, logits, std::move(att.alpha)};
}

namespace {

struct Prepared {
  std::vector<SourceEncoding> encoded;
  AttnPrecomp pre;
  Tape::Var s0;
};

Prepared prepare(Tape& t, const EncodedInstance& enc, ModelParams& params) {
  if (enc.sources.empty()) throw ShapeMismatch("no encoded sources");
  Prepared p;
  for (std::size_t m = 0; m < enc.sources.size(); ++m)
    p.encoded.push_back(encode(t, enc.sources[m], {}, static_cast<int>(m), params));
  p.pre = precompute_attention(t, p.encoded, params);
  p.s0 = initial_state(t, p.encoded, params);
  return p;
}

}  // namespace

ForwardResult forward_logprob(Tape& t, const EncodedInstance& enc, ModelParams& params) {
  if (enc.target.size() < 2) throw ShapeMismatch("teacher forcing needs an encoded target");
  Prepared p = prepare(t, enc, params);

  const std::size_t steps = enc.target.size() - 1;
  ForwardResult out;
  out.alpha = Tensor::Zero(static_cast<Eigen::Index>(steps),
                           static_cast<Eigen::Index>(p.pre.states.size()));
  Tape::Var s = p.s0;
  Tape::Var loss = -1;
  for (std::size_t i = 0; i < steps; ++i) {
    StepResult sr = decode_step(t, enc.target[i], s, p.pre, params);
    out.alpha.row(static_cast<Eigen::Index>(i)) = sr.alpha.transpose();
    const Tape::Var ce = t.cross_entropy(sr.logits, enc.target[i + 1]);
    loss = (loss < 0) ? ce : t.add(loss, ce);
    s = sr.state;
  }
  out.loss = loss;
  out.logprob = -t.value(loss)(0);
  return out;
}

Prediction predict(const EncodedInstance& enc, ModelParams& params, const SymbolVocab& vocab) {
  Tape t;
  Prepared p = prepare(t, enc, params);

  std::vector<int> allowed;  // language characters only; S_end handled apart
  for (int id = SymbolVocab::kNumControls;
       id < SymbolVocab::kNumControls + static_cast<int>(vocab.chars().size()); ++id)
    allowed.push_back(id);

  struct Hyp {
    std::vector<int> chars;
    double score = 0.0;
    Tape::Var state = -1;
    int y_prev = SymbolVocab::kStart;
    std::vector<Vec> alphas;
    bool done = false;
  };
  auto better = [](const Hyp& a, const Hyp& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::lexicographical_compare(a.chars.begin(), a.chars.end(), b.chars.begin(),
                                        b.chars.end());
  };

  std::vector<Hyp> beam_set(1);
  beam_set[0].state = p.s0;

  const std::size_t beam = static_cast<std::size_t>(params.config.beam_width);
  const int max_len = params.config.max_output_len;

  // Finished hypotheses keep their beam slot unchanged; partials spawn a
  // closing candidate plus one extension per character (none past max_len).
  auto all_done = [&] {
    for (const Hyp& h : beam_set)
      if (!h.done) return false;
    return true;
  };
  while (!all_done()) {
    std::vector<Hyp> candidates;
    for (Hyp& hyp : beam_set) {
      if (hyp.done) {
        candidates.push_back(std::move(hyp));
        continue;
      }
      StepResult sr = decode_step(t, hyp.y_prev, hyp.state, p.pre, params);
      const Vec lp = log_softmax(t.value(sr.logits));

      Hyp closed = hyp;
      closed.score += lp[SymbolVocab::kEnd];
      closed.alphas.push_back(sr.alpha);
      closed.done = true;
      candidates.push_back(std::move(closed));

      if (static_cast<int>(hyp.chars.size()) < max_len) {
        for (int c : allowed) {
          Hyp ext = hyp;
          ext.chars.push_back(c);
          ext.score += lp[c];
          ext.state = sr.state;
          ext.y_prev = c;
          ext.alphas.push_back(sr.alpha);
          candidates.push_back(std::move(ext));
        }
      }
    }
    std::sort(candidates.begin(), candidates.end(), better);
    if (candidates.size() > beam) candidates.resize(beam);
    beam_set = std::move(candidates);
  }

  const Hyp& best = beam_set.front();  // sorted best-first

  Prediction out;
  out.output_ids = best.chars;
  out.form = decode_form(best.chars, vocab);
  out.logprob = best.score;
  out.empty_warning = best.chars.empty();
  out.alpha = Tensor::Zero(static_cast<Eigen::Index>(best.alphas.size()),
                           static_cast<Eigen::Index>(p.pre.states.size()));
  for (std::size_t i = 0; i < best.alphas.size(); ++i)
    out.alpha.row(static_cast<Eigen::Index>(i)) = best.alphas[i].transpose();
  return out;
}

}  // namespace msri
