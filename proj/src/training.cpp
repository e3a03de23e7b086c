#include "msri/training.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <thread>

#include "msri/error.hpp"
#include "msri/rng.hpp"
#include "msri/unicode.hpp"

static_assert(std::endian::native == std::endian::little,
              "optimizer state format assumes a little-endian host");

namespace msri {

void adadelta_update(Tensor& param, const Tensor& grad, Tensor& eg2, Tensor& edx2, double rho,
                     double eps) {
  if (param.rows() != grad.rows() || param.cols() != grad.cols() ||
      param.rows() != eg2.rows() || param.cols() != eg2.cols() ||
      param.rows() != edx2.rows() || param.cols() != edx2.cols())
    throw ShapeMismatch("adadelta_update");
  eg2 = rho * eg2 + (1.0 - rho) * grad.cwiseProduct(grad);
  const Tensor dx =
      -((edx2.array() + eps).sqrt() / (eg2.array() + eps).sqrt() * grad.array()).matrix();
  edx2 = rho * edx2 + (1.0 - rho) * dx.cwiseProduct(dx);
  param += dx;
}

AdadeltaState::AdadeltaState(const std::vector<Parameter*>& params, double rho, double eps)
    : rho_(rho), eps_(eps) {
  for (const Parameter* p : params) {
    names_.push_back(p->name);
    eg2_.emplace_back(Tensor::Zero(p->value.rows(), p->value.cols()));
    edx2_.emplace_back(Tensor::Zero(p->value.rows(), p->value.cols()));
  }
}

void AdadeltaState::update(const std::vector<Parameter*>& params) {
  if (params.size() != eg2_.size()) throw ShapeMismatch("optimizer state vs parameter list");
  for (std::size_t i = 0; i < params.size(); ++i)
    adadelta_update(params[i]->value, params[i]->grad, eg2_[i], edx2_[i], rho_, eps_);
}

void AdadeltaState::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write("MSRIOPT1", 8);
  auto put = [&](const void* p, std::size_t n) {
    out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n));
  };
  put(&rho_, sizeof(rho_));
  put(&eps_, sizeof(eps_));
  const std::uint64_t count = eg2_.size();
  put(&count, sizeof(count));
  for (std::size_t i = 0; i < eg2_.size(); ++i) {
    const std::uint64_t len = names_[i].size();
    put(&len, sizeof(len));
    put(names_[i].data(), names_[i].size());
    const std::uint64_t rows = static_cast<std::uint64_t>(eg2_[i].rows());
    const std::uint64_t cols = static_cast<std::uint64_t>(eg2_[i].cols());
    put(&rows, sizeof(rows));
    put(&cols, sizeof(cols));
    put(eg2_[i].data(), sizeof(double) * static_cast<std::size_t>(eg2_[i].size()));
    put(edx2_[i].data(), sizeof(double) * static_cast<std::size_t>(edx2_[i].size()));
  }
  if (!out) throw IoError("write failed: " + path);
}

AdadeltaState AdadeltaState::load(const std::string& path,
                                  const std::vector<Parameter*>& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  auto get = [&](void* p, std::size_t n) {
    in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in) throw IoError("truncated optimizer state");
  };
  char magic[8];
  get(magic, 8);
  if (std::memcmp(magic, "MSRIOPT1", 8) != 0) throw IoError("not an optimizer state: " + path);

  AdadeltaState st;
  get(&st.rho_, sizeof(st.rho_));
  get(&st.eps_, sizeof(st.eps_));
  std::uint64_t count = 0;
  get(&count, sizeof(count));
  if (count != params.size()) throw IoError("optimizer state parameter count mismatch");
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t len = 0;
    get(&len, sizeof(len));
    std::string name(len, '\0');
    get(name.data(), len);
    std::uint64_t rows = 0, cols = 0;
    get(&rows, sizeof(rows));
    get(&cols, sizeof(cols));
    const Parameter* p = params[i];
    if (name != p->name || rows != static_cast<std::uint64_t>(p->value.rows()) ||
        cols != static_cast<std::uint64_t>(p->value.cols()))
      throw IoError("optimizer state mismatch at " + name);
    st.names_.push_back(name);
    Tensor a(p->value.rows(), p->value.cols()), b(p->value.rows(), p->value.cols());
    get(a.data(), sizeof(double) * static_cast<std::size_t>(a.size()));
    get(b.data(), sizeof(double) * static_cast<std::size_t>(b.size()));
    st.eg2_.push_back(std::move(a));
    st.edx2_.push_back(std::move(b));
  }
  return st;
}

void save_history(const std::string& path, const TrainHistory& history) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "epoch\ttrain_loss\tdev_acc\tseconds\n";
  char buf[160];
  for (const EpochRecord& r : history.records) {
    std::snprintf(buf, sizeof(buf), "%d\t%.17g\t%.6f\t%.3f\n", r.epoch, r.train_loss, r.dev_acc,
                  r.seconds);
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path);
}

namespace {

std::u32string nfc32(const std::u32string& s) {
  auto v = uni::nfc(std::vector<char32_t>(s.begin(), s.end()));
  return std::u32string(v.begin(), v.end());
}

}  // namespace

TrainResult train(std::span<const Instance> train_set, std::span<const Instance> dev_set,
                  const ModelConfig& mcfg, const TrainConfig& tcfg) {
  if (train_set.empty()) throw EmptySplit("train");
  if (dev_set.empty()) throw EmptySplit("dev");
  if (tcfg.batch_size < 1 || tcfg.max_epochs < 1 || tcfg.patience < 0 || tcfg.threads < 1)
    throw SpecError("train config values must be positive");
  if (tcfg.patience > tcfg.max_epochs) throw SpecError("patience exceeds max_epochs");

  const SymbolVocab vocab = build_vocab(train_set);
  ModelParams params = init_params(mcfg, vocab);
  std::vector<Parameter*> plist = params.all();
  AdadeltaState opt(plist, tcfg.rho, tcfg.eps);

  std::vector<EncodedInstance> train_enc;
  train_enc.reserve(train_set.size());
  for (const Instance& ins : train_set) {
    if (!ins.target_form) throw InstanceMismatch("training instance without target form");
    train_enc.push_back(encode_instance(ins, vocab, mcfg));
  }
  std::vector<EncodedInstance> dev_enc;
  std::vector<std::u32string> dev_gold;
  for (const Instance& ins : dev_set) {
    if (!ins.target_form) throw InstanceMismatch("dev instance without target form");
    Instance probe = ins;  // dev targets are scored, never fed to the model
    probe.target_form.reset();
    dev_enc.push_back(encode_instance(probe, vocab, mcfg));
    dev_gold.push_back(nfc32(*ins.target_form));
  }

  const std::size_t n = train_enc.size();
  std::vector<std::size_t> order(n);
  const std::size_t bs = static_cast<std::size_t>(tcfg.batch_size);
  std::vector<GradBuffers> bufs;
  for (std::size_t i = 0; i < std::min(bs, n); ++i) bufs.emplace_back(plist);

  TrainResult result{params, vocab, {}};  // placeholder best; always overwritten at epoch 1
  double best_acc = -1.0;
  int since_improvement = 0;

  for (int epoch = 1; epoch <= tcfg.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();

    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    SplitMix64 rng(derive_stream(tcfg.seed, static_cast<std::uint64_t>(epoch)));
    shuffle(order, rng);

    double epoch_loss = 0.0;
    std::vector<double> losses(std::min(bs, n), 0.0);
    for (std::size_t at = 0; at < n; at += bs) {
      const std::size_t batch = std::min(bs, n - at);
      const double inv_b = 1.0 / static_cast<double>(batch);

      auto run_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t j = lo; j < hi; ++j) {
          Tape tape;
          bufs[j].zero();
          auto fr = forward_logprob(tape, train_enc[order[at + j]], params);
          tape.backward(fr.loss, bufs[j], inv_b);
          losses[j] = tape.value(fr.loss)(0);
        }
      };

      if (tcfg.threads == 1 || batch == 1) {
        run_range(0, batch);
      } else {
        const std::size_t workers =
            std::min<std::size_t>(static_cast<std::size_t>(tcfg.threads), batch);
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
          pool.emplace_back(run_range, batch * w / workers, batch * (w + 1) / workers);
        for (std::thread& th : pool) th.join();
      }

      // Both reductions run in within-batch index order so that the thread
      // count never changes a single bit of the result.
      zero_grads(plist);
      for (std::size_t j = 0; j < batch; ++j) {
        epoch_loss += losses[j];
        bufs[j].add_to(plist);
      }
      opt.update(plist);
    }

    std::size_t correct = 0;
    for (std::size_t i = 0; i < dev_enc.size(); ++i) {
      Prediction pr = predict(dev_enc[i], params, vocab);
      if (nfc32(pr.form) == dev_gold[i]) ++correct;
    }
    const double acc = static_cast<double>(correct) / static_cast<double>(dev_enc.size());

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.history.records.push_back(
        EpochRecord{epoch, epoch_loss / static_cast<double>(n), acc, secs});

    if (acc > best_acc) {
      best_acc = acc;
      result.best = params;  // deep copy of the current weights
      result.history.best_epoch = epoch;
      since_improvement = 0;
    } else {
      ++since_improvement;
    }
    if (tcfg.early_stopping && since_improvement >= tcfg.patience) break;
  }
  return result;
}

}  // namespace msri
