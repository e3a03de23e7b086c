// Training recipe: Adadelta over shuffled minibatches, early stopping on dev
// exact-match accuracy, best-epoch checkpoint selection.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "msri/model.hpp"

namespace msri {

struct TrainConfig {
  int batch_size = 20;
  int max_epochs = 90;
  int patience = 20;
  double rho = 0.95;
  double eps = 1e-6;
  std::uint64_t seed = 0;
  bool early_stopping = true;  // learning-curve runs disable this
  int threads = 1;
};

// One elementwise Adadelta step:
//   Eg2   <- rho Eg2 + (1-rho) g^2
//   dx    =  -sqrt(Edx2 + eps) / sqrt(Eg2 + eps) . g
//   Edx2  <- rho Edx2 + (1-rho) dx^2
//   param <- param + dx
void adadelta_update(Tensor& param, const Tensor& grad, Tensor& eg2, Tensor& edx2, double rho,
                     double eps);

class AdadeltaState {
public:
  AdadeltaState() = default;
  AdadeltaState(const std::vector<Parameter*>& params, double rho, double eps);

  // Applies each parameter's accumulated grad and advances the accumulators.
  void update(const std::vector<Parameter*>& params);

  double rho() const { return rho_; }
  double eps() const { return eps_; }
  const Tensor& eg2(std::size_t i) const { return eg2_[i]; }
  const Tensor& edx2(std::size_t i) const { return edx2_[i]; }

  void save(const std::string& path) const;
  // Accumulator shapes must match params; round-trips bit-exactly.
  static AdadeltaState load(const std::string& path, const std::vector<Parameter*>& params);

private:
  double rho_ = 0.95;
  double eps_ = 1e-6;
  std::vector<std::string> names_;
  std::vector<Tensor> eg2_, edx2_;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_acc = 0.0;
  double seconds = 0.0;  // wall time; excluded from determinism comparisons
};

struct TrainHistory {
  std::vector<EpochRecord> records;
  int best_epoch = -1;
};

// TSV: epoch <TAB> train_loss <TAB> dev_acc <TAB> seconds
void save_history(const std::string& path, const TrainHistory& history);

struct TrainResult {
  ModelParams best;
  SymbolVocab vocab;
  TrainHistory history;
};

// Vocab is built from the train split only. Loss is the sum over target
// symbols of a sequence, averaged over the sequences of the minibatch. Dev
// accuracy is exact match via predict with the configured beam. Improvement
// means strictly greater accuracy; ties do not reset patience. Per-example
// gradients reduce in instance-index order, so any thread count gives
// bit-identical results.
TrainResult train(std::span<const Instance> train_set, std::span<const Instance> dev_set,
                  const ModelConfig& mcfg, const TrainConfig& tcfg);

}  // namespace msri
