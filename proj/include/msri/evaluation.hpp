// Exact-match scoring, prediction diffing, learning curves over nested
// training subsets, and attention heatmap export (CSV + SVG).
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "msri/training.hpp"

namespace msri {

struct Verdict {
  std::string id;
  std::string prediction;  // as produced, before normalization
  std::string gold;
  bool correct = false;
};

struct EvalReport {
  std::vector<Verdict> verdicts;

  std::size_t n_total() const { return verdicts.size(); }
  std::size_t n_correct() const;
  double accuracy() const;  // n_correct / n_total exactly
};

// Codepoint-exact comparison after NFC normalization of both sides. Verdict
// ids are the 0-based positions.
EvalReport accuracy(std::span<const std::string> predictions, std::span<const std::string> golds);
EvalReport accuracy(std::span<const std::string> ids, std::span<const std::string> predictions,
                    std::span<const std::string> golds);

// TSV: id <TAB> prediction <TAB> gold <TAB> correct{0,1} per verdict, then a
// trailing `# accuracy=<4 decimals>` line.
void save_eval_report(const std::string& path, const EvalReport& report);
EvalReport load_eval_report(const std::string& path);

// Ids wrong in `a` but right in `b` (corrected) and the converse (broken).
// Both reports must cover the same instance ids in the same order.
std::pair<std::vector<std::string>, std::vector<std::string>> diff_predictions(
    const EvalReport& a, const EvalReport& b);

struct CurvePoint {
  std::size_t train_size = 0;
  double accuracy = 0.0;
};

struct CurveReport {
  std::vector<CurvePoint> points;  // sizes strictly decreasing
};

// Trains one model per nested halving of the train set (early stopping
// disabled, fixed cfg.max_epochs budget, per-subset seeds derived from
// tcfg.seed) and scores each on the same test set.
CurveReport learning_curve(std::span<const Instance> train, std::span<const Instance> dev,
                           std::span<const Instance> test, int levels, const ModelConfig& mcfg,
                           const TrainConfig& tcfg);

// TSV: train_size <TAB> accuracy, largest subset first.
void save_curve(const std::string& path, const CurveReport& report);

// Column labels for an encoded instance, one per source position, plus the
// source index each column belongs to.
struct HeatmapLabels {
  std::vector<std::string> labels;
  std::vector<int> groups;
};
HeatmapLabels heatmap_labels(const EncodedInstance& enc, const SymbolVocab& vocab);
// One label per attention row of a prediction: the emitted symbols plus the
// closing end marker.
std::vector<std::string> heatmap_output_labels(const Prediction& pred, const SymbolVocab& vocab);

// Writes the attention matrix as (a) CSV with labeled, per-source-grouped
// columns and (b) a standalone SVG where darker cells mean larger weight.
// alpha rows pair with output_labels, columns with input labels/groups.
void export_heatmap(const Tensor& alpha, const std::vector<std::string>& input_labels,
                    const std::vector<int>& input_groups,
                    const std::vector<std::string>& output_labels, const std::string& csv_path,
                    const std::string& svg_path);

}  // namespace msri
