#include "msri/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "msri/dataset.hpp"
#include "msri/error.hpp"
#include "msri/rng.hpp"
#include "msri/unicode.hpp"

namespace msri {

namespace {

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

}  // namespace

std::size_t EvalReport::n_correct() const {
  std::size_t n = 0;
  for (const Verdict& v : verdicts) n += v.correct ? 1 : 0;
  return n;
}

double EvalReport::accuracy() const {
  if (verdicts.empty()) return 0.0;
  return static_cast<double>(n_correct()) / static_cast<double>(n_total());
}

EvalReport accuracy(std::span<const std::string> ids, std::span<const std::string> predictions,
                    std::span<const std::string> golds) {
  if (predictions.size() != golds.size() || ids.size() != golds.size())
    throw LengthMismatch("predictions vs golds");
  if (predictions.empty()) throw LengthMismatch("nothing to score");
  EvalReport report;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    Verdict v;
    v.id = ids[i];
    v.prediction = predictions[i];
    v.gold = golds[i];
    v.correct = uni::nfc_utf8(predictions[i]) == uni::nfc_utf8(golds[i]);
    report.verdicts.push_back(std::move(v));
  }
  return report;
}

EvalReport accuracy(std::span<const std::string> predictions, std::span<const std::string> golds) {
  std::vector<std::string> ids;
  ids.reserve(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) ids.push_back(std::to_string(i));
  return accuracy(ids, predictions, golds);
}

void save_eval_report(const std::string& path, const EvalReport& report) {
  std::ofstream out = open_out(path);
  for (const Verdict& v : report.verdicts)
    out << v.id << '\t' << v.prediction << '\t' << v.gold << '\t' << (v.correct ? 1 : 0) << '\n';
  char buf[48];
  std::snprintf(buf, sizeof(buf), "# accuracy=%.4f\n", report.accuracy());
  out << buf;
  if (!out) throw IoError("write failed: " + path);
}

EvalReport load_eval_report(const std::string& path) {
  std::ifstream in = open_in(path);
  EvalReport report;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') continue;  // summary line
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        cols.push_back(line.substr(start));
        break;
      }
      cols.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (cols.size() != 4 || (cols[3] != "0" && cols[3] != "1"))
      throw ParseError(lineno, "expected id, prediction, gold, correct");
    report.verdicts.push_back({cols[0], cols[1], cols[2], cols[3] == "1"});
  }
  return report;
}

std::pair<std::vector<std::string>, std::vector<std::string>> diff_predictions(
    const EvalReport& a, const EvalReport& b) {
  if (a.verdicts.size() != b.verdicts.size())
    throw InstanceMismatch("reports cover different numbers of instances");
  std::vector<std::string> corrected, broken;
  for (std::size_t i = 0; i < a.verdicts.size(); ++i) {
    if (a.verdicts[i].id != b.verdicts[i].id)
      throw InstanceMismatch("reports cover different instances: " + a.verdicts[i].id + " vs " +
                             b.verdicts[i].id);
    if (!a.verdicts[i].correct && b.verdicts[i].correct) corrected.push_back(a.verdicts[i].id);
    if (a.verdicts[i].correct && !b.verdicts[i].correct) broken.push_back(a.verdicts[i].id);
  }
  return {corrected, broken};
}

CurveReport learning_curve(std::span<const Instance> train_set, std::span<const Instance> dev,
                           std::span<const Instance> test, int levels, const ModelConfig& mcfg,
                           const TrainConfig& tcfg) {
  if (test.empty()) throw EmptySplit("test");
  auto subsets = halve_training(train_set, levels, tcfg.seed);

  CurveReport report;
  for (std::size_t level = 0; level < subsets.size(); ++level) {
    TrainConfig sub = tcfg;
    sub.early_stopping = false;  // fixed epoch budget for every subset
    sub.seed = derive_stream(tcfg.seed, level);
    TrainResult run = train(subsets[level], dev, mcfg, sub);

    std::size_t correct = 0;
    for (const Instance& ins : test) {
      if (!ins.target_form) throw InstanceMismatch("test instance without target form");
      Prediction pr = predict(encode_instance(ins, run.vocab, mcfg), run.best, run.vocab);
      auto norm = [](const std::u32string& s) {
        return uni::nfc(std::vector<char32_t>(s.begin(), s.end()));
      };
      if (norm(pr.form) == norm(*ins.target_form)) ++correct;
    }
    report.points.push_back(
        {subsets[level].size(), static_cast<double>(correct) / static_cast<double>(test.size())});
  }
  return report;
}

void save_curve(const std::string& path, const CurveReport& report) {
  std::ofstream out = open_out(path);
  char buf[64];
  for (const CurvePoint& p : report.points) {
    std::snprintf(buf, sizeof(buf), "%zu\t%.6f\n", p.train_size, p.accuracy);
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path);
}

HeatmapLabels heatmap_labels(const EncodedInstance& enc, const SymbolVocab& vocab) {
  HeatmapLabels out;
  for (std::size_t m = 0; m < enc.sources.size(); ++m)
    for (int id : enc.sources[m]) {
      out.labels.push_back(vocab.symbol_name(id));
      out.groups.push_back(static_cast<int>(m));
    }
  return out;
}

std::vector<std::string> heatmap_output_labels(const Prediction& pred, const SymbolVocab& vocab) {
  std::vector<std::string> labels;
  for (int id : pred.output_ids) labels.push_back(vocab.symbol_name(id));
  labels.push_back(vocab.symbol_name(SymbolVocab::kEnd));
  return labels;
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void export_heatmap(const Tensor& alpha, const std::vector<std::string>& input_labels,
                    const std::vector<int>& input_groups,
                    const std::vector<std::string>& output_labels, const std::string& csv_path,
                    const std::string& svg_path) {
  const std::size_t rows = static_cast<std::size_t>(alpha.rows());
  const std::size_t cols = static_cast<std::size_t>(alpha.cols());
  if (input_labels.size() != cols || input_groups.size() != cols || output_labels.size() != rows)
    throw ShapeMismatch("attention labels vs matrix");

  {
    std::ofstream csv = open_out(csv_path);
    csv << "output";
    for (std::size_t c = 0; c < cols; ++c)
      csv << ',' << csv_quote("src" + std::to_string(input_groups[c] + 1) + "/" + input_labels[c]);
    csv << '\n';
    char buf[32];
    for (std::size_t r = 0; r < rows; ++r) {
      csv << csv_quote(output_labels[r]);
      for (std::size_t c = 0; c < cols; ++c) {
        std::snprintf(buf, sizeof(buf), "%.12f", alpha(static_cast<Eigen::Index>(r),
                                                       static_cast<Eigen::Index>(c)));
        csv << ',' << buf;
      }
      csv << '\n';
    }
    if (!csv) throw IoError("write failed: " + csv_path);
  }

  // Columns of the same source sit together; a small gap separates sources.
  const int cell = 22, left = 70, top = 64, gap = 8;
  const int ngroups = cols == 0 ? 0 : input_groups[cols - 1] + 1;
  const int width = left + static_cast<int>(cols) * cell + std::max(0, ngroups - 1) * gap + 10;
  const int height = top + static_cast<int>(rows) * cell + 10;
  auto col_x = [&](std::size_t c) {
    return left + static_cast<int>(c) * cell + input_groups[c] * gap;
  };

  std::ofstream svg = open_out(svg_path);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"monospace\" font-size=\"11\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  for (std::size_t c = 0; c < cols; ++c) {
    svg << "<text x=\"" << col_x(c) + cell / 2 << "\" y=\"" << top - 6
        << "\" text-anchor=\"start\" transform=\"rotate(-60 " << col_x(c) + cell / 2 << " "
        << top - 6 << ")\">" << xml_escape(input_labels[c]) << "</text>\n";
  }
  for (std::size_t r = 0; r < rows; ++r) {
    svg << "<text x=\"" << left - 6 << "\" y=\"" << top + static_cast<int>(r) * cell + cell - 7
        << "\" text-anchor=\"end\">" << xml_escape(output_labels[r]) << "</text>\n";
    for (std::size_t c = 0; c < cols; ++c) {
      const double a =
          std::min(1.0, std::max(0.0, alpha(static_cast<Eigen::Index>(r),
                                            static_cast<Eigen::Index>(c))));
      const int shade = static_cast<int>(255.0 * (1.0 - a) + 0.5);
      svg << "<rect x=\"" << col_x(c) << "\" y=\"" << top + static_cast<int>(r) * cell
          << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << shade << ","
          << shade << "," << shade << ")\" stroke=\"#ccc\"/>\n";
    }
  }
  svg << "</svg>\n";
  if (!svg) throw IoError("write failed: " + svg_path);
}

}  // namespace msri
