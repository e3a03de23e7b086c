#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "msri/dataset.hpp"
#include "msri/error.hpp"
#include "msri/evaluation.hpp"

using namespace msri;

namespace {

std::filesystem::path tmp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("msri_eval_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

}  // namespace

TEST_CASE("accuracy is exact match after NFC") {
  std::vector<std::string> golds = {"x", "z"};
  std::vector<std::string> same = {"x", "z"};
  CHECK(accuracy(same, golds).accuracy() == 1.0);

  std::vector<std::string> half = {"x", "y"};
  EvalReport r = accuracy(half, golds);
  CHECK(r.accuracy() == 0.5);
  CHECK(r.n_total() == 2);
  CHECK(r.n_correct() == 1);
  CHECK(r.verdicts[0].correct);
  CHECK_FALSE(r.verdicts[1].correct);
  CHECK(r.verdicts[1].id == "1");

  // Diacritics matter: trafe vs träfe differ.
  std::vector<std::string> plain = {"trafe"};
  std::vector<std::string> uml = {"träfe"};
  CHECK(accuracy(plain, uml).accuracy() == 0.0);

  // ...but the two encodings of the same umlaut do not.
  std::vector<std::string> composed = {"träfe"};
  std::vector<std::string> decomposed = {"träfe"};
  CHECK(accuracy(composed, decomposed).accuracy() == 1.0);

  std::vector<std::string> one = {"x"};
  CHECK_THROWS_AS(accuracy(one, golds), LengthMismatch);
  std::vector<std::string> none;
  CHECK_THROWS_AS(accuracy(none, none), LengthMismatch);
}

TEST_CASE("accuracy is invariant under joint permutation") {
  std::vector<std::string> preds = {"a", "b", "c", "d"};
  std::vector<std::string> golds = {"a", "x", "c", "y"};
  const double base = accuracy(preds, golds).accuracy();
  std::vector<std::size_t> perm = {2, 0, 3, 1};
  std::vector<std::string> p2, g2;
  for (std::size_t i : perm) {
    p2.push_back(preds[i]);
    g2.push_back(golds[i]);
  }
  CHECK(accuracy(p2, g2).accuracy() == base);
}

TEST_CASE("eval report file round trip") {
  std::vector<std::string> preds = {"gehe", "lief", "sah"};
  std::vector<std::string> golds = {"gehe", "laufe", "sah"};
  EvalReport r = accuracy(preds, golds);
  auto p = tmp_path("report.tsv");
  save_eval_report(p.string(), r);

  const std::string text = slurp(p);
  CHECK(text ==
        "0\tgehe\tgehe\t1\n"
        "1\tlief\tlaufe\t0\n"
        "2\tsah\tsah\t1\n"
        "# accuracy=0.6667\n");

  EvalReport back = load_eval_report(p.string());
  REQUIRE(back.verdicts.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.verdicts[i].id == r.verdicts[i].id);
    CHECK(back.verdicts[i].prediction == r.verdicts[i].prediction);
    CHECK(back.verdicts[i].gold == r.verdicts[i].gold);
    CHECK(back.verdicts[i].correct == r.verdicts[i].correct);
  }
  std::filesystem::remove(p);
}

TEST_CASE("diff_predictions classifies corrected and broken") {
  std::vector<std::string> golds = {"a", "b", "c", "d"};
  std::vector<std::string> first = {"a", "x", "c", "x"};   // wrong on 1, 3
  std::vector<std::string> second = {"x", "b", "c", "x"};  // wrong on 0, 3
  EvalReport ra = accuracy(first, golds);
  EvalReport rb = accuracy(second, golds);

  auto [corrected, broken] = diff_predictions(ra, rb);
  CHECK(corrected == std::vector<std::string>{"1"});
  CHECK(broken == std::vector<std::string>{"0"});

  // corrected(a, b) = broken(b, a); diff with itself is empty.
  auto [c2, b2] = diff_predictions(rb, ra);
  CHECK(c2 == broken);
  CHECK(b2 == corrected);
  auto [cs, bs] = diff_predictions(ra, ra);
  CHECK(cs.empty());
  CHECK(bs.empty());

  // all-wrong vs all-right corrects everything.
  std::vector<std::string> wrong = {"q", "q", "q", "q"};
  auto [call, bnone] = diff_predictions(accuracy(wrong, golds), accuracy(golds, golds));
  CHECK(call == std::vector<std::string>{"0", "1", "2", "3"});
  CHECK(bnone.empty());

  EvalReport shorter = ra;
  shorter.verdicts.pop_back();
  CHECK_THROWS_AS(diff_predictions(ra, shorter), InstanceMismatch);
  EvalReport renamed = rb;
  renamed.verdicts[2].id = "zz";
  CHECK_THROWS_AS(diff_predictions(ra, renamed), InstanceMismatch);
}

TEST_CASE("heatmap CSV rows keep the attention weights and grouped labels") {
  Tensor alpha(2, 5);
  alpha << 0.5, 0.5, 0.0, 0.0, 0.0, 0.1, 0.2, 0.3, 0.2, 0.2;
  std::vector<std::string> in_labels = {"<s>", "w", "</s>", "<s>", "o"};
  std::vector<int> groups = {0, 0, 0, 1, 1};
  std::vector<std::string> out_labels = {"g", "</s>"};

  auto csv_p = tmp_path("heat.csv");
  auto svg_p = tmp_path("heat.svg");
  export_heatmap(alpha, in_labels, groups, out_labels, csv_p.string(), svg_p.string());

  std::ifstream csv(csv_p);
  std::string header;
  REQUIRE(std::getline(csv, header));
  CHECK(header == "output,src1/<s>,src1/w,src1/</s>,src2/<s>,src2/o");
  std::string row;
  int nrows = 0;
  while (std::getline(csv, row)) {
    ++nrows;
    std::stringstream ss(row);
    std::string cell;
    std::getline(ss, cell, ',');  // row label
    double sum = 0.0;
    while (std::getline(ss, cell, ',')) sum += std::stod(cell);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(nrows == 2);

  const std::string svg = slurp(svg_p);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("rgb(0,0,0)") == std::string::npos);     // no weight is exactly 1
  CHECK(svg.find("rgb(128,128,128)") != std::string::npos);  // the 0.5 cells
  CHECK(svg.find("&lt;s&gt;") != std::string::npos);      // escaped labels

  std::filesystem::remove(csv_p);
  std::filesystem::remove(svg_p);
}

TEST_CASE("single-cell heatmap is the value one") {
  Tensor alpha(1, 1);
  alpha << 1.0;
  auto csv_p = tmp_path("heat1.csv");
  auto svg_p = tmp_path("heat1.svg");
  export_heatmap(alpha, {"<s>"}, {0}, {"</s>"}, csv_p.string(), svg_p.string());
  const std::string text = slurp(csv_p);
  CHECK(text ==
        "output,src1/<s>\n"
        "</s>,1.000000000000\n");
  std::filesystem::remove(csv_p);
  std::filesystem::remove(svg_p);

  Tensor bad(1, 2);
  bad << 0.5, 0.5;
  CHECK_THROWS_AS(export_heatmap(bad, {"<s>"}, {0}, {"</s>"}, csv_p.string(), svg_p.string()),
                  ShapeMismatch);
}

TEST_CASE("heatmap labels group encoded positions per source") {
  Instance ins;
  ins.sources.push_back({U"ab", MorphTag{{"V", "PST"}}});
  ins.sources.push_back({U"ba", MorphTag{{"V", "PRS"}}});
  ins.target_tag = MorphTag{{"V", "FUT"}};
  SymbolVocab vocab = build_vocab(std::vector<Instance>{ins});
  ModelConfig cfg;
  cfg.max_k = 2;
  EncodedInstance enc = encode_instance(ins, vocab, cfg);

  HeatmapLabels labels = heatmap_labels(enc, vocab);
  std::size_t total = 0;
  for (const auto& s : enc.sources) total += s.size();
  REQUIRE(labels.labels.size() == total);
  REQUIRE(labels.groups.size() == total);
  // [<s> V PST a b V FUT </s>] then the second source.
  CHECK(labels.labels[0] == "<s>");
  CHECK(labels.labels[1] == "V");
  CHECK(labels.labels[2] == "PST");
  CHECK(labels.labels[3] == "a");
  CHECK(labels.labels[4] == "b");
  CHECK(labels.labels[5] == "V");
  CHECK(labels.labels[6] == "FUT");
  CHECK(labels.labels[7] == "</s>");
  CHECK(labels.groups[0] == 0);
  CHECK(labels.groups[7] == 0);
  CHECK(labels.groups[8] == 1);
  CHECK(labels.groups.back() == 1);
}

TEST_CASE("learning curve trains one point per halving level") {
  // A deliberately easy task so even quarter-size subsets move: identity
  // mapping with a tiny model. What we assert is the protocol, not skill.
  SyntheticSpec spec;
  spec.classes = 1;
  spec.slots = 5;
  spec.vowels = {U"e"};
  spec.lemma_count = 20;
  spec.dev_lemmas = 2;
  spec.test_lemmas = 2;
  auto lang = generate_synthetic_language(spec, 13);
  auto train_set = synthesize_instances(lang, lang.train_lemmas, 1, 13);
  auto dev_set = synthesize_instances(lang, lang.dev_lemmas, 1, 13);
  auto test_set = synthesize_instances(lang, lang.test_lemmas, 1, 13);

  ModelConfig mcfg;
  mcfg.embed_dim = 4;
  mcfg.hidden_dim = 3;
  mcfg.max_k = 2;
  mcfg.max_output_len = 10;
  TrainConfig tcfg;
  tcfg.batch_size = 8;
  tcfg.max_epochs = 2;  // protocol test only
  tcfg.patience = 2;
  tcfg.seed = 4;

  CurveReport curve = learning_curve(train_set, dev_set, test_set, 2, mcfg, tcfg);
  REQUIRE(curve.points.size() == 3);
  CHECK(curve.points[0].train_size == 32);
  CHECK(curve.points[1].train_size == 16);
  CHECK(curve.points[2].train_size == 8);
  for (std::size_t i = 1; i < curve.points.size(); ++i)
    CHECK(curve.points[i].train_size < curve.points[i - 1].train_size);
  for (const CurvePoint& p : curve.points) {
    CHECK(p.accuracy >= 0.0);
    CHECK(p.accuracy <= 1.0);
  }

  CurveReport single = learning_curve(train_set, dev_set, test_set, 0, mcfg, tcfg);
  CHECK(single.points.size() == 1);
  CHECK(single.points[0].train_size == 32);

  auto p = tmp_path("curve.tsv");
  save_curve(p.string(), curve);
  std::string text = slurp(p);
  CHECK(text.substr(0, 3) == "32\t");
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  std::filesystem::remove(p);
}
