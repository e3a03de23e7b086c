// Command-line front end: data construction, training, prediction,
// evaluation, learning curves, attention heatmaps, and a gradient check.
// Exit codes: 0 success, 1 usage/config error, 2 I/O error, 3 gradcheck
// above threshold.
#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "msri/dataset.hpp"
#include "msri/error.hpp"
#include "msri/evaluation.hpp"
#include "msri/rng.hpp"
#include "msri/training.hpp"
#include "msri/unicode.hpp"

namespace fs = std::filesystem;
using namespace msri;

namespace {

constexpr double kGradThreshold = 1e-4;

struct Options {
  std::uint64_t seed = 0;
  int k_extra = 3;
  int k = 0;  // 0 keeps all sources
  std::string arch = "multi";
  bool share_params = true;
  int embed_dim = 300;
  int hidden_dim = 100;
  int batch_size = 20;
  int max_epochs = 90;
  int patience = 20;
  double rho = 0.95;
  double eps = 1e-6;
  int beam = 1;
  int max_output_len = 64;
  int levels = 3;
  int threads = 1;
  bool exclude_target_slot = true;
  std::string tag_schema = "delim";
  std::string tag_delim = ";";

  // file arguments
  std::string paradigms, bases, synthetic, train_file, dev_file, test_file, input, checkpoint,
      pred_file, gold_file, out, history, trace_dir, out_csv, out_svg, config_path;
  int index = 0;
};

void add_config_flag(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "flat `key = value` file; command line wins");
}

// Turns a flat `key = value` config file into --key=value tokens. Unknown keys
// then surface as unrecognized options from the regular argument parser.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> toks;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t");
      return s.substr(a, b - a + 1);
    };
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw SpecError(path + ":" + std::to_string(ln) + ": expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw SpecError(path + ":" + std::to_string(ln) + ": empty key");
    if (key == "config") throw SpecError(path + ": config files cannot nest");
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
      val = val.substr(1, val.size() - 2);
    toks.push_back("--" + key + "=" + val);
  }
  return toks;
}

// Splices config-file tokens in right after the subcommand name, before the
// user's own flags; with take-last options the command line therefore wins.
std::vector<std::string> splice_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args[0].empty() || args[0][0] == '-') return args;
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size())
      path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0)
      path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::vector<std::string> toks = config_tokens(path);
  args.insert(args.begin() + 1, toks.begin(), toks.end());
  return args;
}

void add_data_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "master RNG seed")->capture_default_str();
  cmd->add_option("--tag-schema", o.tag_schema, "tag splitting: delim or camel")
      ->check(CLI::IsMember({"delim", "camel"}))
      ->capture_default_str();
  cmd->add_option("--tag-delim", o.tag_delim, "subtag delimiter for delim schema")
      ->capture_default_str();
}

void add_model_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--arch", o.arch, "encoder layout")
      ->check(CLI::IsMember({"multi", "concat", "concat_single_encoder"}))
      ->capture_default_str();
  cmd->add_option("--share-params", o.share_params, "share encoder weights across sources")
      ->capture_default_str();
  cmd->add_option("--embed-dim", o.embed_dim, "symbol embedding size")->capture_default_str();
  cmd->add_option("--hidden-dim", o.hidden_dim, "GRU hidden size")->capture_default_str();
  cmd->add_option("--beam", o.beam, "beam width (1 = greedy)")->capture_default_str();
  cmd->add_option("--max-output-len", o.max_output_len, "decode length cap")
      ->capture_default_str();
  cmd->add_option("--k", o.k, "keep only the first k sources (0 = all)")->capture_default_str();
}

void add_train_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--batch-size", o.batch_size, "minibatch size")->capture_default_str();
  cmd->add_option("--max-epochs", o.max_epochs, "epoch budget")->capture_default_str();
  cmd->add_option("--patience", o.patience, "non-improving epochs tolerated")
      ->capture_default_str();
  cmd->add_option("--rho", o.rho, "Adadelta decay")->capture_default_str();
  cmd->add_option("--eps", o.eps, "Adadelta epsilon")->capture_default_str();
  cmd->add_option("--threads", o.threads, "worker threads per batch")->capture_default_str();
}

void echo_config(const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [k, v] : kv) std::cout << "# " << k << " = " << v << '\n';
}

std::string fmt_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

TagSchema tag_schema(const Options& o) {
  if (o.tag_schema == "camel") return TagSchema::camel_case();
  auto cps = uni::decode_utf8(o.tag_delim);
  if (cps.size() != 1) throw SpecError("tag delimiter must be exactly one character");
  return TagSchema::delimiter(cps[0]);
}

ModelConfig model_config(const Options& o, int max_k) {
  ModelConfig m;
  m.embed_dim = o.embed_dim;
  m.hidden_dim = o.hidden_dim;
  m.max_k = std::max(1, max_k);
  m.share_encoder_params = o.share_params;
  m.arch = o.arch == "multi" ? Arch::kMultiEncoder : Arch::kConcatSingleEncoder;
  m.beam_width = o.beam;
  m.max_output_len = o.max_output_len;
  return m;
}

TrainConfig train_config(const Options& o) {
  TrainConfig t;
  t.batch_size = o.batch_size;
  t.max_epochs = o.max_epochs;
  t.patience = o.patience;
  t.rho = o.rho;
  t.eps = o.eps;
  t.seed = o.seed;
  t.threads = o.threads;
  return t;
}

int max_sources(std::span<const Instance> instances) {
  std::size_t k = 1;
  for (const Instance& ins : instances) k = std::max(k, ins.sources.size());
  return static_cast<int>(k);
}

std::vector<std::pair<std::string, std::string>> model_train_echo(const Options& o) {
  return {{"seed", std::to_string(o.seed)},
          {"k", std::to_string(o.k)},
          {"arch", o.arch},
          {"share-params", o.share_params ? "true" : "false"},
          {"embed-dim", std::to_string(o.embed_dim)},
          {"hidden-dim", std::to_string(o.hidden_dim)},
          {"batch-size", std::to_string(o.batch_size)},
          {"max-epochs", std::to_string(o.max_epochs)},
          {"patience", std::to_string(o.patience)},
          {"rho", fmt_double(o.rho)},
          {"eps", fmt_double(o.eps)},
          {"beam", std::to_string(o.beam)},
          {"max-output-len", std::to_string(o.max_output_len)},
          {"threads", std::to_string(o.threads)}};
}

int cmd_build_data(const Options& o, bool seed_given) {
  if (o.synthetic.empty() == (o.paradigms.empty() || o.bases.empty()))
    throw SpecError("pass either --paradigms with --bases, or --synthetic");
  const TagSchema schema = tag_schema(o);
  fs::create_directories(o.out);

  echo_config({{"seed", std::to_string(o.seed)},
               {"k-extra", std::to_string(o.k_extra)},
               {"exclude-target-slot", o.exclude_target_slot ? "true" : "false"},
               {"tag-schema", o.tag_schema},
               {"tag-delim", o.tag_delim}});

  if (!o.synthetic.empty()) {
    SyntheticSpec spec = load_synthetic_spec(o.synthetic);
    const std::uint64_t seed = seed_given ? o.seed : spec.seed;
    SyntheticLanguage lang = generate_synthetic_language(spec, seed);
    save_paradigms(o.out + "/paradigms.tsv", lang.table, schema);

    std::ofstream splits(o.out + "/splits.tsv", std::ios::binary);
    if (!splits) throw IoError("cannot write " + o.out + "/splits.tsv");
    for (const auto& [name, lemmas] : {std::pair<const char*, const std::vector<std::string>&>(
                                           "train", lang.train_lemmas),
                                       {"dev", lang.dev_lemmas},
                                       {"test", lang.test_lemmas}})
      for (const std::string& lemma : lemmas) splits << lemma << '\t' << name << '\n';

    auto train_ins = synthesize_instances(lang, lang.train_lemmas, o.k_extra, seed);
    auto dev_ins = synthesize_instances(lang, lang.dev_lemmas, o.k_extra, seed);
    auto test_ins = synthesize_instances(lang, lang.test_lemmas, o.k_extra, seed);
    save_instances(o.out + "/train.tsv", train_ins, schema);
    save_instances(o.out + "/dev.tsv", dev_ins, schema);
    save_instances(o.out + "/test.tsv", test_ins, schema);
    save_histogram(o.out + "/histogram.tsv", source_histogram(train_ins));
    std::cout << "wrote " << o.out << "/{paradigms,splits,train,dev,test,histogram}.tsv\n";
    std::cout << "lemmata train=" << lang.train_lemmas.size() << " dev=" << lang.dev_lemmas.size()
              << " test=" << lang.test_lemmas.size() << "\n";
    return 0;
  }

  ParadigmTable table = load_paradigms(o.paradigms, schema);
  std::vector<Instance> singles = load_instances(o.bases, schema);
  std::vector<BasePair> base = make_base_pairs(table, singles);
  SamplerConfig cfg;
  cfg.k_extra = o.k_extra;
  cfg.seed = o.seed;
  cfg.exclude_target_slot = o.exclude_target_slot;
  std::vector<Instance> instances = sample_multisource(table, base, cfg);
  save_instances(o.out + "/instances.tsv", instances, schema);
  save_histogram(o.out + "/histogram.tsv", source_histogram(instances));
  std::cout << "wrote " << o.out << "/instances.tsv (" << instances.size() << " instances) and "
            << o.out << "/histogram.tsv\n";
  return 0;
}

int cmd_train(const Options& o) {
  const TagSchema schema = tag_schema(o);
  auto train_set = restrict_sources(load_instances(o.train_file, schema), o.k);
  auto dev_set = restrict_sources(load_instances(o.dev_file, schema), o.k);

  echo_config(model_train_echo(o));
  const int max_k = std::max(max_sources(train_set), max_sources(dev_set));
  TrainResult res = train(train_set, dev_set, model_config(o, max_k), train_config(o));

  save_checkpoint(o.out, res.best, res.vocab);
  const std::string history = o.history.empty() ? o.out + ".history.tsv" : o.history;
  save_history(history, res.history);

  const auto& records = res.history.records;
  double best_acc = 0.0;
  for (const EpochRecord& r : records)
    if (r.epoch == res.history.best_epoch) best_acc = r.dev_acc;
  std::cout << "trained " << records.size() << " epochs; best epoch " << res.history.best_epoch;
  std::printf(" dev_acc=%.4f\n", best_acc);
  std::cout << "wrote " << o.out << " and " << history << "\n";
  return 0;
}

int cmd_predict(const Options& o, bool beam_given, bool len_given) {
  Checkpoint ck = load_checkpoint(o.checkpoint);
  if (beam_given) ck.params.config.beam_width = o.beam;
  if (len_given) ck.params.config.max_output_len = o.max_output_len;
  const TagSchema schema = tag_schema(o);
  auto instances = restrict_sources(load_instances(o.input, schema), o.k);

  echo_config({{"beam", std::to_string(ck.params.config.beam_width)},
               {"max-output-len", std::to_string(ck.params.config.max_output_len)},
               {"k", std::to_string(o.k)}});

  if (!o.trace_dir.empty()) fs::create_directories(o.trace_dir);
  std::ofstream out(o.out, std::ios::binary);
  if (!out) throw IoError("cannot write " + o.out);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    EncodedInstance enc = encode_instance(instances[i], ck.vocab, ck.params.config);
    Prediction pred = predict(enc, ck.params, ck.vocab);
    out << uni::encode_utf8(std::vector<char32_t>(pred.form.begin(), pred.form.end())) << '\n';
    if (pred.empty_warning)
      std::cerr << "# warning: empty prediction for instance " << i << '\n';
    if (!o.trace_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof(name), "%06zu", i);
      HeatmapLabels labels = heatmap_labels(enc, ck.vocab);
      export_heatmap(pred.alpha, labels.labels, labels.groups,
                     heatmap_output_labels(pred, ck.vocab),
                     o.trace_dir + "/" + name + ".csv", o.trace_dir + "/" + name + ".svg");
    }
  }
  if (!out) throw IoError("write failed: " + o.out);
  std::cout << "wrote " << o.out << " (" << instances.size() << " predictions)\n";
  return 0;
}

int cmd_evaluate(const Options& o) {
  std::ifstream in(o.pred_file, std::ios::binary);
  if (!in) throw IoError("cannot open " + o.pred_file);
  std::vector<std::string> preds;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    preds.push_back(line);
  }

  const TagSchema schema = tag_schema(o);
  std::vector<std::string> golds;
  for (const Instance& ins : load_instances(o.gold_file, schema)) {
    if (!ins.target_form) throw InstanceMismatch("gold instance without target form");
    golds.push_back(
        uni::encode_utf8(std::vector<char32_t>(ins.target_form->begin(), ins.target_form->end())));
  }

  EvalReport report = accuracy(preds, golds);
  save_eval_report(o.out, report);
  std::printf("accuracy=%.4f (%zu/%zu)\n", report.accuracy(), report.n_correct(),
              report.n_total());
  std::cout << "wrote " << o.out << "\n";
  return 0;
}

int cmd_curve(Options o) {
  const TagSchema schema = tag_schema(o);
  auto train_set = restrict_sources(load_instances(o.train_file, schema), o.k);
  auto dev_set = restrict_sources(load_instances(o.dev_file, schema), o.k);
  auto test_set = restrict_sources(load_instances(o.test_file, schema), o.k);

  // Early stopping is off for curves, so patience only has to satisfy the
  // config invariant.
  o.patience = std::min(o.patience, o.max_epochs);
  echo_config(model_train_echo(o));
  echo_config({{"levels", std::to_string(o.levels)}});

  const int max_k = std::max(max_sources(train_set), max_sources(dev_set));
  CurveReport curve = learning_curve(train_set, dev_set, test_set, o.levels,
                                     model_config(o, max_k), train_config(o));
  save_curve(o.out, curve);
  for (const CurvePoint& p : curve.points)
    std::printf("n=%zu accuracy=%.4f\n", p.train_size, p.accuracy);
  std::cout << "wrote " << o.out << "\n";
  return 0;
}

int cmd_heatmap(const Options& o, bool beam_given) {
  Checkpoint ck = load_checkpoint(o.checkpoint);
  if (beam_given) ck.params.config.beam_width = o.beam;
  const TagSchema schema = tag_schema(o);
  auto instances = restrict_sources(load_instances(o.input, schema), o.k);
  if (o.index < 0 || static_cast<std::size_t>(o.index) >= instances.size())
    throw IndexOutOfRange("instance index " + std::to_string(o.index) + " of " +
                          std::to_string(instances.size()));

  echo_config({{"index", std::to_string(o.index)},
               {"beam", std::to_string(ck.params.config.beam_width)}});
  EncodedInstance enc =
      encode_instance(instances[static_cast<std::size_t>(o.index)], ck.vocab, ck.params.config);
  Prediction pred = predict(enc, ck.params, ck.vocab);
  HeatmapLabels labels = heatmap_labels(enc, ck.vocab);
  export_heatmap(pred.alpha, labels.labels, labels.groups, heatmap_output_labels(pred, ck.vocab),
                 o.out_csv, o.out_svg);
  std::cout << "prediction: "
            << uni::encode_utf8(std::vector<char32_t>(pred.form.begin(), pred.form.end()))
            << "\nwrote " << o.out_csv << " and " << o.out_svg << "\n";
  return 0;
}

int cmd_gradcheck(const Options& o) {
  echo_config({{"seed", std::to_string(o.seed)},
               {"k", std::to_string(o.k)},
               {"embed-dim", std::to_string(o.embed_dim)},
               {"hidden-dim", std::to_string(o.hidden_dim)}});

  if (o.k < 1) throw SpecError("gradcheck needs k >= 1 sources");

  // Probe corpus: 20 symbols (4 controls + 12 chars + 4 subtags), three seeded
  // instances with short forms. Short targets keep the summed loss small; the
  // finite-difference noise floor is about one ulp of the loss divided by the
  // step, so a small loss leaves headroom under the 1e-4 threshold.
  const std::u32string pool = U"abcdefghijkl";
  const std::vector<std::string> tags = {"T1", "T2", "T3", "T4"};
  SymbolVocab vocab(std::vector<char32_t>(pool.begin(), pool.end()), tags);

  SplitMix64 rng(derive_stream(o.seed, 2));
  auto draw_form = [&] {
    std::u32string f;
    for (int i = 0; i < 2; ++i) f += pool[rng.below(pool.size())];
    return f;
  };
  std::vector<Instance> instances;
  for (int n = 0; n < 3; ++n) {
    Instance ins;
    for (int m = 0; m < o.k; ++m)
      ins.sources.push_back({draw_form(), MorphTag{{tags[rng.below(tags.size())]}}});
    ins.target_tag = MorphTag{{tags[rng.below(tags.size())]}};
    ins.target_form = draw_form();
    instances.push_back(std::move(ins));
  }

  ModelConfig mcfg = model_config(o, o.k);
  ModelParams params = init_params(mcfg, vocab);
  // Scale 0.5 keeps the model nonlinear enough that parameters have gradients
  // above the finite-difference noise floor, yet below the saturation regime
  // where gate derivatives vanish.
  randomize_params(params, derive_stream(o.seed, 1), 0.5);
  std::vector<Parameter*> plist = params.all();

  std::vector<EncodedInstance> encs;
  for (const Instance& ins : instances) encs.push_back(encode_instance(ins, vocab, mcfg));

  auto loss = [&](bool want_grad) {
    double total = 0.0;
    for (const EncodedInstance& enc : encs) {
      Tape t;
      ForwardResult fr = forward_logprob(t, enc, params);
      if (want_grad) t.backward(fr.loss);
      total += t.value(fr.loss)(0);
    }
    return total;
  };
  const double err = grad_check(loss, plist);
  std::printf("max_relative_error=%.6e threshold=%.0e vocab=%d params=%zu\n", err, kGradThreshold,
              vocab.size(), plist.size());
  if (!(err < kGradThreshold)) {
    std::cerr << "gradient check FAILED\n";
    return 3;
  }
  std::cout << "gradient check passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-source morphological reinflection"};
  app.require_subcommand(1);

  Options build_o, train_o, pred_o, eval_o, curve_o, heat_o;
  Options grad_o;
  grad_o.embed_dim = 8;
  grad_o.hidden_dim = 8;
  grad_o.k = 2;

  CLI::App* build = app.add_subcommand("build-data", "construct instance files");
  build->option_defaults()->take_last();
  build->add_option("--paradigms", build_o.paradigms, "lemma/tag/form TSV");
  build->add_option("--bases", build_o.bases, "k=1 instance TSV of base pairs");
  build->add_option("--synthetic", build_o.synthetic, "synthetic language spec file");
  build->add_option("--out", build_o.out, "output directory")->required();
  build->add_option("--k-extra", build_o.k_extra, "extra sources per instance")
      ->capture_default_str();
  build->add_option("--exclude-target-slot", build_o.exclude_target_slot,
                    "never draw the target slot as a source")
      ->capture_default_str();
  add_data_flags(build, build_o);
  add_config_flag(build, build_o);

  CLI::App* train_cmd = app.add_subcommand("train", "train a model");
  train_cmd->option_defaults()->take_last();
  train_cmd->add_option("--train", train_o.train_file, "training instance TSV")->required();
  train_cmd->add_option("--dev", train_o.dev_file, "development instance TSV")->required();
  train_cmd->add_option("--out", train_o.out, "checkpoint path")->required();
  train_cmd->add_option("--history", train_o.history, "history TSV (default <out>.history.tsv)");
  add_data_flags(train_cmd, train_o);
  add_model_flags(train_cmd, train_o);
  add_train_flags(train_cmd, train_o);
  add_config_flag(train_cmd, train_o);

  CLI::App* predict_cmd = app.add_subcommand("predict", "decode with a trained model");
  predict_cmd->option_defaults()->take_last();
  predict_cmd->add_option("--checkpoint", pred_o.checkpoint, "trained checkpoint")->required();
  predict_cmd->add_option("--input", pred_o.input, "instance TSV ('_' targets allowed)")
      ->required();
  predict_cmd->add_option("--out", pred_o.out, "predictions file, one form per line")->required();
  predict_cmd->add_option("--beam", pred_o.beam, "beam width (1 = greedy)");
  predict_cmd->add_option("--max-output-len", pred_o.max_output_len, "decode length cap");
  predict_cmd->add_option("--k", pred_o.k, "keep only the first k sources (0 = all)")
      ->capture_default_str();
  predict_cmd->add_option("--trace", pred_o.trace_dir, "write per-instance attention CSV+SVG");
  add_data_flags(predict_cmd, pred_o);
  add_config_flag(predict_cmd, pred_o);

  CLI::App* eval_cmd = app.add_subcommand("evaluate", "exact-match accuracy");
  eval_cmd->option_defaults()->take_last();
  eval_cmd->add_option("--pred", eval_o.pred_file, "predictions, one form per line")->required();
  eval_cmd->add_option("--gold", eval_o.gold_file, "instance TSV with target forms")->required();
  eval_cmd->add_option("--out", eval_o.out, "evaluation report TSV")->required();
  add_data_flags(eval_cmd, eval_o);
  add_config_flag(eval_cmd, eval_o);

  CLI::App* curve_cmd = app.add_subcommand("curve", "learning curve over halved training sets");
  curve_cmd->option_defaults()->take_last();
  curve_cmd->add_option("--train", curve_o.train_file, "training instance TSV")->required();
  curve_cmd->add_option("--dev", curve_o.dev_file, "development instance TSV")->required();
  curve_cmd->add_option("--test", curve_o.test_file, "test instance TSV")->required();
  curve_cmd->add_option("--out", curve_o.out, "curve TSV")->required();
  curve_cmd->add_option("--levels", curve_o.levels, "halvings (points = levels + 1)")
      ->capture_default_str();
  add_data_flags(curve_cmd, curve_o);
  add_model_flags(curve_cmd, curve_o);
  add_train_flags(curve_cmd, curve_o);
  add_config_flag(curve_cmd, curve_o);

  CLI::App* heat_cmd = app.add_subcommand("heatmap", "attention heatmap for one instance");
  heat_cmd->option_defaults()->take_last();
  heat_cmd->add_option("--checkpoint", heat_o.checkpoint, "trained checkpoint")->required();
  heat_cmd->add_option("--input", heat_o.input, "instance TSV")->required();
  heat_cmd->add_option("--index", heat_o.index, "0-based instance index")->capture_default_str();
  heat_cmd->add_option("--beam", heat_o.beam, "beam width");
  heat_cmd->add_option("--out-csv", heat_o.out_csv, "CSV path")->required();
  heat_cmd->add_option("--out-svg", heat_o.out_svg, "SVG path")->required();
  heat_cmd->add_option("--k", heat_o.k, "keep only the first k sources (0 = all)")
      ->capture_default_str();
  add_data_flags(heat_cmd, heat_o);
  add_config_flag(heat_cmd, heat_o);

  CLI::App* grad_cmd = app.add_subcommand("gradcheck", "finite-difference gradient check");
  grad_cmd->option_defaults()->take_last();
  grad_cmd->add_option("--seed", grad_o.seed, "RNG seed")->capture_default_str();
  grad_cmd->add_option("--k", grad_o.k, "sources per instance")->capture_default_str();
  grad_cmd->add_option("--embed-dim", grad_o.embed_dim, "symbol embedding size")
      ->capture_default_str();
  grad_cmd->add_option("--hidden-dim", grad_o.hidden_dim, "GRU hidden size")
      ->capture_default_str();
  add_config_flag(grad_cmd, grad_o);

  try {
    std::vector<std::string> args = splice_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (build->parsed()) return cmd_build_data(build_o, build->count("--seed") > 0);
    if (train_cmd->parsed()) return cmd_train(train_o);
    if (predict_cmd->parsed())
      return cmd_predict(pred_o, predict_cmd->count("--beam") > 0,
                         predict_cmd->count("--max-output-len") > 0);
    if (eval_cmd->parsed()) return cmd_evaluate(eval_o);
    if (curve_cmd->parsed()) return cmd_curve(curve_o);
    if (heat_cmd->parsed()) return cmd_heatmap(heat_o, heat_cmd->count("--beam") > 0);
    if (grad_cmd->parsed()) return cmd_gradcheck(grad_o);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
