// Command-line front end. Exit status: 0 success, 1 usage error, 2 runtime
// error. Diagnostics go to stderr as "error: CODE: message".

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "wazobia/corpus.h"
#include "wazobia/error.h"
#include "wazobia/metrics.h"
#include "wazobia/model_file.h"
#include "wazobia/ocr.h"
#include "wazobia/service.h"
#include "wazobia/store.h"
#include "wazobia/tagger.h"
#include "wazobia/training.h"

namespace {

using namespace wazobia;
namespace fs = std::filesystem;

constexpr int kUsage = 1;
constexpr int kRuntime = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void print_epoch(const RunEpoch& r) {
  std::printf("%d\t%.6f\t%.6f\t%.6f\t%.6f\t%.6f\t%.6f\n", r.epoch, r.training_loss,
              r.validation_loss, r.precision, r.recall, r.f1, r.accuracy);
  std::fflush(stdout);
}

void print_summary(const char* name, const std::optional<EvalSummary>& s) {
  if (!s) return;
  std::printf("# %s precision=%.6f recall=%.6f f1_score=%.6f accuracy=%.6f "
              "accuracy_excluding_o=%.6f\n",
              name, s->precision, s->recall, s->f1, s->accuracy, s->accuracy_excluding_o);
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct SplitArgs {
  std::string in, out_dir;
  std::uint64_t seed = 42;
};

int cmd_split(const SplitArgs& a) {
  const auto corpus = read_corpus(a.in);
  SplitSpec spec;
  spec.seed = a.seed;
  const CorpusSplit parts = split(corpus.sentences, spec);
  fs::create_directories(a.out_dir);
  write_corpus(parts.train, fs::path(a.out_dir) / "train.tsv");
  write_corpus(parts.val, fs::path(a.out_dir) / "val.tsv");
  write_corpus(parts.test, fs::path(a.out_dir) / "test.tsv");
  std::printf("train\t%zu\nval\t%zu\ntest\t%zu\n", parts.train.size(), parts.val.size(),
              parts.test.size());
  return 0;
}

struct TrainArgs {
  std::string model = "crf", in, data_dir, gazetteer, embeddings;
  int epochs = 50;
  std::uint64_t seed = 42;
  std::optional<double> lr, l2, clip;
  std::optional<std::size_t> min_feat_freq;
  std::optional<int> embedding_dim, hidden_dim;
  bool hard_bio = false;
};

int cmd_train(const TrainArgs& a) {
  TrainingRequest req;
  req.model_type = parse_model_type(a.model);
  req.corpus_path = a.in;
  req.config = req.model_type == ModelType::kCrf ? TrainConfig::crf_defaults()
                                                  : TrainConfig::bilstm_defaults();
  req.config.epochs = a.epochs;
  req.config.seed = a.seed;
  if (a.lr) req.config.learning_rate = *a.lr;
  if (a.l2) req.config.l2_lambda = *a.l2;
  if (a.clip) req.config.clip_norm = *a.clip;
  if (a.min_feat_freq) req.config.min_feat_freq = *a.min_feat_freq;
  if (a.embedding_dim) req.config.embedding_dim = *a.embedding_dim;
  if (a.hidden_dim) req.config.hidden_dim = *a.hidden_dim;
  if (!a.gazetteer.empty()) req.gazetteer_path = a.gazetteer;
  if (!a.embeddings.empty()) req.embeddings_path = a.embeddings;
  req.hard_bio_constraints = a.hard_bio;

  FileStore store(resolve_data_dir(a.data_dir));
  const RunRecord begun = begin_run(store, req);
  std::printf("# run_id %s\n", begun.run_id.c_str());
  std::printf("# %s\n", std::string(kHistoryCsvHeader).c_str());
  std::fflush(stdout);
  const RunRecord run = execute_training(store, req, begun, print_epoch);
  if (run.status != RunStatus::kDone) {
    std::fprintf(stderr, "error: %s: %s\n", run.error_code.c_str(), run.error_message.c_str());
    return kRuntime;
  }
  print_summary("train", run.train_scores);
  print_summary("test", run.test_scores);
  std::printf("# model %s\n", store.model_path(run.run_id).string().c_str());
  return 0;
}

struct EvalArgs {
  std::string model_file, in;
};

void print_prf(const std::string& name, const PRF& p) {
  std::printf("%s\tprecision=%.6f\trecall=%.6f\tf1=%.6f\ttp=%zu\tfp=%zu\tfn=%zu\n",
              name.c_str(), p.precision, p.recall, p.f1, p.tp, p.fp, p.fn);
}

int cmd_eval(const EvalArgs& a) {
  const ModelFile model = load_model(a.model_file);
  const auto corpus = read_corpus(a.in);
  const Evaluation ev = evaluate_tagger(*model.tagger, corpus.sentences);
  print_prf("micro", ev.entities.micro);
  for (auto type : kEntityTypes) {
    const auto it = ev.entities.per_type.find(type);
    print_prf(std::string(entity_type_name(type)),
              it == ev.entities.per_type.end() ? PRF{} : it->second);
  }
  std::printf("accuracy\t%.6f\naccuracy_excluding_o\t%.6f\n", ev.accuracy.with_o,
              ev.accuracy.excluding_o);
  return 0;
}

struct TagArgs {
  std::string model_file, text, file, ocr_image, language = "unknown", ocr_command, data_dir;
  bool raw = false;
};

int cmd_tag(const TagArgs& a) {
  const Language lang = parse_language(a.language);
  std::string text;
  if (!a.ocr_image.empty()) {
    std::string command = a.ocr_command;
    if (command.empty()) command = read_ocr_command(resolve_data_dir(a.data_dir));
    text = OcrAdapter(command).extract(a.ocr_image, lang);
  } else if (!a.file.empty()) {
    text = read_text_file(a.file);
  } else {
    text = a.text;
  }
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw UsageError("no text to tag");
  }
  const ModelFile model = load_model(a.model_file);
  const TagResult result = tag_text(*model.tagger, text, lang, !a.raw);
  for (const auto& s : result.entities) {
    std::printf("%s\t%zu\t%zu\t%s\n", std::string(entity_type_name(s.type)).c_str(),
                s.start_char, s.end_char, s.surface.c_str());
  }
  return 0;
}

struct ServeArgs {
  std::string host = "0.0.0.0", data_dir, ui_dir, ocr_command, corpus, gazetteer;
  int port = 8080;
};

httplib::Server* g_server = nullptr;

int cmd_serve(const ServeArgs& a) {
  const fs::path root = resolve_data_dir(a.data_dir);
  FileStore store(root);
  ServiceOptions opts;
  opts.ocr_command = a.ocr_command.empty() ? read_ocr_command(root) : a.ocr_command;
  if (!a.ui_dir.empty()) opts.ui_dir = a.ui_dir;
  if (!a.corpus.empty()) opts.bundled_corpus = a.corpus;
  if (!a.gazetteer.empty()) opts.gazetteer = a.gazetteer;
  Service service(store, opts);
  httplib::Server server;
  service.register_routes(server);
  g_server = &server;
  std::signal(SIGINT, [](int) { g_server->stop(); });
  std::signal(SIGTERM, [](int) { g_server->stop(); });
  std::fprintf(stderr, "listening on %s:%d, data in %s\n", a.host.c_str(), a.port,
               root.string().c_str());
  if (!server.listen(a.host, a.port)) {
    throw Error(ErrorCode::kIo, "cannot listen on port " + std::to_string(a.port));
  }
  service.trainer().wait();
  return 0;
}

struct MetricsArgs {
  std::string run, out, data_dir;
};

int cmd_metrics_export(const MetricsArgs& a) {
  FileStore store(resolve_data_dir(a.data_dir));
  const auto run = store.get_run(a.run);
  if (!run) throw Error(ErrorCode::kUnknownRun, "unknown run '" + a.run + "'");
  if (a.out.empty() || a.out == "-") {
    std::fputs(history_to_csv(run->history).c_str(), stdout);
  } else {
    export_history(run->history, a.out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Named-entity recognition for Hausa, Igbo and Yoruba"};
  app.require_subcommand(1);

  SplitArgs split_args;
  auto* split_cmd = app.add_subcommand("split", "Split a corpus into train/val/test files");
  split_cmd->add_option("--in", split_args.in, "Corpus file")->required();
  split_cmd->add_option("--seed", split_args.seed, "Shuffle seed");
  split_cmd->add_option("--out-dir", split_args.out_dir, "Output directory")->required();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a tagger and store the run");
  train_cmd->add_option("--model", train_args.model, "crf or bilstm")
      ->check(CLI::IsMember({"crf", "bilstm"}));
  train_cmd->add_option("--in", train_args.in, "Corpus file")->required();
  train_cmd->add_option("--epochs", train_args.epochs, "Epochs")->check(CLI::PositiveNumber);
  train_cmd->add_option("--seed", train_args.seed, "Seed for split, init and shuffle");
  train_cmd->add_option("--data-dir", train_args.data_dir, "Store root");
  train_cmd->add_option("--gazetteer", train_args.gazetteer, "Gazetteer file");
  train_cmd->add_option("--embeddings", train_args.embeddings, "Pretrained word vectors");
  train_cmd->add_option("--lr", train_args.lr, "Learning rate");
  train_cmd->add_option("--l2", train_args.l2, "L2 strength");
  train_cmd->add_option("--clip", train_args.clip, "Gradient norm clip (bilstm)");
  train_cmd->add_option("--min-feat-freq", train_args.min_feat_freq, "Feature count cutoff");
  train_cmd->add_option("--embedding-dim", train_args.embedding_dim, "Embedding size");
  train_cmd->add_option("--hidden-dim", train_args.hidden_dim, "LSTM hidden size");
  train_cmd->add_flag("--hard-bio-constraints", train_args.hard_bio,
                      "Mask invalid BIO transitions when decoding");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Score a model on a corpus");
  eval_cmd->add_option("--model-file", eval_args.model_file, "Model file")->required();
  eval_cmd->add_option("--in", eval_args.in, "Corpus file")->required();

  TagArgs tag_args;
  auto* tag_cmd = app.add_subcommand("tag", "Print entity spans for text");
  tag_cmd->add_option("--model-file", tag_args.model_file, "Model file")->required();
  auto* text_opt = tag_cmd->add_option("--text", tag_args.text, "Text to tag");
  auto* file_opt = tag_cmd->add_option("--file", tag_args.file, "Read text from a file");
  auto* ocr_opt = tag_cmd->add_option("--ocr", tag_args.ocr_image, "Read text from an image");
  text_opt->excludes(file_opt)->excludes(ocr_opt);
  file_opt->excludes(ocr_opt);
  tag_cmd->add_option("--language", tag_args.language, "hausa, igbo, yoruba or unknown");
  tag_cmd->add_option("--ocr-command", tag_args.ocr_command, "OCR command template");
  tag_cmd->add_option("--data-dir", tag_args.data_dir, "Store root (for config.json)");
  tag_cmd->add_flag("--raw", tag_args.raw, "Skip gazetteer post-processing");

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--port", serve_args.port, "Port");
  serve_cmd->add_option("--host", serve_args.host, "Bind address");
  serve_cmd->add_option("--data-dir", serve_args.data_dir, "Store root");
  serve_cmd->add_option("--ui-dir", serve_args.ui_dir, "Static UI bundle");
  serve_cmd->add_option("--ocr-command", serve_args.ocr_command, "OCR command template");
  serve_cmd->add_option("--corpus", serve_args.corpus, "Corpus served as corpus_id \"mini\"");
  serve_cmd->add_option("--gazetteer", serve_args.gazetteer, "Gazetteer for API runs");

  MetricsArgs metrics_args;
  auto* metrics_cmd = app.add_subcommand("metrics", "Training history tools");
  metrics_cmd->require_subcommand(1);
  auto* export_cmd = metrics_cmd->add_subcommand("export", "Write a run's history CSV");
  export_cmd->add_option("--run", metrics_args.run, "Run id")->required();
  export_cmd->add_option("--out", metrics_args.out, "Output file, stdout when omitted");
  export_cmd->add_option("--data-dir", metrics_args.data_dir, "Store root");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*split_cmd) return cmd_split(split_args);
    if (*train_cmd) return cmd_train(train_args);
    if (*eval_cmd) return cmd_eval(eval_args);
    if (*tag_cmd) return cmd_tag(tag_args);
    if (*serve_cmd) return cmd_serve(serve_args);
    if (*export_cmd) return cmd_metrics_export(metrics_args);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: USAGE: %s\n", e.what());
    return kUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(e.code_name()).c_str(), e.what());
    return kRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: INTERNAL: %s\n", e.what());
    return kRuntime;
  }
  return kUsage;
}
