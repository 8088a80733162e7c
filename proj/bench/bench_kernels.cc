// Times the serial and OpenMP corpus kernels on a replicated corpus and
// checks that both produce identical output.

#include <chrono>
#include <cstdio>
#include <functional>

#include "CLI11.hpp"
#include "wazobia/corpus.h"
#include "wazobia/error.h"
#include "wazobia/gazetteer.h"
#include "wazobia/kernels.h"

using namespace wazobia;

namespace {

template <typename F>
double best_ms(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto start = std::chrono::steady_clock::now();
    f();
    const auto end = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(end - start).count());
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms, bool same) {
  std::printf("%-16s serial %9.2f ms  parallel %9.2f ms  speedup %5.2fx  %s\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs parallel kernel timings"};
  std::string corpus_path = std::string(WAZOBIA_DATA_DIR_PATH) + "/mini_corpus.tsv";
  std::string gazetteer_path = std::string(WAZOBIA_DATA_DIR_PATH) + "/gazetteer.tsv";
  int copies = 200;
  int reps = 5;
  app.add_option("--in", corpus_path, "Corpus file");
  app.add_option("--gazetteer", gazetteer_path, "Gazetteer file");
  app.add_option("--copies", copies, "Times the corpus is repeated")->check(CLI::PositiveNumber);
  app.add_option("--reps", reps, "Timed repetitions; the best is reported")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  try {
    const auto base = read_corpus(corpus_path).sentences;
    std::vector<LabeledSentence> corpus;
    for (int c = 0; c < copies; ++c) corpus.insert(corpus.end(), base.begin(), base.end());
    const Gazetteer gazetteer = Gazetteer::load(gazetteer_path);
    std::printf("%zu sentences, %d threads\n", corpus.size(), kernels::max_threads());

    SplitMix64 rng(1);
    const FeatureVocab vocab = build_vocab(sentences_of(base), gazetteer);
    crf::CrfParams crf_params = crf::CrfParams::zeros(vocab.size());
    for (Eigen::Index i = 0; i < crf_params.emission.size(); ++i) {
      crf_params.emission.data()[i] = rng.uniform(-1, 1);
    }
    for (Eigen::Index i = 0; i < crf_params.transition.size(); ++i) {
      crf_params.transition.data()[i] = rng.uniform(-1, 1);
    }
    const auto crf_data = crf::make_instances(corpus, vocab, gazetteer);

    const bilstm::WordVocab words = bilstm::build_word_vocab(base);
    const auto lstm_params = bilstm::BilstmParams::random(words.size(), 16, 16, rng);
    const auto lstm_data = bilstm::make_instances(corpus, words);

    std::vector<double> ls, lp;
    std::vector<std::vector<BioLabel>> ds, dp;
    double s = best_ms(reps, [&] { ls = kernels::serial::crf_losses(crf_params, crf_data); });
    double p = best_ms(reps, [&] { lp = kernels::parallel::crf_losses(crf_params, crf_data); });
    report("crf_losses", s, p, ls == lp);
    s = best_ms(reps, [&] { ds = kernels::serial::crf_decode(crf_params, crf_data); });
    p = best_ms(reps, [&] { dp = kernels::parallel::crf_decode(crf_params, crf_data); });
    report("crf_decode", s, p, ds == dp);
    s = best_ms(reps, [&] { ls = kernels::serial::bilstm_losses(lstm_params, lstm_data); });
    p = best_ms(reps, [&] { lp = kernels::parallel::bilstm_losses(lstm_params, lstm_data); });
    report("bilstm_losses", s, p, ls == lp);
    s = best_ms(reps, [&] { ds = kernels::serial::bilstm_predict(lstm_params, lstm_data); });
    p = best_ms(reps, [&] { dp = kernels::parallel::bilstm_predict(lstm_params, lstm_data); });
    report("bilstm_predict", s, p, ds == dp);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(e.code_name()).c_str(), e.what());
    return 2;
  }
  return 0;
}
