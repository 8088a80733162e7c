#ifndef WAZOBIA_BILSTM_H_
#define WAZOBIA_BILSTM_H_

// Bidirectional LSTM token classifier with a per-token softmax over the seven
// BIO labels. Every tensor is a column-major double matrix; biases are H x 1.
//
//   x_t      = embeddings.row(word_t)
//   z_g      = W_g^T x_t + U_g^T h_{t-1} + b_g        g in {i, f, o, c}
//   c_t      = sigmoid(z_f) * c_{t-1} + sigmoid(z_i) * tanh(z_c)
//   h_t      = sigmoid(z_o) * tanh(c_t)
//   p_t      = softmax(P^T [h_fwd_t ; h_bwd_t] + p)
//
// The backward cell runs the same recurrence from the last token to the first.

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "wazobia/corpus.h"
#include "wazobia/rng.h"
#include "wazobia/text.h"
#include "wazobia/train_config.h"

namespace wazobia::bilstm {

using Matrix = Eigen::MatrixXd;

enum Gate { kInputGate = 0, kForgetGate = 1, kOutputGate = 2, kCandidate = 3 };

struct LstmCell {
  std::array<Matrix, 4> w;  // D x H each
  std::array<Matrix, 4> u;  // H x H each
  std::array<Matrix, 4> b;  // H x 1 each
};

struct BilstmParams {
  Matrix embeddings;  // V x D
  LstmCell forward_cell;
  LstmCell backward_cell;
  Matrix projection;       // 2H x 7
  Matrix projection_bias;  // 7 x 1

  static BilstmParams zeros(std::size_t vocab_size, int dim, int hidden);
  // Every entry uniform in [-scale, scale], drawn tensor by tensor in
  // tensors() order.
  static BilstmParams random(std::size_t vocab_size, int dim, int hidden,
                             SplitMix64& rng, double scale = 0.1);

  std::size_t vocab_size() const { return static_cast<std::size_t>(embeddings.rows()); }
  int dim() const { return static_cast<int>(embeddings.cols()); }
  int hidden() const { return static_cast<int>(projection.rows() / 2); }

  // Named tensors in a fixed order: embeddings, fwd.{w,u,b}_{i,f,o,c},
  // bwd.{...}, projection, projection_bias.
  std::vector<std::pair<std::string, Matrix*>> tensors();
  std::vector<std::pair<std::string, const Matrix*>> tensors() const;

  // Throws INVALID_ARGUMENT on inconsistent shapes.
  void check_shapes() const;
  bool all_finite() const;
  double squared_norm() const;
};

// Normalized word -> row index; index 0 is always <UNK>.
class WordVocab {
 public:
  static constexpr std::string_view kUnk = "<UNK>";

  WordVocab();

  std::size_t add(const std::string& word);
  // 0 (UNK) for unseen words.
  std::size_t index_of(const std::string& word) const;
  bool contains(const std::string& word) const { return index_.contains(word); }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  static WordVocab from_words(std::vector<std::string> words);

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> words_;
  bool frozen_ = false;
};

// Normalized tokens of the corpus, first-seen order, frozen.
WordVocab build_word_vocab(std::span<const LabeledSentence> corpus);

std::vector<std::size_t> word_indices(const Sentence& sentence, const WordVocab& vocab);

// T x 7 label probabilities. Throws EMPTY_SEQUENCE.
Matrix forward(const BilstmParams& params, std::span<const std::size_t> words);
Matrix forward(const BilstmParams& params, const Sentence& sentence,
               const WordVocab& vocab);

struct LossAndGrad {
  double loss = 0.0;
  BilstmParams grad;
};

// Mean per-token cross-entropy (plus (l2/2)|params|^2) and its gradient by
// backpropagation through time in both directions. Throws LENGTH_MISMATCH,
// EMPTY_SEQUENCE.
LossAndGrad loss_and_grad(const BilstmParams& params,
                          std::span<const std::size_t> words,
                          std::span<const BioLabel> gold, double l2_lambda = 0.0);

// Mean cross-entropy only.
double loss(const BilstmParams& params, std::span<const std::size_t> words,
            std::span<const BioLabel> gold);

std::vector<BioLabel> predict(const BilstmParams& params,
                              std::span<const std::size_t> words);

// Rescales grad in place so its global L2 norm is at most max_norm; returns
// the norm before clipping.
double clip_gradient(BilstmParams& grad, double max_norm);

// params -= lr * grad
void sgd_step(BilstmParams& params, const BilstmParams& grad, double lr);

struct Instance {
  std::vector<std::size_t> words;
  std::vector<BioLabel> gold;
};

std::vector<Instance> make_instances(std::span<const LabeledSentence> corpus,
                                     const WordVocab& vocab);

struct Embeddings {
  WordVocab vocab;
  Matrix vectors;  // V x D, row 0 is the mean of all file vectors
};

// Text vectors, one `word v1 ... vD` per line, optional `V D` header line.
// Throws FILE_NOT_FOUND, EMPTY_FILE, BAD_FORMAT (with line number).
Embeddings load_embeddings(const std::filesystem::path& path);
Embeddings parse_embeddings(std::string_view content);

struct TrainResult {
  BilstmParams params;
  std::vector<RunEpoch> history;
};

// Same protocol as the CRF trainer: seeded init and shuffle, per-sentence SGD
// with global-norm clipping, one history row per epoch. When `pretrained` is
// given its dimension wins over config.embedding_dim and known words start
// from their pretrained vectors.
TrainResult train(std::span<const LabeledSentence> corpus,
                  std::span<const LabeledSentence> val, const TrainConfig& config,
                  const WordVocab& vocab, const Embeddings* pretrained = nullptr,
                  const EpochCallback& on_epoch = {});

}  // namespace wazobia::bilstm

#endif  // WAZOBIA_BILSTM_H_
