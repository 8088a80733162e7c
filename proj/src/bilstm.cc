#include "wazobia/bilstm.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wazobia/error.h"

namespace wazobia::bilstm {
namespace {

constexpr std::array<const char*, 4> kGateNames = {"i", "f", "o", "c"};

using Vector = Eigen::VectorXd;

Vector sigmoid(const Vector& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Vector tanh_of(const Vector& z) {
  return z.unaryExpr([](double v) { return std::tanh(v); });
}

void add_cell_tensors(LstmCell& cell, const std::string& prefix,
                      std::vector<std::pair<std::string, Matrix*>>& out) {
  for (int g = 0; g < 4; ++g) out.emplace_back(prefix + ".w_" + kGateNames[g], &cell.w[g]);
  for (int g = 0; g < 4; ++g) out.emplace_back(prefix + ".u_" + kGateNames[g], &cell.u[g]);
  for (int g = 0; g < 4; ++g) out.emplace_back(prefix + ".b_" + kGateNames[g], &cell.b[g]);
}

LstmCell zero_cell(int dim, int hidden) {
  LstmCell c;
  for (int g = 0; g < 4; ++g) {
    c.w[g] = Matrix::Zero(dim, hidden);
    c.u[g] = Matrix::Zero(hidden, hidden);
    c.b[g] = Matrix::Zero(hidden, 1);
  }
  return c;
}

// Activations of one direction at one step, kept for backpropagation.
struct Step {
  Vector x, h_prev, c_prev;
  Vector i, f, o, g;
  Vector c, tanh_c, h;
};

std::vector<Step> run_cell(const LstmCell& cell, const Matrix& embeddings,
                           std::span<const std::size_t> words, bool reverse) {
  const auto T = words.size();
  const auto H = cell.u[0].rows();
  std::vector<Step> steps(T);
  Vector h = Vector::Zero(H);
  Vector c = Vector::Zero(H);
  for (std::size_t k = 0; k < T; ++k) {
    const std::size_t t = reverse ? T - 1 - k : k;
    Step& s = steps[t];
    s.x = embeddings.row(static_cast<Eigen::Index>(words[t])).transpose();
    s.h_prev = h;
    s.c_prev = c;
    auto pre = [&](int gate) -> Vector {
      return cell.w[gate].transpose() * s.x + cell.u[gate].transpose() * h + cell.b[gate];
    };
    s.i = sigmoid(pre(kInputGate));
    s.f = sigmoid(pre(kForgetGate));
    s.o = sigmoid(pre(kOutputGate));
    s.g = tanh_of(pre(kCandidate));
    s.c = s.f.cwiseProduct(c) + s.i.cwiseProduct(s.g);
    s.tanh_c = tanh_of(s.c);
    s.h = s.o.cwiseProduct(s.tanh_c);
    h = s.h;
    c = s.c;
  }
  return steps;
}

// Backpropagates dL/dh_t (indexed by original position) through one
// direction, accumulating into `grad` and the embedding gradient.
void backprop_cell(const LstmCell& cell, const std::vector<Step>& steps,
                   const std::vector<Vector>& dh_out,
                   std::span<const std::size_t> words, bool reverse,
                   LstmCell& grad, Matrix& d_embeddings) {
  const auto T = steps.size();
  const auto H = cell.u[0].rows();
  Vector dh_next = Vector::Zero(H);
  Vector dc_next = Vector::Zero(H);
  for (std::size_t k = 0; k < T; ++k) {
    // Walk against the direction the cell ran.
    const std::size_t t = reverse ? k : T - 1 - k;
    const Step& s = steps[t];
    const Vector dh = dh_out[t] + dh_next;
    const Vector d_o = dh.cwiseProduct(s.tanh_c);
    const Vector dc = dh.cwiseProduct(s.o).cwiseProduct(
                          (1.0 - s.tanh_c.array().square()).matrix()) +
                      dc_next;
    const Vector d_i = dc.cwiseProduct(s.g);
    const Vector d_g = dc.cwiseProduct(s.i);
    const Vector d_f = dc.cwiseProduct(s.c_prev);
    dc_next = dc.cwiseProduct(s.f);

    std::array<Vector, 4> dz;
    dz[kInputGate] = d_i.array() * s.i.array() * (1.0 - s.i.array());
    dz[kForgetGate] = d_f.array() * s.f.array() * (1.0 - s.f.array());
    dz[kOutputGate] = d_o.array() * s.o.array() * (1.0 - s.o.array());
    dz[kCandidate] = d_g.array() * (1.0 - s.g.array().square());

    Vector dx = Vector::Zero(s.x.size());
    dh_next.setZero();
    for (int gate = 0; gate < 4; ++gate) {
      grad.w[gate] += s.x * dz[gate].transpose();
      grad.u[gate] += s.h_prev * dz[gate].transpose();
      grad.b[gate] += dz[gate];
      dx += cell.w[gate] * dz[gate];
      dh_next += cell.u[gate] * dz[gate];
    }
    d_embeddings.row(static_cast<Eigen::Index>(words[t])) += dx.transpose();
  }
}

struct ForwardPass {
  std::vector<Step> fwd, bwd;
  Matrix probs;     // T x 7
  Matrix features;  // 2H x T
};

ForwardPass run_forward(const BilstmParams& params,
                        std::span<const std::size_t> words) {
  if (words.empty()) throw Error(ErrorCode::kEmptySequence, "sentence has no tokens");
  for (auto w : words) {
    if (w >= params.vocab_size()) {
      throw Error(ErrorCode::kInvalidArgument, "word index outside vocabulary");
    }
  }
  ForwardPass p;
  p.fwd = run_cell(params.forward_cell, params.embeddings, words, false);
  p.bwd = run_cell(params.backward_cell, params.embeddings, words, true);
  const auto T = static_cast<Eigen::Index>(words.size());
  const int H = params.hidden();
  p.features.resize(2 * H, T);
  p.probs.resize(T, kLabelCount);
  for (Eigen::Index t = 0; t < T; ++t) {
    p.features.col(t).head(H) = p.fwd[static_cast<std::size_t>(t)].h;
    p.features.col(t).tail(H) = p.bwd[static_cast<std::size_t>(t)].h;
    Vector logits = params.projection.transpose() * p.features.col(t) +
                    params.projection_bias.col(0);
    const double hi = logits.maxCoeff();
    Vector e = (logits.array() - hi).exp().matrix();
    p.probs.row(t) = (e / e.sum()).transpose();
  }
  return p;
}

double parse_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const char* begin = s.data();
  if (!s.empty() && s.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::kBadFormat, "embedding line " + std::to_string(line_no) +
                                           ": non-numeric field '" + std::string(s) + "'");
  }
  return v;
}

bool is_integer(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

BilstmParams BilstmParams::zeros(std::size_t vocab_size, int dim, int hidden) {
  BilstmParams p;
  p.embeddings = Matrix::Zero(static_cast<Eigen::Index>(vocab_size), dim);
  p.forward_cell = zero_cell(dim, hidden);
  p.backward_cell = zero_cell(dim, hidden);
  p.projection = Matrix::Zero(2 * hidden, kLabelCount);
  p.projection_bias = Matrix::Zero(kLabelCount, 1);
  return p;
}

BilstmParams BilstmParams::random(std::size_t vocab_size, int dim, int hidden,
                                  SplitMix64& rng, double scale) {
  BilstmParams p = zeros(vocab_size, dim, hidden);
  for (auto& [name, m] : p.tensors()) {
    // Column-major fill order.
    for (Eigen::Index k = 0; k < m->size(); ++k) m->data()[k] = rng.uniform(-scale, scale);
  }
  return p;
}

std::vector<std::pair<std::string, Matrix*>> BilstmParams::tensors() {
  std::vector<std::pair<std::string, Matrix*>> out;
  out.emplace_back("embeddings", &embeddings);
  add_cell_tensors(forward_cell, "fwd", out);
  add_cell_tensors(backward_cell, "bwd", out);
  out.emplace_back("projection", &projection);
  out.emplace_back("projection_bias", &projection_bias);
  return out;
}

std::vector<std::pair<std::string, const Matrix*>> BilstmParams::tensors() const {
  auto mutable_view = const_cast<BilstmParams*>(this)->tensors();
  std::vector<std::pair<std::string, const Matrix*>> out;
  out.reserve(mutable_view.size());
  for (auto& [name, m] : mutable_view) out.emplace_back(name, m);
  return out;
}

void BilstmParams::check_shapes() const {
  const auto D = embeddings.cols();
  const auto H = projection.rows() / 2;
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, "BiLSTM shape mismatch: " + what);
  };
  if (projection.rows() % 2 != 0 || projection.cols() != kLabelCount) fail("projection");
  if (projection_bias.rows() != kLabelCount || projection_bias.cols() != 1) {
    fail("projection_bias");
  }
  for (const LstmCell* cell : {&forward_cell, &backward_cell}) {
    for (int g = 0; g < 4; ++g) {
      if (cell->w[g].rows() != D || cell->w[g].cols() != H) fail("w");
      if (cell->u[g].rows() != H || cell->u[g].cols() != H) fail("u");
      if (cell->b[g].rows() != H || cell->b[g].cols() != 1) fail("b");
    }
  }
  if (embeddings.rows() < 1) fail("embeddings must contain the UNK row");
}

bool BilstmParams::all_finite() const {
  for (const auto& [name, m] : tensors()) {
    if (!m->allFinite()) return false;
  }
  return true;
}

double BilstmParams::squared_norm() const {
  double s = 0.0;
  for (const auto& [name, m] : tensors()) s += m->squaredNorm();
  return s;
}

WordVocab::WordVocab() { add(std::string(kUnk)); }

std::size_t WordVocab::add(const std::string& word) {
  if (auto it = index_.find(word); it != index_.end()) return it->second;
  if (frozen_) return 0;
  const std::size_t idx = words_.size();
  index_.emplace(word, idx);
  words_.push_back(word);
  return idx;
}

std::size_t WordVocab::index_of(const std::string& word) const {
  auto it = index_.find(word);
  return it == index_.end() ? 0 : it->second;
}

WordVocab WordVocab::from_words(std::vector<std::string> words) {
  if (words.empty() || words.front() != kUnk) {
    throw Error(ErrorCode::kCorruptFile, "word vocabulary must start with <UNK>");
  }
  WordVocab v;
  for (std::size_t i = 1; i < words.size(); ++i) {
    if (v.contains(words[i])) {
      throw Error(ErrorCode::kCorruptFile, "duplicate word '" + words[i] + "'");
    }
    v.add(words[i]);
  }
  v.freeze();
  return v;
}

WordVocab build_word_vocab(std::span<const LabeledSentence> corpus) {
  WordVocab v;
  for (const auto& ls : corpus) {
    for (const auto& tok : ls.sentence.tokens) v.add(tok.normalized);
  }
  v.freeze();
  return v;
}

std::vector<std::size_t> word_indices(const Sentence& sentence, const WordVocab& vocab) {
  std::vector<std::size_t> out;
  out.reserve(sentence.tokens.size());
  for (const auto& tok : sentence.tokens) out.push_back(vocab.index_of(tok.normalized));
  return out;
}

Matrix forward(const BilstmParams& params, std::span<const std::size_t> words) {
  return run_forward(params, words).probs;
}

Matrix forward(const BilstmParams& params, const Sentence& sentence,
               const WordVocab& vocab) {
  const auto words = word_indices(sentence, vocab);
  return forward(params, words);
}

LossAndGrad loss_and_grad(const BilstmParams& params,
                          std::span<const std::size_t> words,
                          std::span<const BioLabel> gold, double l2_lambda) {
  if (words.size() != gold.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "gold has " + std::to_string(gold.size()) + " labels for " +
                    std::to_string(words.size()) + " tokens");
  }
  const ForwardPass pass = run_forward(params, words);
  const auto T = static_cast<Eigen::Index>(words.size());
  const int H = params.hidden();
  const double inv_t = 1.0 / static_cast<double>(T);

  LossAndGrad out;
  out.grad = BilstmParams::zeros(params.vocab_size(), params.dim(), H);
  out.loss = 0.0;

  std::vector<Vector> dh_fwd(static_cast<std::size_t>(T));
  std::vector<Vector> dh_bwd(static_cast<std::size_t>(T));
  for (Eigen::Index t = 0; t < T; ++t) {
    const int y = label_index(gold[static_cast<std::size_t>(t)]);
    out.loss -= std::log(pass.probs(t, y)) * inv_t;
    Vector dlogits = pass.probs.row(t).transpose() * inv_t;
    dlogits(y) -= inv_t;
    out.grad.projection += pass.features.col(t) * dlogits.transpose();
    out.grad.projection_bias += dlogits;
    const Vector dfeat = params.projection * dlogits;
    dh_fwd[static_cast<std::size_t>(t)] = dfeat.head(H);
    dh_bwd[static_cast<std::size_t>(t)] = dfeat.tail(H);
  }

  backprop_cell(params.forward_cell, pass.fwd, dh_fwd, words, false,
                out.grad.forward_cell, out.grad.embeddings);
  backprop_cell(params.backward_cell, pass.bwd, dh_bwd, words, true,
                out.grad.backward_cell, out.grad.embeddings);

  if (l2_lambda != 0.0) {
    out.loss += 0.5 * l2_lambda * params.squared_norm();
    auto g = out.grad.tensors();
    auto p = params.tensors();
    for (std::size_t k = 0; k < g.size(); ++k) *g[k].second += l2_lambda * *p[k].second;
  }
  return out;
}

double loss(const BilstmParams& params, std::span<const std::size_t> words,
            std::span<const BioLabel> gold) {
  if (words.size() != gold.size()) {
    throw Error(ErrorCode::kLengthMismatch, "gold length differs from tokens");
  }
  const Matrix probs = forward(params, words);
  double l = 0.0;
  for (std::size_t t = 0; t < gold.size(); ++t) {
    l -= std::log(probs(static_cast<Eigen::Index>(t), label_index(gold[t])));
  }
  return l / static_cast<double>(gold.size());
}

std::vector<BioLabel> predict(const BilstmParams& params,
                              std::span<const std::size_t> words) {
  if (words.empty()) return {};
  const Matrix probs = forward(params, words);
  std::vector<BioLabel> out;
  out.reserve(words.size());
  for (Eigen::Index t = 0; t < probs.rows(); ++t) {
    int best = 0;
    for (int l = 1; l < kLabelCount; ++l) {
      if (probs(t, l) > probs(t, best)) best = l;
    }
    out.push_back(label_from_index(best));
  }
  return out;
}

double clip_gradient(BilstmParams& grad, double max_norm) {
  const double norm = std::sqrt(grad.squared_norm());
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (auto& [name, m] : grad.tensors()) *m *= scale;
  }
  return norm;
}

void sgd_step(BilstmParams& params, const BilstmParams& grad, double lr) {
  auto p = params.tensors();
  auto g = grad.tensors();
  for (std::size_t k = 0; k < p.size(); ++k) *p[k].second -= lr * *g[k].second;
}

std::vector<Instance> make_instances(std::span<const LabeledSentence> corpus,
                                     const WordVocab& vocab) {
  std::vector<Instance> out;
  out.reserve(corpus.size());
  for (const auto& ls : corpus) {
    if (ls.labels.size() != ls.sentence.tokens.size()) {
      throw Error(ErrorCode::kLengthMismatch,
                  "sentence " + ls.source_id + " label count differs from tokens");
    }
    out.push_back({word_indices(ls.sentence, vocab), ls.labels});
  }
  return out;
}

Embeddings parse_embeddings(std::string_view content) {
  std::vector<std::string> words;
  std::vector<std::vector<double>> rows;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  std::size_t at = 0;
  while (at < content.size()) {
    std::size_t nl = content.find('\n', at);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(at, nl - at);
    at = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto fields = split_spaces(line);
    if (fields.empty()) continue;
    if (line_no == 1 && fields.size() == 2 && is_integer(fields[0]) &&
        is_integer(fields[1])) {
      continue;  // "V D" header
    }
    if (fields.size() < 2) {
      throw Error(ErrorCode::kBadFormat,
                  "embedding line " + std::to_string(line_no) + ": no vector values");
    }
    const std::size_t d = fields.size() - 1;
    if (dim == 0) dim = d;
    if (d != dim) {
      throw Error(ErrorCode::kBadFormat,
                  "embedding line " + std::to_string(line_no) + ": dimension " +
                      std::to_string(d) + ", expected " + std::to_string(dim));
    }
    std::vector<double> row;
    row.reserve(d);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      row.push_back(parse_double(fields[k], line_no));
    }
    words.emplace_back(fields[0]);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::kEmptyFile, "embedding file has no vectors");

  Embeddings e;
  std::vector<std::size_t> row_of;  // vocab index -> file row, per entry
  for (std::size_t r = 0; r < words.size(); ++r) {
    const std::string key = normalize(words[r]);
    if (e.vocab.contains(key)) continue;  // first occurrence wins
    e.vocab.add(key);
    row_of.push_back(r);
  }
  e.vocab.freeze();
  e.vectors = Matrix::Zero(static_cast<Eigen::Index>(e.vocab.size()),
                           static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < row_of.size(); ++k) {
    for (std::size_t d = 0; d < dim; ++d) {
      e.vectors(static_cast<Eigen::Index>(k + 1), static_cast<Eigen::Index>(d)) =
          rows[row_of[k]][d];
    }
  }
  for (const auto& row : rows) {
    for (std::size_t d = 0; d < dim; ++d) e.vectors(0, static_cast<Eigen::Index>(d)) += row[d];
  }
  e.vectors.row(0) /= static_cast<double>(rows.size());
  return e;
}

Embeddings load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_embeddings(buf.str());
}

}  // namespace wazobia::bilstm
