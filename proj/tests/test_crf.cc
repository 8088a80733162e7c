#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.h"
#include "wazobia/crf.h"
#include "wazobia/error.h"
#include "wazobia/rng.h"

using namespace wazobia;
using namespace wazobia::crf;

namespace {

struct RandomLattice {
  Lattice lattice;
  std::vector<std::vector<double>> node;
  std::vector<std::vector<double>> edge;
};

RandomLattice random_lattice(SplitMix64& rng, int t_len, int labels, double scale) {
  RandomLattice r;
  r.lattice.node_scores = Matrix(t_len, labels);
  r.lattice.edge_scores = Matrix(labels, labels);
  r.node.assign(t_len, std::vector<double>(labels));
  r.edge.assign(labels, std::vector<double>(labels));
  for (int t = 0; t < t_len; ++t) {
    for (int l = 0; l < labels; ++l) {
      r.node[t][l] = r.lattice.node_scores(t, l) = rng.uniform(-scale, scale);
    }
  }
  for (int a = 0; a < labels; ++a) {
    for (int b = 0; b < labels; ++b) {
      r.edge[a][b] = r.lattice.edge_scores(a, b) = rng.uniform(-scale, scale);
    }
  }
  return r;
}

std::vector<FeatureVector> random_features(SplitMix64& rng, std::size_t len,
                                           std::size_t feature_count) {
  std::vector<FeatureVector> out(len);
  for (auto& fv : out) {
    for (std::uint32_t f = 0; f < feature_count; ++f) {
      if (rng.uniform() < 0.4) fv.push_back(f);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("inference matches exhaustive enumeration") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int t_len = 1 + static_cast<int>(rng.uniform_below(4));
    const int labels = 1 + static_cast<int>(rng.uniform_below(5));
    const RandomLattice r = random_lattice(rng, t_len, labels, 3.0);
    const testing::Enumerated want = testing::enumerate_lattice(r.node, r.edge);

    CHECK(std::abs(log_forward(r.lattice).log_z - want.log_z) <= 1e-9);
    const Marginals m = marginals(r.lattice);
    CHECK(std::abs(m.log_z - want.log_z) <= 1e-9);
    for (int t = 0; t < t_len; ++t) {
      for (int l = 0; l < labels; ++l) CHECK(std::abs(m.node(t, l) - want.node[t][l]) <= 1e-9);
    }
    REQUIRE(m.edge.size() == static_cast<std::size_t>(t_len - 1));
    for (int t = 0; t + 1 < t_len; ++t) {
      for (int a = 0; a < labels; ++a) {
        for (int b = 0; b < labels; ++b) {
          CHECK(std::abs(m.edge[t](a, b) - want.edge[t][a][b]) <= 1e-9);
        }
      }
    }
    const ViterbiResult v = viterbi(r.lattice);
    CHECK(v.path == want.best_path);
    CHECK(std::abs(v.score - want.best_score) <= 1e-9);
    CHECK(std::abs(path_score(r.lattice, v.path) - v.score) <= 1e-12);
  }
}

TEST_CASE("backward pass agrees with forward") {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const RandomLattice r = random_lattice(rng, 1 + static_cast<int>(rng.uniform_below(6)), 7, 2.0);
    const ForwardResult fwd = log_forward(r.lattice);
    const Matrix beta = log_backward(r.lattice);
    for (Eigen::Index t = 0; t < fwd.alpha.rows(); ++t) {
      std::vector<double> terms;
      for (Eigen::Index l = 0; l < fwd.alpha.cols(); ++l) terms.push_back(fwd.alpha(t, l) + beta(t, l));
      CHECK(logsumexp(terms) == doctest::Approx(fwd.log_z).epsilon(1e-12));
    }
  }
}

TEST_CASE("viterbi breaks ties toward lower label indices") {
  Lattice flat;
  flat.node_scores = Matrix::Zero(4, 7);
  flat.edge_scores = Matrix::Zero(7, 7);
  const ViterbiResult v = viterbi(flat);
  CHECK(v.path == std::vector<int>{0, 0, 0, 0});
  CHECK(v.score == 0.0);
}

TEST_CASE("empty lattice is an error") {
  Lattice empty;
  empty.node_scores = Matrix(0, 7);
  empty.edge_scores = Matrix::Zero(7, 7);
  try {
    log_forward(empty);
    FAIL("expected EMPTY_SEQUENCE");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptySequence);
  }
}

TEST_CASE("logsumexp handles -inf and large values") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(logsumexp(std::vector<double>{-inf, -inf}) == -inf);
  CHECK(logsumexp(std::vector<double>{1000.0, 1000.0}) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(logsumexp(std::vector<double>{-inf, 0.0}) == 0.0);
}

TEST_CASE("hard BIO constraints forbid invalid transitions at decode time") {
  Lattice lat;
  lat.node_scores = Matrix::Zero(2, 7);
  lat.edge_scores = Matrix::Zero(7, 7);
  // Strongly prefer O then I-PER, which BIO forbids.
  lat.node_scores(0, 0) = 5.0;
  lat.node_scores(1, label_index(BioLabel::kIPer)) = 5.0;
  const ViterbiResult soft = viterbi(lat);
  CHECK(soft.path == std::vector<int>{0, label_index(BioLabel::kIPer)});
  apply_bio_constraints(lat);
  const ViterbiResult hard = viterbi(lat);
  CHECK(is_valid_bio(to_labels(hard.path)));
}

TEST_CASE("NLL gradient matches central differences") {
  SplitMix64 rng(99);
  for (int instance = 0; instance < 20; ++instance) {
    const std::size_t feature_count = 4;
    CrfParams p = CrfParams::zeros(feature_count, 7);
    for (Eigen::Index i = 0; i < p.emission.size(); ++i) p.emission.data()[i] = rng.uniform(-1, 1);
    for (Eigen::Index i = 0; i < p.transition.size(); ++i) p.transition.data()[i] = rng.uniform(-1, 1);
    const std::size_t len = 1 + rng.uniform_below(4);
    const auto features = random_features(rng, len, feature_count);
    std::vector<BioLabel> gold(len);
    for (auto& g : gold) g = label_from_index(static_cast<int>(rng.uniform_below(7)));
    const double l2 = instance % 2 == 0 ? 0.0 : 0.1;

    const LossAndGrad lg = nll_and_grad(p, features, gold, l2);
    auto objective = [&] { return nll(p, features, gold) + 0.5 * l2 * p.squared_norm(); };
    CHECK(lg.loss == doctest::Approx(objective()).epsilon(1e-12));
    for (Eigen::Index i = 0; i < p.emission.size(); ++i) {
      const double fd = testing::central_difference(objective, p.emission.data()[i], 1e-5);
      CHECK(testing::close(lg.grad.emission.data()[i], fd, 1e-6, 1e-7));
    }
    for (Eigen::Index i = 0; i < p.transition.size(); ++i) {
      const double fd = testing::central_difference(objective, p.transition.data()[i], 1e-5);
      CHECK(testing::close(lg.grad.transition.data()[i], fd, 1e-6, 1e-7));
    }
  }
}

TEST_CASE("NLL is non-negative and zero parameters give T ln 7 for any gold") {
  const CrfParams p = CrfParams::zeros(3, 7);
  const std::vector<FeatureVector> features{{0}, {1, 2}, {}};
  const std::vector<BioLabel> gold{BioLabel::kBLoc, BioLabel::kILoc, BioLabel::kO};
  CHECK(nll(p, features, gold) == doctest::Approx(3 * std::log(7.0)).epsilon(1e-12));
  SplitMix64 rng(1);
  CrfParams q = CrfParams::zeros(3, 7);
  for (Eigen::Index i = 0; i < q.emission.size(); ++i) q.emission.data()[i] = rng.uniform(-4, 4);
  CHECK(nll(q, features, gold) >= 0.0);
}

TEST_CASE("nll_and_grad checks lengths") {
  const CrfParams p = CrfParams::zeros(2, 7);
  const std::vector<FeatureVector> features{{0}, {1}};
  const std::vector<BioLabel> gold{BioLabel::kO};
  try {
    nll_and_grad(p, features, gold, 0.0);
    FAIL("expected LENGTH_MISMATCH");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kLengthMismatch);
  }
}

TEST_CASE("label index conversion round trips") {
  const std::vector<BioLabel> labels{BioLabel::kO, BioLabel::kBOrg, BioLabel::kIOrg, BioLabel::kILoc};
  CHECK(to_labels(to_indices(labels)) == labels);
}
