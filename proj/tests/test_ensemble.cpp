#include <doctest.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <random>

#include "malvis/ensemble.hpp"
#include "malvis/error.hpp"
#include "support/fixtures.hpp"

using namespace malvis;
using malvis::testing::TempDir;

namespace {

PredictionMatrix make_model(std::string id,
                            std::vector<std::vector<double>> probs,
                            std::vector<int> labels = {}) {
  PredictionMatrix m;
  m.model_id = std::move(id);
  if (labels.empty()) labels.assign(probs.size(), 0);
  m.labels = std::move(labels);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    m.sample_ids.push_back("s" + std::to_string(i));
  }
  m.probs = std::move(probs);
  return m;
}

std::vector<PredictionMatrix> random_models(std::mt19937_64& engine,
                                            std::size_t m, std::size_t n,
                                            std::size_t k) {
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<int>(engine() % k);
  }
  std::vector<PredictionMatrix> models;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<std::vector<double>> probs(n, std::vector<double>(k));
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0;
      for (std::size_t c = 0; c < k; ++c) {
        probs[i][c] = static_cast<double>(engine() % 19) + 1.0;
        sum += probs[i][c];
      }
      for (std::size_t c = 0; c < k; ++c) probs[i][c] /= sum;
    }
    models.push_back(make_model("m" + std::to_string(j), std::move(probs), labels));
  }
  return models;
}

}  // namespace

TEST_CASE("average_voting worked examples") {
  const auto models = std::vector<PredictionMatrix>{
      make_model("a", {{0.9, 0.1}, {0.6, 0.4}, {0.5, 0.5}}),
      make_model("b", {{0.8, 0.2}, {0.1, 0.9}, {0.5, 0.5}}),
  };
  const EnsembleResult result = average_voting(models);
  CHECK(result.predictions == std::vector<int>{0, 1, 0});  // tie breaks low
  CHECK(result.scores[1][0] == doctest::Approx(0.35));
  CHECK(result.scores[1][1] == doctest::Approx(0.65));
}

TEST_CASE("majority_voting modal class and probability tie-break") {
  const auto models = std::vector<PredictionMatrix>{
      make_model("a", {{0.9, 0.1}, {0.55, 0.45}}),
      make_model("b", {{0.8, 0.2}, {0.35, 0.65}}),
      make_model("c", {{0.3, 0.7}, {0.55, 0.45}}),
  };
  // Sample 0: votes {0,0,1} -> 0. Sample 1: votes {0,1,0} -> 0.
  CHECK(majority_voting(models).predictions == std::vector<int>{0, 0});

  // Two-model vote tie: summed probabilities decide (0.9 vs 1.1 -> class 1).
  const auto tie = std::vector<PredictionMatrix>{
      make_model("a", {{0.6, 0.4}}),
      make_model("b", {{0.3, 0.7}}),
  };
  CHECK(majority_voting(tie).predictions == std::vector<int>{1});

  // Unanimous single vote set.
  const auto solo = std::vector<PredictionMatrix>{make_model("a", {{0.2, 0.8}})};
  CHECK(majority_voting(solo).predictions == std::vector<int>{1});
}

TEST_CASE("weighted_voting worked example and degenerate weights") {
  const auto models = std::vector<PredictionMatrix>{
      make_model("a", {{0.6, 0.4}}),
      make_model("b", {{0.2, 0.8}}),
  };
  const std::vector<double> weights{2.0, 1.0};
  const EnsembleResult result = weighted_voting(models, weights);
  CHECK(result.predictions == std::vector<int>{1});
  CHECK(result.scores[0][0] == doctest::Approx(0.466667).epsilon(1e-4));
  CHECK(result.scores[0][1] == doctest::Approx(0.533333).epsilon(1e-4));

  std::mt19937_64 engine(17);
  const auto random = random_models(engine, 3, 25, 3);
  const std::vector<double> equal{1.0, 1.0, 1.0};
  CHECK(weighted_voting(random, equal).predictions ==
        average_voting(random).predictions);

  const std::vector<double> one_hot{0.0, 1.0, 0.0};
  const EnsembleResult solo = weighted_voting(random, one_hot);
  const auto only = std::vector<PredictionMatrix>{random[1]};
  CHECK(solo.predictions == average_voting(only).predictions);

  CHECK_THROWS_AS(weighted_voting(random, std::vector<double>{1.0}), Error);
  CHECK_THROWS_AS(weighted_voting(random, std::vector<double>{0, 0, 0}), Error);
}

TEST_CASE("rank_weights_from_accuracy ranks best to worst") {
  const std::vector<double> acc{0.71, 0.93, 0.88};
  const std::vector<double> weights = rank_weights_from_accuracy(acc);
  // Ranks: m1 best (3), m2 second (2), m0 worst (1); normalized by 6.
  CHECK(weights[0] == doctest::Approx(1.0 / 6.0));
  CHECK(weights[1] == doctest::Approx(3.0 / 6.0));
  CHECK(weights[2] == doctest::Approx(2.0 / 6.0));
  CHECK_THROWS_AS(rank_weights_from_accuracy({}), Error);
}

TEST_CASE("min_confidence_voting filters by top-class probability") {
  const auto models = std::vector<PredictionMatrix>{
      make_model("a", {{0.9, 0.1}}),   // max 0.9: qualifies
      make_model("b", {{0.45, 0.55}}), // max 0.55: filtered out
      make_model("c", {{0.3, 0.7}}),   // max 0.7: qualifies
  };
  const EnsembleResult result = min_confidence_voting(models, 0.60);
  // Mean of models a and c only: (0.6, 0.4).
  CHECK(result.predictions == std::vector<int>{0});
  CHECK(result.scores[0][0] == doctest::Approx(0.6));
  CHECK(result.scores[0][1] == doctest::Approx(0.4));

  // A quorum of one confident model overrides three hesitant dissenters,
  // flipping the decision relative to plain averaging.
  const auto quorum = std::vector<PredictionMatrix>{
      make_model("q", {{0.61, 0.39}}),
      make_model("f1", {{0.41, 0.59}}),
      make_model("f2", {{0.41, 0.59}}),
      make_model("f3", {{0.41, 0.59}}),
  };
  CHECK(min_confidence_voting(quorum, 0.60).predictions == std::vector<int>{0});
  CHECK(average_voting(quorum).predictions == std::vector<int>{1});

  std::mt19937_64 engine(41);
  const auto random = random_models(engine, 4, 30, 3);
  CHECK(min_confidence_voting(random, 0.0).predictions ==
        average_voting(random).predictions);
  // Threshold above every confidence: the fallback averages all models.
  CHECK(min_confidence_voting(random, 1.0).predictions ==
        average_voting(random).predictions);
}

TEST_CASE("soft_voting decisions are identical to average_voting") {
  std::mt19937_64 engine(4242);
  for (int trial = 0; trial < 200; ++trial) {
    const auto models =
        random_models(engine, 2 + engine() % 4, 1 + engine() % 30,
                      2 + engine() % 4);
    CHECK(soft_voting(models).predictions == average_voting(models).predictions);
  }
  const auto solo = std::vector<PredictionMatrix>{
      make_model("a", {{0.2, 0.8}, {0.7, 0.3}})};
  CHECK(soft_voting(solo).predictions == std::vector<int>{1, 0});
}

TEST_CASE("median_voting central values") {
  const auto odd = std::vector<PredictionMatrix>{
      make_model("a", {{0.1, 0.9}}),
      make_model("b", {{0.5, 0.5}}),
      make_model("c", {{0.9, 0.1}}),
  };
  const EnsembleResult med = median_voting(odd);
  CHECK(med.scores[0][0] == 0.5);
  CHECK(med.scores[0][1] == 0.5);
  CHECK(med.predictions == std::vector<int>{0});  // tie to lowest

  const auto even = std::vector<PredictionMatrix>{
      make_model("a", {{0.2, 0.8}}),
      make_model("b", {{0.4, 0.6}}),
  };
  CHECK(median_voting(even).scores[0][0] == doctest::Approx(0.3));
}

TEST_CASE("median_voting resists a single adversarial model") {
  // Two agreeing models with class-0 probability > 0.5; the third model
  // sweeps the whole grid and must never flip the decision.
  for (double a1 = 0.55; a1 <= 0.95; a1 += 0.05) {
    for (double a2 = 0.55; a2 <= 0.95; a2 += 0.05) {
      for (double adv = 0.0; adv <= 1.0; adv += 0.05) {
        const auto models = std::vector<PredictionMatrix>{
            make_model("a", {{a1, 1.0 - a1}}),
            make_model("b", {{a2, 1.0 - a2}}),
            make_model("x", {{adv, 1.0 - adv}}),
        };
        REQUIRE(median_voting(models).predictions[0] == 0);
      }
    }
  }
}

TEST_CASE("rank_voting Borda arithmetic") {
  // Rankings (A>B>C) and (B>A>C): A gets 2+1, B gets 1+2, C gets 0 -> tie -> A.
  const auto models = std::vector<PredictionMatrix>{
      make_model("a", {{0.5, 0.3, 0.2}}),
      make_model("b", {{0.3, 0.5, 0.2}}),
  };
  const EnsembleResult result = rank_voting(models);
  CHECK(result.predictions == std::vector<int>{0});
  // Scores normalize Borda points (3+3+0) by M*K(K-1)/2 = 6.
  CHECK(result.scores[0][0] == doctest::Approx(0.5));
  CHECK(result.scores[0][1] == doctest::Approx(0.5));
  CHECK(result.scores[0][2] == doctest::Approx(0.0));

  // Unanimous rankings elect the shared top class.
  const auto unanimous = std::vector<PredictionMatrix>{
      make_model("a", {{0.2, 0.5, 0.3}}),
      make_model("b", {{0.1, 0.6, 0.3}}),
      make_model("c", {{0.25, 0.4, 0.35}}),
  };
  CHECK(rank_voting(unanimous).predictions == std::vector<int>{1});

  // Tied probabilities share the mean of their positions' points.
  const auto tied = std::vector<PredictionMatrix>{
      make_model("a", {{0.4, 0.3, 0.3}}),
  };
  const EnsembleResult shared = rank_voting(tied);
  CHECK(shared.scores[0][0] == doctest::Approx(2.0 / 3.0));
  CHECK(shared.scores[0][1] == doctest::Approx(0.5 / 3.0));
  CHECK(shared.scores[0][2] == doctest::Approx(0.5 / 3.0));
}

TEST_CASE("a Borda winner can disagree with the majority winner") {
  // Brute-force search over 3-model profiles built from permuted templates.
  const std::vector<std::vector<double>> templates{
      {0.5, 0.3, 0.2}, {0.9, 0.06, 0.04}, {0.4, 0.35, 0.25}};
  std::vector<std::array<int, 3>> perms;
  std::array<int, 3> p{0, 1, 2};
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));

  int disagreements = 0;
  for (const auto& pa : perms) {
    for (const auto& pb : perms) {
      for (const auto& pc : perms) {
        auto permute = [](const std::vector<double>& t,
                          const std::array<int, 3>& perm) {
          std::vector<double> row(3);
          for (int c = 0; c < 3; ++c) row[perm[c]] = t[c];
          return row;
        };
        const auto models = std::vector<PredictionMatrix>{
            make_model("a", {permute(templates[0], pa)}),
            make_model("b", {permute(templates[1], pb)}),
            make_model("c", {permute(templates[2], pc)}),
        };
        if (rank_voting(models).predictions != majority_voting(models).predictions) {
          ++disagreements;
        }
      }
    }
  }
  CHECK(disagreements > 0);
}

TEST_CASE("voting is invariant under model permutation (weighted excepted)") {
  std::mt19937_64 engine(777);
  const auto models = random_models(engine, 4, 20, 3);
  auto reversed = models;
  std::reverse(reversed.begin(), reversed.end());

  CHECK(average_voting(models).predictions == average_voting(reversed).predictions);
  CHECK(majority_voting(models).predictions == majority_voting(reversed).predictions);
  CHECK(median_voting(models).predictions == median_voting(reversed).predictions);
  CHECK(rank_voting(models).predictions == rank_voting(reversed).predictions);
  CHECK(min_confidence_voting(models, 0.6).predictions ==
        min_confidence_voting(reversed, 0.6).predictions);
}

TEST_CASE("scaling rows by a common constant never changes decisions") {
  std::mt19937_64 engine(31);
  auto models = random_models(engine, 3, 25, 4);
  const std::vector<int> before = average_voting(models).predictions;
  const std::vector<int> before_rank = rank_voting(models).predictions;
  for (PredictionMatrix& m : models) {
    for (auto& row : m.probs) {
      for (double& v : row) v *= 3.5;
    }
  }
  CHECK(average_voting(models).predictions == before);
  CHECK(rank_voting(models).predictions == before_rank);
}

TEST_CASE("stacking learns a separable meta-problem") {
  // Base predictions are perfectly informative: label 1 samples get high
  // class-1 probability from both models.
  std::vector<std::vector<double>> probs_a, probs_b;
  std::vector<int> labels;
  for (int i = 0; i < 24; ++i) {
    const int label = i % 2;
    labels.push_back(label);
    probs_a.push_back(label == 1 ? std::vector<double>{0.2, 0.8}
                                 : std::vector<double>{0.7, 0.3});
    probs_b.push_back(label == 1 ? std::vector<double>{0.35, 0.65}
                                 : std::vector<double>{0.8, 0.2});
  }
  const auto val = std::vector<PredictionMatrix>{
      make_model("a", probs_a, labels), make_model("b", probs_b, labels)};

  const StackModel model = stack_train(val);
  const EnsembleResult on_train = stack_predict(model, val);
  int correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    correct += on_train.predictions[i] == labels[i] ? 1 : 0;
  }
  CHECK(correct == 24);

  // Determinism: same seed and data reproduce identical scores.
  const StackModel again = stack_train(val);
  CHECK(stack_predict(again, val).scores == on_train.scores);

  StackParams other;
  other.seed = 7;
  const StackModel different = stack_train(val, other);
  CHECK(stack_predict(different, val).scores != on_train.scores);
}

TEST_CASE("stacking guards") {
  const StackModel untrained;
  const auto models = std::vector<PredictionMatrix>{
      make_model("a", {{0.5, 0.5}})};
  CHECK_THROWS_AS(stack_predict(untrained, models), Error);
  try {
    stack_predict(untrained, models);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotTrained);
  }

  std::mt19937_64 engine(5);
  const auto val = random_models(engine, 2, 12, 3);
  const StackModel trained = stack_train(val);
  const auto wrong = random_models(engine, 3, 12, 3);  // M*K mismatch
  CHECK_THROWS_AS(stack_predict(trained, wrong), Error);
  try {
    stack_predict(trained, wrong);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("load_predictions parses and validates the CSV format") {
  TempDir dir;
  {
    std::ofstream out(dir / "model.csv");
    out << "sample_id,label,p0,p1\n";
    out << "s0,0,0.9,0.1\n";
    out << "s1,1,0.2,0.8\n";
    out << "s2,0,0.6,0.4\n";
  }
  const PredictionMatrix m = load_predictions(dir / "model.csv");
  CHECK(m.model_id == "model");
  CHECK(m.num_samples() == 3);
  CHECK(m.num_classes() == 2);
  CHECK(m.labels == std::vector<int>{0, 1, 0});
  CHECK(m.probs[0][0] == doctest::Approx(0.9));

  {
    std::ofstream out(dir / "bad_sum.csv");
    out << "sample_id,label,p0,p1\n";
    out << "s0,0,0.9,0.3\n";
  }
  CHECK_THROWS_AS(load_predictions(dir / "bad_sum.csv"), Error);
  try {
    load_predictions(dir / "bad_sum.csv");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RowNotNormalized);
  }

  {
    std::ofstream out(dir / "ragged.csv");
    out << "sample_id,label,p0,p1\n";
    out << "s0,0,0.9,0.05,0.05\n";
  }
  try {
    load_predictions(dir / "ragged.csv");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InconsistentK);
  }

  {
    std::ofstream out(dir / "header.csv");
    out << "id,truth,p0,p1\ns0,0,1,0\n";
  }
  CHECK_THROWS_AS(load_predictions(dir / "header.csv"), Error);

  // Row sums within the 1e-3 gate are renormalized to exactly 1.
  {
    std::ofstream out(dir / "near.csv");
    out << "sample_id,label,p0,p1\n";
    out << "s0,0,0.8995,0.1\n";
  }
  const PredictionMatrix near = load_predictions(dir / "near.csv");
  CHECK(near.probs[0][0] + near.probs[0][1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("require_aligned rejects mismatched sample order") {
  auto a = make_model("a", {{0.9, 0.1}, {0.2, 0.8}}, {0, 1});
  auto b = a;
  b.model_id = "b";
  std::swap(b.sample_ids[0], b.sample_ids[1]);
  const auto models = std::vector<PredictionMatrix>{a, b};
  CHECK_THROWS_AS(require_aligned(models), Error);
  try {
    require_aligned(models);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AlignmentError);
  }
}
