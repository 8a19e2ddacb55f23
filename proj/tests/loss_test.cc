// Copyright 2026 The imgvec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "imgvec/training.h"
#include "test_util.h"

namespace imgvec {
namespace {

using testing::MakeProblem;
using testing::ProblemSpec;

// Lookup model where query q and image q are the basis vector e_q.
Model IdentityModel(size_t b) {
  Model m;
  m.tower = TowerKind::kLookup;
  m.embeddings = Matrix::Identity(b, b);
  m.lookup.vectors = Matrix::Identity(b, b);
  return m;
}

std::vector<TrainingExample> Diagonal(size_t b) {
  std::vector<TrainingExample> ex(b);
  for (size_t i = 0; i < b; ++i) {
    ex[i].tokens = {TokenId(i)};
    ex[i].image = i;
    ex[i].weight = 1.0;
  }
  return ex;
}

TEST(BatchLossTest, SingletonBatchIsZero) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    ProblemSpec spec;
    spec.batch_size = 1;
    auto p = MakeProblem(spec, seed);
    p.examples[0].weight = 1.0;
    const LossReport r = BatchLoss(p.model, p.batch(), 1.0);
    EXPECT_EQ(r.mean_weighted_loss, 0.0);
    EXPECT_EQ(BatchLossBruteforce(p.model, p.batch(), 1.0), 0.0);
  }
}

TEST(BatchLossTest, EqualLogitsGiveLogB) {
  Model m;
  m.tower = TowerKind::kLookup;
  m.embeddings = Matrix::Ones(1, 3);
  m.lookup.vectors = Matrix::Ones(1, 3);
  std::vector<TrainingExample> ex(4, TrainingExample{{TokenId(0)}, 0, 1.0});
  const LossReport r = BatchLoss(m, Batch{ex, nullptr}, 1.0);
  for (double loss : r.example_losses) {
    EXPECT_NEAR(loss, std::log(4.0), 1e-12);
  }
  EXPECT_NEAR(r.mean_weighted_loss, 1.3862943611198906, 1e-12);
}

TEST(BatchLossTest, TwoByTwoIdentityLogits) {
  const Model m = IdentityModel(2);
  const auto ex = Diagonal(2);
  const LossReport r = BatchLoss(m, Batch{ex, nullptr}, 1.0);
  EXPECT_EQ(r.logits, Matrix::Identity(2, 2));
  // log(1 + e^-1)
  EXPECT_NEAR(r.mean_weighted_loss, 0.31326168751822286, 1e-15);
}

TEST(BatchLossTest, LogitScaleMultipliesCosines) {
  const Model m = IdentityModel(3);
  const auto ex = Diagonal(3);
  const LossReport r = BatchLoss(m, Batch{ex, nullptr}, 10.0);
  EXPECT_EQ(r.logits, 10.0 * Matrix::Identity(3, 3));
  EXPECT_NEAR(r.mean_weighted_loss, std::log(1 + 2 * std::exp(-10.0)), 1e-15);
}

TEST(BatchLossTest, LogitsBoundedByScale) {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    auto p = MakeProblem(ProblemSpec{}, seed);
    const LossReport r = BatchLoss(p.model, p.batch(), 3.0);
    EXPECT_LE(r.logits.cwiseAbs().maxCoeff(), 3.0 + 1e-12);
  }
}

TEST(BatchLossTest, Errors) {
  auto p = MakeProblem(ProblemSpec{}, 1);
  EXPECT_THROW(BatchLoss(p.model, Batch{{}, &p.features}, 1.0),
               std::invalid_argument);
  auto empty = p.examples;
  empty[2].tokens.clear();
  EXPECT_THROW(BatchLoss(p.model, Batch{empty, &p.features}, 1.0),
               std::invalid_argument);
  auto negative = p.examples;
  negative[0].weight = -1.0;
  EXPECT_THROW(BatchLoss(p.model, Batch{negative, &p.features}, 1.0),
               std::invalid_argument);
  Model broken = p.model;
  broken.mlp.U(0, 0) = std::nan("");
  EXPECT_THROW(BatchLoss(broken, p.batch(), 1.0), std::domain_error);
  broken = p.model;
  broken.embeddings(p.examples[0].tokens[0].value, 0) = INFINITY;
  EXPECT_THROW(BatchLoss(broken, p.batch(), 1.0), std::domain_error);
  EXPECT_THROW(BatchLoss(p.model, Batch{p.examples, nullptr}, 1.0),
               std::invalid_argument);
  EXPECT_THROW(BatchLoss(p.model, p.batch(), 0.0), std::invalid_argument);
}

TEST(BatchLossTest, ZeroNormImageGivesZeroLogit) {
  ProblemSpec spec;
  spec.tower = TowerKind::kLookup;
  auto p = MakeProblem(spec, 4);
  p.model.lookup.vectors.row(p.examples[0].image).setZero();
  const LossReport r = BatchLoss(p.model, p.batch(), 1.0);
  for (Eigen::Index q = 0; q < r.logits.rows(); ++q) {
    EXPECT_EQ(r.logits(q, 0), 0.0);
  }
  EXPECT_NEAR(r.mean_weighted_loss,
              BatchLossBruteforce(p.model, p.batch(), 1.0), 1e-12);
}

TEST(BatchLossProperty, MatchesBruteforce) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    ProblemSpec spec;
    spec.tower = trial % 2 ? TowerKind::kMlp : TowerKind::kLookup;
    spec.batch_size = 1 + rng() % 64;
    spec.num_images = 1 + rng() % 70;
    const double scale = trial % 3 == 0 ? 1.0 : 10.0;
    auto p = MakeProblem(spec, trial + 1);
    EXPECT_NEAR(BatchLoss(p.model, p.batch(), scale).mean_weighted_loss,
                BatchLossBruteforce(p.model, p.batch(), scale), 1e-9);
  }
}

TEST(BatchLossProperty, NonNegativeAndPositiveForLargerBatches) {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    ProblemSpec spec;
    spec.batch_size = 2 + seed % 10;
    auto p = MakeProblem(spec, seed);
    for (auto &ex : p.examples) ex.weight = 1.0;
    const LossReport r = BatchLoss(p.model, p.batch(), 5.0);
    for (double loss : r.example_losses) EXPECT_GT(loss, 0.0);
  }
}

TEST(BatchLossProperty, WeightLinearity) {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    auto p = MakeProblem(ProblemSpec{}, seed);
    const LossReport base = BatchLoss(p.model, p.batch(), 2.0);
    auto doubled = p.examples;
    doubled[3].weight *= 2.0;
    const LossReport r = BatchLoss(p.model, Batch{doubled, &p.features}, 2.0);
    EXPECT_EQ(r.example_losses[3], 2.0 * base.example_losses[3]);
    for (size_t i = 0; i < r.example_losses.size(); ++i) {
      if (i != 3) EXPECT_EQ(r.example_losses[i], base.example_losses[i]);
    }
  }
}

TEST(BatchLossProperty, ShiftStability) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> logit(-10.0, 10.0);
  std::uniform_real_distribution<double> shift(-100.0, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> row(1 + rng() % 20);
    for (double &x : row) x = logit(rng);
    const size_t target = rng() % row.size();
    const double base = SoftmaxCrossEntropy(row, target);
    const double c = shift(rng);
    for (double &x : row) x += c;
    EXPECT_NEAR(SoftmaxCrossEntropy(row, target), base, 1e-12);
  }
}

TEST(BatchLossProperty, PermutationEquivariance) {
  std::mt19937_64 rng(12);
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    auto p = MakeProblem(ProblemSpec{}, seed);
    const LossReport base = BatchLoss(p.model, p.batch(), 4.0);
    std::vector<size_t> perm(p.examples.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<TrainingExample> permuted;
    for (size_t i : perm) permuted.push_back(p.examples[i]);
    const LossReport r = BatchLoss(p.model, Batch{permuted, &p.features}, 4.0);
    for (size_t i = 0; i < perm.size(); ++i) {
      EXPECT_NEAR(r.example_losses[i], base.example_losses[perm[i]], 1e-12);
    }
    EXPECT_NEAR(r.mean_weighted_loss, base.mean_weighted_loss, 1e-12);
  }
}

}  // namespace
}  // namespace imgvec
