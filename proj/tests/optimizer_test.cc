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

#include <cmath>

#include <gtest/gtest.h>

#include "imgvec/training.h"

namespace imgvec {
namespace {

Model TinyLookup() {
  Model m;
  m.tower = TowerKind::kLookup;
  m.embeddings = Matrix::Zero(3, 2);
  m.lookup.vectors = Matrix::Zero(2, 2);
  return m;
}

TEST(AdagradTest, FirstStepIsLearningRate) {
  Model m = TinyLookup();
  OptimizerState s = InitOptimizer(m, 0.1, 0.0);
  Gradients g;
  g.embeddings[1] = Vector::Constant(2, 2.0);
  AdagradStep(m, g, s);
  // 0 - 0.1 * 2 / sqrt(4)
  EXPECT_DOUBLE_EQ(m.embeddings(1, 0), -0.1);
  EXPECT_DOUBLE_EQ(s.embeddings(1, 0), 4.0);
  AdagradStep(m, g, s);
  // -0.1 - 0.1 * 2 / sqrt(8)
  EXPECT_DOUBLE_EQ(m.embeddings(1, 1), -0.1 - 0.2 / std::sqrt(8.0));
  EXPECT_DOUBLE_EQ(s.embeddings(1, 1), 8.0);
  EXPECT_EQ(m.embeddings.row(0).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(s.embeddings.row(2).cwiseAbs().maxCoeff(), 0.0);
}

TEST(AdagradTest, ZeroGradientLeavesEntryUntouched) {
  Model m = TinyLookup();
  m.embeddings(0, 0) = 0.25;
  OptimizerState s = InitOptimizer(m, 0.5);
  Gradients g;
  g.embeddings[0] = Vector::Zero(2);
  g.embeddings[0](1) = 1.0;
  AdagradStep(m, g, s);
  EXPECT_EQ(m.embeddings(0, 0), 0.25);
  EXPECT_EQ(s.embeddings(0, 0), 0.0);
  EXPECT_NE(m.embeddings(0, 1), 0.0);
}

TEST(AdagradTest, NonFiniteGradientThrowsWithoutChanges) {
  Model m = TinyLookup();
  OptimizerState s = InitOptimizer(m, 0.5);
  Gradients g;
  g.embeddings[0] = Vector::Constant(2, 1.0);
  g.image_vectors[1] = Vector::Constant(2, std::nan(""));
  const Matrix before = m.embeddings;
  EXPECT_THROW(AdagradStep(m, g, s), std::domain_error);
  EXPECT_EQ(m.embeddings, before);
  EXPECT_EQ(s.embeddings.cwiseAbs().maxCoeff(), 0.0);
}

TEST(AdagradTest, DenseMlpBlocks) {
  Model m = InitModel(ModelShape{TowerKind::kMlp, 4, 3, 2, 5, 0}, 1);
  const Model start = m;
  OptimizerState s = InitOptimizer(m, 0.2, 0.0);
  Gradients g;
  g.V = Matrix::Zero(5, 2);
  g.b1 = Vector::Zero(5);
  g.U = Matrix::Zero(3, 5);
  g.b2 = Vector::Zero(3);
  g.V(4, 1) = -3.0;
  g.b2(2) = 0.5;
  AdagradStep(m, g, s);
  EXPECT_DOUBLE_EQ(m.mlp.V(4, 1), start.mlp.V(4, 1) + 0.2);
  EXPECT_DOUBLE_EQ(m.mlp.b2(2), start.mlp.b2(2) - 0.2);
  EXPECT_EQ(m.mlp.U, start.mlp.U);
  EXPECT_DOUBLE_EQ(s.V(4, 1), 9.0);
}

TEST(AdagradProperty, StepMagnitudeNeverExceedsLearningRate) {
  Model m = TinyLookup();
  OptimizerState s = InitOptimizer(m, 0.3);
  for (int t = 1; t <= 50; ++t) {
    Gradients g;
    g.embeddings[2] = Vector::Constant(2, std::sin(t) * t);
    const Matrix before = m.embeddings;
    AdagradStep(m, g, s);
    EXPECT_LE((m.embeddings - before).cwiseAbs().maxCoeff(), 0.3 + 1e-15);
  }
}

}  // namespace
}  // namespace imgvec
