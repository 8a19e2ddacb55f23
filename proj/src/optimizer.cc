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
#include <stdexcept>
#include <string>

#include "imgvec/training.h"

namespace imgvec {

namespace {

// Updates one contiguous block of parameters. Zero-gradient entries keep both
// parameter and accumulator untouched.
template <typename Param, typename Grad, typename Accum>
void UpdateBlock(Param &&param, const Grad &grad, Accum &&accum, double lr,
                 double eps) {
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    const double g = grad(i);
    if (g == 0.0) continue;
    const double sum = accum(i) + g * g;
    param(i) -= lr * g / (std::sqrt(sum) + eps);
    accum(i) = sum;
  }
}

void CheckShape(Eigen::Index got_rows, Eigen::Index got_cols,
                Eigen::Index want_rows, Eigen::Index want_cols,
                const char *name) {
  if (got_rows != want_rows || got_cols != want_cols) {
    throw std::invalid_argument(std::string("gradient shape mismatch for ") +
                                name);
  }
}

}  // namespace

OptimizerState InitOptimizer(const Model &model, double learning_rate,
                             double epsilon) {
  OptimizerState state;
  state.learning_rate = learning_rate;
  state.epsilon = epsilon;
  state.embeddings = Matrix::Zero(model.embeddings.rows(), model.emb_dim());
  if (model.tower == TowerKind::kMlp) {
    state.V = Matrix::Zero(model.mlp.V.rows(), model.mlp.V.cols());
    state.b1 = Vector::Zero(model.mlp.b1.size());
    state.U = Matrix::Zero(model.mlp.U.rows(), model.mlp.U.cols());
    state.b2 = Vector::Zero(model.mlp.b2.size());
  } else {
    state.image_vectors = Matrix::Zero(model.lookup.vectors.rows(),
                                       model.lookup.vectors.cols());
  }
  return state;
}

void AdagradStep(Model &model, const Gradients &grads, OptimizerState &state) {
  if (!grads.AllFinite()) throw std::domain_error("non-finite gradient");
  const double lr = state.learning_rate;
  const double eps = state.epsilon;
  const Eigen::Index n = model.emb_dim();

  for (const auto &[row, grad] : grads.embeddings) {
    if (row >= model.embeddings.rows() || grad.size() != n) {
      throw std::invalid_argument("embedding gradient row out of range");
    }
  }
  for (const auto &[row, grad] : grads.image_vectors) {
    if (row >= model.lookup.vectors.rows() || grad.size() != n) {
      throw std::invalid_argument("image gradient row out of range");
    }
  }

  for (const auto &[row, grad] : grads.embeddings) {
    UpdateBlock(model.embeddings.row(row), grad, state.embeddings.row(row), lr,
                eps);
  }
  for (const auto &[row, grad] : grads.image_vectors) {
    UpdateBlock(model.lookup.vectors.row(row), grad,
                state.image_vectors.row(row), lr, eps);
  }
  if (model.tower == TowerKind::kMlp && grads.V.size() > 0) {
    auto &mlp = model.mlp;
    CheckShape(grads.V.rows(), grads.V.cols(), mlp.V.rows(), mlp.V.cols(), "V");
    CheckShape(grads.U.rows(), grads.U.cols(), mlp.U.rows(), mlp.U.cols(), "U");
    CheckShape(grads.b1.size(), 1, mlp.b1.size(), 1, "b1");
    CheckShape(grads.b2.size(), 1, mlp.b2.size(), 1, "b2");
    UpdateBlock(mlp.V.reshaped(), grads.V.reshaped(), state.V.reshaped(), lr,
                eps);
    UpdateBlock(mlp.b1, grads.b1, state.b1, lr, eps);
    UpdateBlock(mlp.U.reshaped(), grads.U.reshaped(), state.U.reshaped(), lr,
                eps);
    UpdateBlock(mlp.b2, grads.b2, state.b2, lr, eps);
  }
}

}  // namespace imgvec
