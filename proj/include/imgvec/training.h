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

#ifndef IMGVEC_TRAINING_H_
#define IMGVEC_TRAINING_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "imgvec/model.h"
#include "imgvec/textproc.h"

namespace imgvec {

// One (query, image, weight) training triple after text processing. `image`
// indexes the feature matrix rows (mlp tower) or the lookup tower rows.
struct TrainingExample {
  std::vector<TokenId> tokens;
  uint32_t image = 0;
  double weight = 1.0;
};

// A batch of examples. image_features is required for the mlp tower and
// ignored by the lookup tower.
struct Batch {
  std::span<const TrainingExample> examples;
  const Matrix *image_features = nullptr;

  size_t size() const { return examples.size(); }
};

struct LossReport {
  // Mean over the batch of weight * -log softmax(logits[q])[q].
  double mean_weighted_loss = 0.0;
  // logits(q, j) = logit_scale * cosine(query q, image j).
  Matrix logits;
  // Weighted per-example losses.
  std::vector<double> example_losses;
};

// -log softmax(logits)[target], computed with max-subtraction.
double SoftmaxCrossEntropy(std::span<const double> logits, size_t target);

LossReport BatchLoss(const Model &model, const Batch &batch,
                     double logit_scale);

// Independent naive evaluation of the same loss in long double: explicit
// loops, no max-subtraction. Test scale only (B <= 64).
double BatchLossBruteforce(const Model &model, const Batch &batch,
                           double logit_scale);

// Row-sparse gradient. Rows absent from the map have zero gradient.
using SparseRows = std::map<uint32_t, Vector>;

struct Gradients {
  SparseRows embeddings;
  SparseRows image_vectors;  // lookup tower
  Matrix V;                  // mlp tower, dense
  Vector b1;
  Matrix U;
  Vector b2;

  bool AllFinite() const;
};

struct GradientResult {
  LossReport loss;
  Gradients gradients;
};

// Gradient of the mean weighted batch loss with respect to every parameter,
// through both towers and every logit including off-diagonal pairs.
GradientResult BatchGradients(const Model &model, const Batch &batch,
                              double logit_scale);

// Adagrad accumulators, same shapes as the parameters they track.
struct OptimizerState {
  double learning_rate = 0.5;
  double epsilon = 1e-8;
  Matrix embeddings;
  Matrix V;
  Vector b1;
  Matrix U;
  Vector b2;
  Matrix image_vectors;
};

OptimizerState InitOptimizer(const Model &model, double learning_rate,
                             double epsilon = 1e-8);

// theta -= lr * g / (sqrt(G + g^2) + eps); G += g^2. Only rows and entries
// with a nonzero gradient are touched. Throws std::domain_error on a
// non-finite gradient without modifying anything.
void AdagradStep(Model &model, const Gradients &grads, OptimizerState &state);

// Training corpus: examples plus, for the mlp tower, one feature row per
// image index.
struct TrainingSet {
  std::vector<TrainingExample> examples;
  Matrix image_features;
  size_t num_images = 0;
};

struct TrainConfig {
  int epochs = 5;
  size_t batch_size = 1000;
  double learning_rate = 0.5;
  double epsilon = 1e-8;
  double logit_scale = 1.0;
  uint64_t seed = 1;
};

void ValidateTrainConfig(const TrainConfig &config);

struct TrainResult {
  Model model;
  OptimizerState optimizer;
  std::vector<double> epoch_losses;
  size_t dropped_examples = 0;
};

using EpochCallback = std::function<void(int epoch, double mean_loss)>;

// Seeded init, then per epoch: shuffle, split into batches of batch_size
// (the final partial batch is kept), BatchGradients + AdagradStep. The
// recorded epoch loss is the example-weighted mean of the batch losses
// observed before each update. Deterministic for a given seed.
TrainResult Train(const TrainingSet &data, const ModelShape &shape,
                  const TrainConfig &config,
                  const EpochCallback &on_epoch = {});

struct GradCheckConfig {
  TowerKind tower = TowerKind::kMlp;
  size_t feature_dim = 5;
  size_t hidden_dim = 7;
  size_t emb_dim = 6;
  size_t batch_size = 8;
  size_t num_rows = 16;
  size_t num_images = 8;
  double logit_scale = 1.0;
  double step = 1e-5;
  uint64_t seed = 17;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  double max_abs_analytic = 0.0;
  double max_abs_numeric = 0.0;
  size_t entries_checked = 0;
  size_t parameter_count = 0;
};

// Test hook that may alter analytic gradients before comparison.
using GradientTamper = std::function<void(Gradients &)>;

// Compares every analytic gradient entry of `model` on `batch` with central
// finite differences. Relative error is |ga - gn| / max(1e-8, |ga| + |gn|).
GradCheckReport CheckGradients(const Model &model, const Batch &batch,
                               double logit_scale, double step,
                               const GradientTamper &tamper = {});

// Builds a random small problem from the config and runs CheckGradients.
GradCheckReport GradCheck(const GradCheckConfig &config,
                          const GradientTamper &tamper = {});

struct Checkpoint {
  TrainConfig config;
  uint64_t vocab_fingerprint = 0;
  int epoch = 0;
  std::vector<double> epoch_losses;
  Model model;
  OptimizerState optimizer;
};

// Binary checkpoint: magic, JSON header (config, shape, vocabulary
// fingerprint, epoch, loss curve), then every matrix as little-endian
// doubles.
void SaveCheckpoint(std::ostream &out, const Checkpoint &checkpoint);
Checkpoint LoadCheckpoint(std::istream &in);

// "epoch,mean_loss" CSV.
void WriteLossCurve(std::ostream &out, const std::vector<double> &losses);

}  // namespace imgvec

#endif  // IMGVEC_TRAINING_H_
