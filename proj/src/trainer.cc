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
#include <charconv>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include "imgvec/errors.h"
#include "imgvec/training.h"

namespace imgvec {

void ValidateTrainConfig(const TrainConfig &config) {
  if (config.epochs < 0) throw ConfigError("epochs must be >= 0");
  if (config.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(config.learning_rate > 0.0)) {
    throw ConfigError("learning rate must be > 0");
  }
  if (!(config.epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  if (!(config.logit_scale > 0.0) || !std::isfinite(config.logit_scale)) {
    throw ConfigError("logit_scale must be a positive finite number");
  }
}

TrainResult Train(const TrainingSet &data, const ModelShape &shape,
                  const TrainConfig &config, const EpochCallback &on_epoch) {
  ValidateTrainConfig(config);

  std::vector<TrainingExample> examples;
  examples.reserve(data.examples.size());
  TrainResult result;
  for (const auto &ex : data.examples) {
    if (ex.tokens.empty()) {
      ++result.dropped_examples;
    } else {
      examples.push_back(ex);
    }
  }
  if (examples.empty()) {
    throw DataError("no training examples with a non-empty query");
  }
  if (shape.tower == TowerKind::kMlp) {
    if (static_cast<size_t>(data.image_features.cols()) != shape.feature_dim) {
      throw ConfigError("image feature dimension does not match the model");
    }
  }

  result.model = InitModel(shape, config.seed);
  result.optimizer =
      InitOptimizer(result.model, config.learning_rate, config.epsilon);

  // Shuffling uses its own stream so the initial parameters depend only on
  // the seed and the shape.
  std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  const Matrix *features =
      shape.tower == TowerKind::kMlp ? &data.image_features : nullptr;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(examples.begin(), examples.end(), shuffle_rng);
    double weighted_sum = 0.0;
    for (size_t start = 0; start < examples.size();
         start += config.batch_size) {
      const size_t count =
          std::min(config.batch_size, examples.size() - start);
      Batch batch{std::span<const TrainingExample>(examples).subspan(start,
                                                                     count),
                  features};
      GradientResult step =
          BatchGradients(result.model, batch, config.logit_scale);
      AdagradStep(result.model, step.gradients, result.optimizer);
      weighted_sum += step.loss.mean_weighted_loss * static_cast<double>(count);
    }
    const double mean = weighted_sum / static_cast<double>(examples.size());
    result.epoch_losses.push_back(mean);
    if (on_epoch) on_epoch(epoch + 1, mean);
  }
  return result;
}

void WriteLossCurve(std::ostream &out, const std::vector<double> &losses) {
  out << "epoch,mean_loss\n";
  char buf[32];
  for (size_t i = 0; i < losses.size(); ++i) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), losses[i]);
    out << (i + 1) << ',';
    out.write(buf, end - buf);
    out << '\n';
  }
}

}  // namespace imgvec
