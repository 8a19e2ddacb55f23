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
#include <random>
#include <stdexcept>

#include "imgvec/training.h"

namespace imgvec {

namespace {

class Comparator {
 public:
  explicit Comparator(GradCheckReport &report) : report_(report) {}

  void Add(double analytic, double numeric) {
    const double denom =
        std::max(1e-8, std::abs(analytic) + std::abs(numeric));
    report_.max_rel_error =
        std::max(report_.max_rel_error, std::abs(analytic - numeric) / denom);
    report_.max_abs_analytic =
        std::max(report_.max_abs_analytic, std::abs(analytic));
    report_.max_abs_numeric =
        std::max(report_.max_abs_numeric, std::abs(numeric));
    ++report_.entries_checked;
  }

 private:
  GradCheckReport &report_;
};

double SparseEntry(const SparseRows &rows, uint32_t row, Eigen::Index col) {
  auto it = rows.find(row);
  return it == rows.end() ? 0.0 : it->second(col);
}

}  // namespace

GradCheckReport CheckGradients(const Model &model, const Batch &batch,
                               double logit_scale, double step,
                               const GradientTamper &tamper) {
  Gradients grads = BatchGradients(model, batch, logit_scale).gradients;
  if (tamper) tamper(grads);

  GradCheckReport report;
  Comparator compare(report);
  Model probe = model;
  auto numeric = [&](double &param) {
    const double saved = param;
    param = saved + step;
    const double plus = BatchLoss(probe, batch, logit_scale).mean_weighted_loss;
    param = saved - step;
    const double minus =
        BatchLoss(probe, batch, logit_scale).mean_weighted_loss;
    param = saved;
    return (plus - minus) / (2.0 * step);
  };

  for (Eigen::Index r = 0; r < probe.embeddings.rows(); ++r) {
    for (Eigen::Index c = 0; c < probe.embeddings.cols(); ++c) {
      compare.Add(SparseEntry(grads.embeddings, r, c),
                  numeric(probe.embeddings(r, c)));
    }
  }
  report.parameter_count += probe.embeddings.size();

  if (model.tower == TowerKind::kMlp) {
    auto dense = [&](auto &param, const auto &grad) {
      if (grad.size() != param.size()) {
        throw std::invalid_argument("gradient shape mismatch");
      }
      for (Eigen::Index r = 0; r < param.rows(); ++r) {
        for (Eigen::Index c = 0; c < param.cols(); ++c) {
          compare.Add(grad(r, c), numeric(param(r, c)));
        }
      }
      report.parameter_count += param.size();
    };
    dense(probe.mlp.V, grads.V);
    dense(probe.mlp.b1, grads.b1);
    dense(probe.mlp.U, grads.U);
    dense(probe.mlp.b2, grads.b2);
  } else {
    auto &vectors = probe.lookup.vectors;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        compare.Add(SparseEntry(grads.image_vectors, r, c),
                    numeric(vectors(r, c)));
      }
    }
    report.parameter_count += vectors.size();
  }
  return report;
}

GradCheckReport GradCheck(const GradCheckConfig &config,
                          const GradientTamper &tamper) {
  ModelShape shape;
  shape.tower = config.tower;
  shape.num_rows = config.num_rows;
  shape.emb_dim = config.emb_dim;
  shape.feature_dim = config.feature_dim;
  shape.hidden_dim = config.hidden_dim;
  shape.num_images = config.num_images;
  Model model = InitModel(shape, config.seed);

  std::mt19937_64 rng(config.seed + 1);
  std::uniform_real_distribution<double> bias(-0.1, 0.1);
  if (model.tower == TowerKind::kMlp) {
    for (Eigen::Index i = 0; i < model.mlp.b1.size(); ++i) {
      model.mlp.b1(i) = bias(rng);
    }
    for (Eigen::Index i = 0; i < model.mlp.b2.size(); ++i) {
      model.mlp.b2(i) = bias(rng);
    }
  }
  const size_t params =
      model.embeddings.size() +
      (model.tower == TowerKind::kMlp
           ? model.mlp.V.size() + model.mlp.U.size() + model.mlp.b1.size() +
                 model.mlp.b2.size()
           : model.lookup.vectors.size());
  if (params >= 10000) {
    throw std::invalid_argument("gradient check limited to < 10000 parameters");
  }

  Matrix features(config.num_images, config.feature_dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < features.size(); ++i) {
    features.data()[i] = normal(rng);
  }

  std::uniform_int_distribution<uint32_t> token(0, config.num_rows - 1);
  std::uniform_int_distribution<uint32_t> image(0, config.num_images - 1);
  std::uniform_int_distribution<int> length(1, 3);
  std::uniform_real_distribution<double> weight(0.5, 2.0);
  std::vector<TrainingExample> examples(config.batch_size);
  for (auto &ex : examples) {
    const int len = length(rng);
    for (int k = 0; k < len; ++k) ex.tokens.push_back(TokenId(token(rng)));
    ex.image = image(rng);
    ex.weight = weight(rng);
  }

  Batch batch{examples, &features};
  return CheckGradients(model, batch, config.logit_scale, config.step, tamper);
}

}  // namespace imgvec
