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

void ValidateBatch(const Model &model, const Batch &batch) {
  if (batch.size() == 0) throw std::invalid_argument("empty batch");
  const size_t rows = model.embeddings.rows();
  for (const auto &ex : batch.examples) {
    if (ex.tokens.empty()) throw std::invalid_argument("empty query");
    if (!(ex.weight >= 0.0) || !std::isfinite(ex.weight)) {
      throw std::invalid_argument("example weight must be finite and >= 0");
    }
    for (TokenId id : ex.tokens) {
      if (id.value >= rows) {
        throw std::out_of_range("token id " + std::to_string(id.value) +
                                " out of range");
      }
      if (!model.embeddings.row(id.value).allFinite()) {
        throw std::domain_error("non-finite embedding row " +
                                std::to_string(id.value));
      }
    }
    if (model.tower == TowerKind::kMlp) {
      if (batch.image_features == nullptr) {
        throw std::invalid_argument("mlp tower requires image features");
      }
      if (ex.image >= batch.image_features->rows()) {
        throw std::out_of_range("image index " + std::to_string(ex.image) +
                                " out of range");
      }
    } else {
      if (ex.image >= model.lookup.num_images()) {
        throw std::out_of_range("image id " + std::to_string(ex.image) +
                                " out of range");
      }
      if (!model.lookup.vectors.row(ex.image).allFinite()) {
        throw std::domain_error("non-finite image vector " +
                                std::to_string(ex.image));
      }
    }
  }
  if (model.tower == TowerKind::kMlp) {
    const auto &m = model.mlp;
    if (m.output_dim() != model.emb_dim()) {
      throw std::invalid_argument(
          "mlp output width must equal the embedding dimension");
    }
    if (static_cast<size_t>(batch.image_features->cols()) != m.feature_dim()) {
      throw std::invalid_argument("image feature dimension mismatch");
    }
    if (!(m.V.allFinite() && m.b1.allFinite() && m.U.allFinite() &&
          m.b2.allFinite())) {
      throw std::domain_error("non-finite image tower parameter");
    }
  }
}

// Cached activations of one forward pass over a batch.
struct Forward {
  Matrix queries;   // B x n
  Matrix images;    // B x n
  Vector query_norms;
  Vector image_norms;
  Matrix query_units;  // rows scaled to unit length, zero for degenerate rows
  Matrix image_units;
  Matrix cosines;   // B x B
  Matrix probs;     // row softmax of logits
  // mlp only
  Matrix features;     // B x d
  Matrix hidden_pre;   // B x m
  Matrix hidden;       // B x m
  Matrix output_pre;   // B x n
  LossReport report;
};

void UnitRows(const Matrix &m, Vector &norms, Matrix &units) {
  norms = m.rowwise().norm();
  units = Matrix::Zero(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (norms(i) >= kMinNorm) units.row(i) = m.row(i) / norms(i);
  }
}

Forward RunForward(const Model &model, const Batch &batch,
                   double logit_scale) {
  if (!(logit_scale > 0.0) || !std::isfinite(logit_scale)) {
    throw std::invalid_argument("logit_scale must be positive");
  }
  ValidateBatch(model, batch);
  const Eigen::Index B = batch.size();
  const Eigen::Index n = model.emb_dim();
  Forward f;

  f.queries.resize(B, n);
  for (Eigen::Index q = 0; q < B; ++q) {
    f.queries.row(q) =
        QueryRepr(model.embeddings, batch.examples[q].tokens).transpose();
  }

  if (model.tower == TowerKind::kMlp) {
    const auto &mlp = model.mlp;
    f.features.resize(B, mlp.feature_dim());
    for (Eigen::Index j = 0; j < B; ++j) {
      f.features.row(j) = batch.image_features->row(batch.examples[j].image);
    }
    f.hidden_pre = f.features * mlp.V.transpose();
    f.hidden_pre.rowwise() += mlp.b1.transpose();
    f.hidden = f.hidden_pre.cwiseMax(0.0);
    f.output_pre = f.hidden * mlp.U.transpose();
    f.output_pre.rowwise() += mlp.b2.transpose();
    f.images = f.output_pre.cwiseMax(0.0);
  } else {
    f.images.resize(B, n);
    for (Eigen::Index j = 0; j < B; ++j) {
      f.images.row(j) = model.lookup.vectors.row(batch.examples[j].image);
    }
  }

  UnitRows(f.queries, f.query_norms, f.query_units);
  UnitRows(f.images, f.image_norms, f.image_units);
  f.cosines = f.query_units * f.image_units.transpose();

  LossReport &report = f.report;
  report.logits = logit_scale * f.cosines;
  report.example_losses.resize(B);
  f.probs.resize(B, B);
  double total = 0.0;
  for (Eigen::Index q = 0; q < B; ++q) {
    const auto row = report.logits.row(q);
    const double max = row.maxCoeff();
    const double sum = (row.array() - max).exp().sum();
    const double log_norm = max + std::log(sum);
    f.probs.row(q) = (row.array() - log_norm).exp();
    const double loss = batch.examples[q].weight * (log_norm - row(q));
    report.example_losses[q] = loss;
    total += loss;
  }
  report.mean_weighted_loss = total / static_cast<double>(B);
  return f;
}

}  // namespace

double SoftmaxCrossEntropy(std::span<const double> logits, size_t target) {
  if (target >= logits.size()) {
    throw std::out_of_range("softmax target out of range");
  }
  Eigen::Map<const Eigen::ArrayXd> row(logits.data(), logits.size());
  const double max = row.maxCoeff();
  return max + std::log((row - max).exp().sum()) - row(target);
}

LossReport BatchLoss(const Model &model, const Batch &batch,
                     double logit_scale) {
  return RunForward(model, batch, logit_scale).report;
}

double BatchLossBruteforce(const Model &model, const Batch &batch,
                           double logit_scale) {
  ValidateBatch(model, batch);
  if (batch.size() > 64) {
    throw std::invalid_argument("brute-force loss is limited to B <= 64");
  }
  using Real = long double;
  const size_t B = batch.size();
  const size_t n = model.emb_dim();

  std::vector<std::vector<Real>> queries(B, std::vector<Real>(n, 0.0L));
  for (size_t q = 0; q < B; ++q) {
    const auto &tokens = batch.examples[q].tokens;
    for (TokenId id : tokens) {
      for (size_t k = 0; k < n; ++k) {
        queries[q][k] += model.embeddings(id.value, k);
      }
    }
    for (size_t k = 0; k < n; ++k) queries[q][k] /= tokens.size();
  }

  std::vector<std::vector<Real>> images(B, std::vector<Real>(n, 0.0L));
  for (size_t j = 0; j < B; ++j) {
    const uint32_t image = batch.examples[j].image;
    if (model.tower == TowerKind::kLookup) {
      for (size_t k = 0; k < n; ++k) {
        images[j][k] = model.lookup.vectors(image, k);
      }
      continue;
    }
    const auto &mlp = model.mlp;
    std::vector<Real> hidden(mlp.hidden_dim());
    for (size_t h = 0; h < mlp.hidden_dim(); ++h) {
      Real acc = mlp.b1(h);
      for (size_t d = 0; d < mlp.feature_dim(); ++d) {
        acc += static_cast<Real>(mlp.V(h, d)) *
               (*batch.image_features)(image, d);
      }
      hidden[h] = acc > 0 ? acc : 0;
    }
    for (size_t k = 0; k < n; ++k) {
      Real acc = mlp.b2(k);
      for (size_t h = 0; h < mlp.hidden_dim(); ++h) {
        acc += static_cast<Real>(mlp.U(k, h)) * hidden[h];
      }
      images[j][k] = acc > 0 ? acc : 0;
    }
  }

  auto norm = [](const std::vector<Real> &v) {
    Real s = 0;
    for (Real x : v) s += x * x;
    return std::sqrt(s);
  };
  auto cosine = [&](const std::vector<Real> &a, const std::vector<Real> &b) {
    const Real na = norm(a), nb = norm(b);
    if (na < kMinNorm || nb < kMinNorm) return Real(0);
    Real dot = 0;
    for (size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
    return dot / (na * nb);
  };

  Real total = 0;
  for (size_t q = 0; q < B; ++q) {
    Real denominator = 0;
    for (size_t j = 0; j < B; ++j) {
      denominator += std::exp(logit_scale * cosine(queries[q], images[j]));
    }
    const Real numerator = std::exp(logit_scale * cosine(queries[q], images[q]));
    total += batch.examples[q].weight * -std::log(numerator / denominator);
  }
  return static_cast<double>(total / B);
}

GradientResult BatchGradients(const Model &model, const Batch &batch,
                              double logit_scale) {
  Forward f = RunForward(model, batch, logit_scale);
  const Eigen::Index B = batch.size();
  GradientResult result;
  Gradients &g = result.gradients;

  // d loss / d cosine(q, j) = scale * (w_q / B) * (p_qj - [q == j]).
  Matrix d_cos = f.probs;
  d_cos.diagonal().array() -= 1.0;
  for (Eigen::Index q = 0; q < B; ++q) {
    d_cos.row(q) *= logit_scale * batch.examples[q].weight /
                    static_cast<double>(B);
  }

  // Through the cosine: for c = <u, v> with u = a/|a|, v = b/|b|,
  // dc/da = (v - c u) / |a| and dc/db = (u - c v) / |b|.
  const Matrix weighted = d_cos.cwiseProduct(f.cosines);
  Matrix d_queries = d_cos * f.image_units;
  Matrix d_images = d_cos.transpose() * f.query_units;
  const Vector query_coef = weighted.rowwise().sum();
  const Vector image_coef = weighted.colwise().sum().transpose();
  for (Eigen::Index i = 0; i < B; ++i) {
    if (f.query_norms(i) < kMinNorm) {
      d_queries.row(i).setZero();
    } else {
      d_queries.row(i) -= query_coef(i) * f.query_units.row(i);
      d_queries.row(i) /= f.query_norms(i);
    }
    if (f.image_norms(i) < kMinNorm) {
      d_images.row(i).setZero();
    } else {
      d_images.row(i) -= image_coef(i) * f.image_units.row(i);
      d_images.row(i) /= f.image_norms(i);
    }
  }

  // Query tower: each token receives the query gradient / query length.
  const Eigen::Index n = model.emb_dim();
  for (Eigen::Index q = 0; q < B; ++q) {
    const auto &tokens = batch.examples[q].tokens;
    const double share = 1.0 / static_cast<double>(tokens.size());
    for (TokenId id : tokens) {
      auto [it, inserted] = g.embeddings.try_emplace(id.value);
      if (inserted) it->second = Vector::Zero(n);
      it->second += share * d_queries.row(q).transpose();
    }
  }

  if (model.tower == TowerKind::kMlp) {
    const auto &mlp = model.mlp;
    const Matrix d_out =
        d_images.cwiseProduct((f.output_pre.array() > 0.0).cast<double>().matrix());
    g.U = d_out.transpose() * f.hidden;
    g.b2 = d_out.colwise().sum().transpose();
    const Matrix d_hidden =
        (d_out * mlp.U)
            .cwiseProduct((f.hidden_pre.array() > 0.0).cast<double>().matrix());
    g.V = d_hidden.transpose() * f.features;
    g.b1 = d_hidden.colwise().sum().transpose();
  } else {
    for (Eigen::Index j = 0; j < B; ++j) {
      auto [it, inserted] = g.image_vectors.try_emplace(batch.examples[j].image);
      if (inserted) it->second = Vector::Zero(n);
      it->second += d_images.row(j).transpose();
    }
  }

  result.loss = std::move(f.report);
  return result;
}

bool Gradients::AllFinite() const {
  for (const auto &[row, grad] : embeddings) {
    if (!grad.allFinite()) return false;
  }
  for (const auto &[row, grad] : image_vectors) {
    if (!grad.allFinite()) return false;
  }
  return V.allFinite() && b1.allFinite() && U.allFinite() && b2.allFinite();
}

}  // namespace imgvec
