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

#ifndef IMGVEC_MODEL_H_
#define IMGVEC_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "imgvec/textproc.h"

namespace imgvec {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using VectorRef = Eigen::Ref<const Vector>;

enum class TowerKind { kMlp, kLookup };

std::string_view TowerKindName(TowerKind kind);
TowerKind ParseTowerKind(std::string_view name);

// I = ReLU(U * ReLU(V * f + b1) + b2) over precomputed image features f.
struct MlpImageTower {
  Matrix V;   // hidden x feature
  Vector b1;  // hidden
  Matrix U;   // output x hidden
  Vector b2;  // output

  size_t feature_dim() const { return V.cols(); }
  size_t hidden_dim() const { return V.rows(); }
  size_t output_dim() const { return U.rows(); }
};

// Co-occurrence-only image tower: one free trainable vector per image.
struct LookupImageTower {
  Matrix vectors;  // num_images x emb_dim

  size_t num_images() const { return vectors.rows(); }
};

struct ModelShape {
  TowerKind tower = TowerKind::kMlp;
  size_t num_rows = 0;     // vocabulary + hash buckets
  size_t emb_dim = 100;
  size_t feature_dim = 64;  // mlp only
  size_t hidden_dim = 200;  // mlp only
  size_t num_images = 0;    // lookup only
};

// Parameters of both towers. Only the tower selected by `tower` is populated.
struct Model {
  TowerKind tower = TowerKind::kMlp;
  Matrix embeddings;
  MlpImageTower mlp;
  LookupImageTower lookup;

  size_t emb_dim() const { return embeddings.cols(); }
  ModelShape shape() const;
};

// Throws std::invalid_argument if any dimension is zero.
void ValidateShape(const ModelShape &shape);

// Embeddings and lookup vectors ~ U(-0.5/emb_dim, 0.5/emb_dim); MLP weights
// Glorot-uniform; biases zero. Fully determined by seed.
Model InitModel(const ModelShape &shape, uint64_t seed);

double GlorotBound(size_t fan_in, size_t fan_out);

// Mean of the embedding rows, duplicates counted. Throws
// std::invalid_argument("empty query") on an empty list.
Vector QueryRepr(const Matrix &embeddings, std::span<const TokenId> tokens);

Vector ImageReprMlp(const MlpImageTower &tower, VectorRef features);
Vector ImageReprLookup(const LookupImageTower &tower, size_t image);

// Norms below this are treated as zero: cosine is 0 with zero gradient.
inline constexpr double kMinNorm = 1e-12;

double Cosine(VectorRef a, VectorRef b);

// True if every parameter of the selected tower and the embedding table is
// finite.
bool AllFinite(const Model &model);

// word2vec text format over in-vocabulary rows only: "<rows> <dim>" then
// "<token> <v1> ... <vdim>". Values are written in shortest round-trip form.
void WriteWord2Vec(std::ostream &out, const Vocabulary &vocab,
                   const Matrix &embeddings);

struct WordVectors {
  std::vector<std::string> words;
  Matrix vectors;
};

WordVectors ReadWord2Vec(std::istream &in, const std::string &source);

}  // namespace imgvec

#endif  // IMGVEC_MODEL_H_
