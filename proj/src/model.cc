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

#include "imgvec/model.h"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "imgvec/errors.h"

namespace imgvec {

std::string_view TowerKindName(TowerKind kind) {
  return kind == TowerKind::kMlp ? "mlp" : "lookup";
}

TowerKind ParseTowerKind(std::string_view name) {
  if (name == "mlp") return TowerKind::kMlp;
  if (name == "lookup") return TowerKind::kLookup;
  throw ConfigError("unknown tower '" + std::string(name) +
                    "' (expected mlp or lookup)");
}

ModelShape Model::shape() const {
  ModelShape s;
  s.tower = tower;
  s.num_rows = embeddings.rows();
  s.emb_dim = embeddings.cols();
  s.feature_dim = mlp.feature_dim();
  s.hidden_dim = mlp.hidden_dim();
  s.num_images = lookup.num_images();
  return s;
}

void ValidateShape(const ModelShape &shape) {
  if (shape.num_rows == 0) throw std::invalid_argument("num_rows must be > 0");
  if (shape.emb_dim == 0) throw std::invalid_argument("emb_dim must be > 0");
  if (shape.tower == TowerKind::kMlp) {
    if (shape.feature_dim == 0 || shape.hidden_dim == 0) {
      throw std::invalid_argument("mlp tower dimensions must be > 0");
    }
  } else if (shape.num_images == 0) {
    throw std::invalid_argument("lookup tower needs at least one image");
  }
}

double GlorotBound(size_t fan_in, size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

Model InitModel(const ModelShape &shape, uint64_t seed) {
  ValidateShape(shape);
  std::mt19937_64 rng(seed);
  auto fill = [&rng](Matrix &m, double bound) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    double *data = m.data();
    for (Eigen::Index i = 0; i < m.size(); ++i) data[i] = dist(rng);
  };

  const double emb_bound = 0.5 / static_cast<double>(shape.emb_dim);
  Model model;
  model.tower = shape.tower;
  model.embeddings.resize(shape.num_rows, shape.emb_dim);
  fill(model.embeddings, emb_bound);

  if (shape.tower == TowerKind::kMlp) {
    auto &mlp = model.mlp;
    mlp.V.resize(shape.hidden_dim, shape.feature_dim);
    fill(mlp.V, GlorotBound(shape.feature_dim, shape.hidden_dim));
    mlp.b1 = Vector::Zero(shape.hidden_dim);
    mlp.U.resize(shape.emb_dim, shape.hidden_dim);
    fill(mlp.U, GlorotBound(shape.hidden_dim, shape.emb_dim));
    mlp.b2 = Vector::Zero(shape.emb_dim);
  } else {
    model.lookup.vectors.resize(shape.num_images, shape.emb_dim);
    fill(model.lookup.vectors, emb_bound);
  }
  return model;
}

Vector QueryRepr(const Matrix &embeddings, std::span<const TokenId> tokens) {
  if (tokens.empty()) throw std::invalid_argument("empty query");
  Vector sum = Vector::Zero(embeddings.cols());
  for (TokenId id : tokens) {
    if (id.value >= embeddings.rows()) {
      throw std::out_of_range("token id " + std::to_string(id.value) +
                              " out of range");
    }
    sum += embeddings.row(id.value).transpose();
  }
  return sum / static_cast<double>(tokens.size());
}

Vector ImageReprMlp(const MlpImageTower &tower, VectorRef features) {
  if (static_cast<size_t>(features.size()) != tower.feature_dim()) {
    throw std::invalid_argument(
        "image feature dimension " + std::to_string(features.size()) +
        " does not match tower input " + std::to_string(tower.feature_dim()));
  }
  Vector hidden = (tower.V * features + tower.b1).cwiseMax(0.0);
  return (tower.U * hidden + tower.b2).cwiseMax(0.0);
}

Vector ImageReprLookup(const LookupImageTower &tower, size_t image) {
  if (image >= tower.num_images()) {
    throw std::out_of_range("image id " + std::to_string(image) +
                            " out of range (" +
                            std::to_string(tower.num_images()) + " images)");
  }
  return tower.vectors.row(image).transpose();
}

double Cosine(VectorRef a, VectorRef b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("cosine: length mismatch");
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na < kMinNorm || nb < kMinNorm) return 0.0;
  return a.dot(b) / (na * nb);
}

bool AllFinite(const Model &model) {
  if (!model.embeddings.allFinite()) return false;
  if (model.tower == TowerKind::kMlp) {
    const auto &m = model.mlp;
    return m.V.allFinite() && m.b1.allFinite() && m.U.allFinite() &&
           m.b2.allFinite();
  }
  return model.lookup.vectors.allFinite();
}

void WriteWord2Vec(std::ostream &out, const Vocabulary &vocab,
                   const Matrix &embeddings) {
  if (static_cast<size_t>(embeddings.rows()) < vocab.size()) {
    throw std::invalid_argument("embedding table smaller than vocabulary");
  }
  out << vocab.size() << ' ' << embeddings.cols() << '\n';
  char buf[32];
  for (size_t i = 0; i < vocab.size(); ++i) {
    out << vocab.tokens()[i];
    for (Eigen::Index j = 0; j < embeddings.cols(); ++j) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), embeddings(i, j));
      out << ' ';
      out.write(buf, end - buf);
    }
    out << '\n';
  }
}

WordVectors ReadWord2Vec(std::istream &in, const std::string &source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file");
  std::istringstream header(line);
  long rows = -1, dim = -1;
  if (!(header >> rows >> dim) || rows < 0 || dim < 1) {
    throw DataError(source + ":1: malformed word2vec header");
  }
  WordVectors result;
  result.words.reserve(rows);
  result.vectors.resize(rows, dim);
  for (long i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) {
      throw DataError(source + ": expected " + std::to_string(rows) +
                      " rows, found " + std::to_string(i));
    }
    std::istringstream fields(line);
    std::string word;
    fields >> word;
    for (long j = 0; j < dim; ++j) {
      if (!(fields >> result.vectors(i, j))) {
        throw DataError(source + ":" + std::to_string(i + 2) +
                        ": expected " + std::to_string(dim) + " values");
      }
    }
    result.words.push_back(std::move(word));
  }
  return result;
}

}  // namespace imgvec
