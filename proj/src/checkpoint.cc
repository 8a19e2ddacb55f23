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

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

#include "imgvec/errors.h"
#include "imgvec/training.h"
#include "json.hpp"

namespace imgvec {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'I', 'M', 'G', 'V', 'E', 'C', 'K', '1'};

void WriteU64(std::ostream &out, uint64_t v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof(v));
}

uint64_t ReadU64(std::istream &in) {
  uint64_t v = 0;
  if (!in.read(reinterpret_cast<char *>(&v), sizeof(v))) {
    throw DataError("checkpoint: truncated file");
  }
  return v;
}

template <typename M>
void WriteBlock(std::ostream &out, const M &m) {
  WriteU64(out, m.rows());
  WriteU64(out, m.cols());
  out.write(reinterpret_cast<const char *>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
}

template <typename M>
void ReadBlock(std::istream &in, M &m) {
  const uint64_t rows = ReadU64(in);
  const uint64_t cols = ReadU64(in);
  if constexpr (M::ColsAtCompileTime == 1) {
    if (cols != 1 && rows != 0) throw DataError("checkpoint: bad vector block");
    m.resize(rows);
  } else {
    m.resize(rows, cols);
  }
  if (!in.read(reinterpret_cast<char *>(m.data()),
               static_cast<std::streamsize>(m.size() * sizeof(double)))) {
    throw DataError("checkpoint: truncated parameter block");
  }
}

}  // namespace

void SaveCheckpoint(std::ostream &out, const Checkpoint &ckpt) {
  const ModelShape shape = ckpt.model.shape();
  nlohmann::json header = {
      {"format", 1},
      {"tower", std::string(TowerKindName(shape.tower))},
      {"num_rows", shape.num_rows},
      {"emb_dim", shape.emb_dim},
      {"feature_dim", shape.feature_dim},
      {"hidden_dim", shape.hidden_dim},
      {"num_images", shape.num_images},
      {"vocab_fingerprint", ckpt.vocab_fingerprint},
      {"epoch", ckpt.epoch},
      {"epoch_losses", ckpt.epoch_losses},
      {"config",
       {{"epochs", ckpt.config.epochs},
        {"batch_size", ckpt.config.batch_size},
        {"learning_rate", ckpt.config.learning_rate},
        {"epsilon", ckpt.config.epsilon},
        {"logit_scale", ckpt.config.logit_scale},
        {"seed", ckpt.config.seed}}},
  };
  const std::string text = header.dump();
  out.write(kMagic, sizeof(kMagic));
  WriteU64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));

  const Model &m = ckpt.model;
  const OptimizerState &o = ckpt.optimizer;
  WriteBlock(out, m.embeddings);
  WriteBlock(out, o.embeddings);
  if (m.tower == TowerKind::kMlp) {
    WriteBlock(out, m.mlp.V);
    WriteBlock(out, m.mlp.b1);
    WriteBlock(out, m.mlp.U);
    WriteBlock(out, m.mlp.b2);
    WriteBlock(out, o.V);
    WriteBlock(out, o.b1);
    WriteBlock(out, o.U);
    WriteBlock(out, o.b2);
  } else {
    WriteBlock(out, m.lookup.vectors);
    WriteBlock(out, o.image_vectors);
  }
  if (!out) throw DataError("checkpoint: write failed");
}

Checkpoint LoadCheckpoint(std::istream &in) {
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError("checkpoint: bad magic");
  }
  const uint64_t length = ReadU64(in);
  std::string text(length, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(length))) {
    throw DataError("checkpoint: truncated header");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw DataError(std::string("checkpoint: bad header: ") + e.what());
  }

  Checkpoint ckpt;
  const auto &cfg = header.at("config");
  ckpt.config.epochs = cfg.at("epochs");
  ckpt.config.batch_size = cfg.at("batch_size");
  ckpt.config.learning_rate = cfg.at("learning_rate");
  ckpt.config.epsilon = cfg.at("epsilon");
  ckpt.config.logit_scale = cfg.at("logit_scale");
  ckpt.config.seed = cfg.at("seed");
  ckpt.vocab_fingerprint = header.at("vocab_fingerprint");
  ckpt.epoch = header.at("epoch");
  ckpt.epoch_losses = header.at("epoch_losses").get<std::vector<double>>();

  Model &m = ckpt.model;
  OptimizerState &o = ckpt.optimizer;
  m.tower = ParseTowerKind(header.at("tower").get<std::string>());
  o.learning_rate = ckpt.config.learning_rate;
  o.epsilon = ckpt.config.epsilon;
  ReadBlock(in, m.embeddings);
  ReadBlock(in, o.embeddings);
  if (m.tower == TowerKind::kMlp) {
    ReadBlock(in, m.mlp.V);
    ReadBlock(in, m.mlp.b1);
    ReadBlock(in, m.mlp.U);
    ReadBlock(in, m.mlp.b2);
    ReadBlock(in, o.V);
    ReadBlock(in, o.b1);
    ReadBlock(in, o.U);
    ReadBlock(in, o.b2);
  } else {
    ReadBlock(in, m.lookup.vectors);
    ReadBlock(in, o.image_vectors);
  }
  return ckpt;
}

}  // namespace imgvec
