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

#ifndef IMGVEC_DATA_H_
#define IMGVEC_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "imgvec/model.h"
#include "imgvec/textproc.h"
#include "imgvec/training.h"

namespace imgvec {

// One line of triples.tsv: weight \t lang \t query \t image_id.
struct TripleRecord {
  double weight = 1.0;
  std::string lang;
  std::string query;
  std::string image_id;

  bool operator==(const TripleRecord &) const = default;
};

// Throws DataError naming `source` and the line on malformed input. Empty
// lines are skipped.
std::vector<TripleRecord> ReadTriples(std::istream &in,
                                      const std::string &source);
std::vector<TripleRecord> LoadTriples(const std::filesystem::path &path);
void WriteTriples(std::ostream &out, std::span<const TripleRecord> triples);

// features.tsv: image_id \t f1,f2,...,fd. Rows keep file order.
class ImageFeatures {
 public:
  ImageFeatures() = default;

  // Throws DataError on a duplicate id or a dimension change.
  void Add(const std::string &id, std::span<const double> values);

  bool Find(const std::string &id, uint32_t *row) const;

  size_t size() const { return ids_.size(); }
  size_t dim() const { return dim_; }
  const std::vector<std::string> &ids() const { return ids_; }
  // size() x dim() matrix.
  Matrix ToMatrix() const;

 private:
  size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<double> values_;
  std::unordered_map<std::string, uint32_t> index_;
};

ImageFeatures ReadFeatures(std::istream &in, const std::string &source);
ImageFeatures LoadFeatures(const std::filesystem::path &path);
void WriteFeatures(std::ostream &out, const ImageFeatures &features);

// Keeps the triples whose image co-occurs with at least two distinct language
// codes across the whole input, in input order.
std::vector<TripleRecord> FilterMultilingual(
    std::span<const TripleRecord> triples);

// Every token of every query, for vocabulary counting.
std::vector<std::string> CorpusTokens(std::span<const TripleRecord> triples,
                                      LangMode mode);

struct PreparedCorpus {
  TrainingSet training;
  size_t dropped_empty = 0;
  // Image id of each image index.
  std::vector<std::string> image_ids;
};

// Tokenizes and maps each query through the vocabulary. With features the
// image index is the feature row and every image must be present; without
// features (lookup tower) images are densely re-indexed in first-seen order.
// Examples whose query has no tokens are dropped and counted.
PreparedCorpus PrepareExamples(std::span<const TripleRecord> triples,
                               const Vocabulary &vocab,
                               const ImageFeatures *features);

// Synthetic multilingual corpus with known ground truth. Each concept has a
// unit-norm prototype; every image shows one concept and its features are
// normalize(prototype + N(0, sigma^2 I)).
struct SyntheticSpec {
  size_t num_concepts = 20;
  size_t num_languages = 3;
  size_t words_per_concept = 2;  // per language
  size_t feature_dim = 64;
  double noise_sigma = 0.1;
  size_t num_examples = 50000;
  uint64_t seed = 7;
  // Shared images per concept. Each is reused by many queries in every
  // language.
  size_t images_per_concept = 200;
  // Fraction of examples that get a fresh image seen by that one query only.
  double singleton_fraction = 0.5;
  // Concepts [0, num_cognates) use one shared surface form for word slot 0
  // in languages 0 and 1.
  size_t num_cognates = 0;
};

void ValidateSyntheticSpec(const SyntheticSpec &spec);

std::string SyntheticLanguage(size_t language);
// Surface form "l<language>w<concept>k<slot>", or "cog<concept>" for a
// cognate slot.
std::string SyntheticWord(const SyntheticSpec &spec, size_t language,
                          size_t concept_id, size_t slot);

// Ground-truth translation pair between language-tagged words.
struct LexiconEntry {
  std::string word1;
  std::string word2;
  int64_t concept_id = 0;
};

std::vector<LexiconEntry> ReadLexicon(std::istream &in,
                                      const std::string &source);
void WriteLexicon(std::ostream &out, std::span<const LexiconEntry> lexicon);

struct SyntheticCorpus {
  std::vector<TripleRecord> triples;
  ImageFeatures features;
  // All same-concept pairs of words from different languages.
  std::vector<LexiconEntry> lexicon;
};

SyntheticCorpus GenerateSynthetic(const SyntheticSpec &spec);

}  // namespace imgvec

#endif  // IMGVEC_DATA_H_
