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

#ifndef IMGVEC_EVAL_H_
#define IMGVEC_EVAL_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "imgvec/data.h"
#include "imgvec/model.h"
#include "imgvec/textproc.h"

namespace imgvec {

// Frozen in-vocabulary embeddings plus the language mode used to resolve
// evaluation words. Hash buckets are never part of an evaluation set.
class EmbeddingSet {
 public:
  EmbeddingSet(std::vector<std::string> words, Matrix vectors, LangMode mode);

  static EmbeddingSet FromModel(const Vocabulary &vocab,
                                const Matrix &embeddings);

  // Row of an exact token string.
  std::optional<size_t> FindToken(std::string_view token) const;

  // Row of an evaluation word, given as "<lang>:<word>" or as a bare word.
  // The word goes through the same tokenization as training queries and must
  // produce exactly one token. Bare words are only resolvable verbatim in
  // aware mode.
  std::optional<size_t> Resolve(std::string_view word) const;

  Eigen::Ref<const Vector> row(size_t i) const {
    return vectors_.row(i).transpose();
  }
  const std::vector<std::string> &words() const { return words_; }
  size_t size() const { return words_.size(); }
  size_t dim() const { return vectors_.cols(); }
  LangMode mode() const { return mode_; }

 private:
  std::vector<std::string> words_;
  Matrix vectors_;
  LangMode mode_;
  std::unordered_map<std::string, size_t> index_;
};

// score: Spearman rho or accuracy. coverage = n_used / n_total.
struct ScoredResult {
  double score = 0.0;
  double coverage = 0.0;
  size_t n_used = 0;
  size_t n_total = 0;
  // Classification only: fraction of test tokens that are in vocabulary.
  std::optional<double> token_coverage;
};

// Fractional ranks starting at 1; ties get the average of their positions.
std::vector<double> FractionalRanks(std::span<const double> values);

// Pearson correlation of fractional ranks. Throws std::domain_error
// ("degenerate ranking") for fewer than 2 items or zero rank variance.
double Spearman(std::span<const double> x, std::span<const double> y);

struct SimPair {
  std::string word1;
  std::string word2;
  double score = 0.0;
};

struct SimTask {
  std::string name;
  std::vector<SimPair> pairs;
};

// "word1<TAB>word2<TAB>score" per line.
SimTask ReadSimTask(std::istream &in, const std::string &name,
                    const std::string &source);
// Task name is the file stem.
SimTask LoadSimTask(const std::filesystem::path &path);

// Spearman between human scores and embedding cosines over the pairs whose
// words both resolve. Throws std::domain_error with fewer than 2 covered
// pairs.
ScoredResult EvalSimilarity(const EmbeddingSet &embeddings,
                            const SimTask &task);

// Pools the covered pairs of every subtask and computes one Spearman.
ScoredResult EvalSimilarityAggregate(const EmbeddingSet &embeddings,
                                     std::span<const SimTask> subtasks);

// Mean of the in-vocabulary token rows of `text`, or nullopt if none.
std::optional<Vector> DocRepr(const EmbeddingSet &embeddings,
                              std::string_view lang, std::string_view text);

struct LabeledDoc {
  std::string label;
  std::string lang;
  std::string text;
};

struct ClassTask {
  std::string name;
  std::vector<LabeledDoc> train;
  std::vector<LabeledDoc> test;
};

// "label<TAB>lang<TAB>text" per line.
std::vector<LabeledDoc> ReadLabeledDocs(std::istream &in,
                                        const std::string &source);
ClassTask LoadClassTask(const std::filesystem::path &train,
                        const std::filesystem::path &test);

// Multinomial logistic regression.
struct SoftmaxClassifier {
  std::vector<std::string> labels;
  Matrix weights;  // classes x dim
  Vector bias;     // classes
  int iterations = 0;
  double final_loss = 0.0;

  Vector Scores(VectorRef x) const;
  size_t Predict(VectorRef x) const;
};

// Full-batch gradient descent on the mean cross-entropy with step size
// 1 / L, L = 0.5 * max_i (|x_i|^2 + 1), until the loss changes by less than
// `tolerance` or `max_iterations` is reached.
SoftmaxClassifier TrainSoftmaxClassifier(const Matrix &features,
                                         std::span<const size_t> labels,
                                         std::vector<std::string> label_names,
                                         int max_iterations = 1000,
                                         double tolerance = 1e-6);

struct ClassificationResult {
  // score = accuracy over covered test docs, coverage = covered test docs /
  // all test docs, token_coverage = in-vocabulary test tokens / test tokens.
  ScoredResult result;
  SoftmaxClassifier classifier;
};

// Throws DataError if a test label is absent from training, and
// std::domain_error when no training or no test document is covered or
// fewer than two labels are covered in training.
ClassificationResult EvalClassification(const EmbeddingSet &embeddings,
                                        const ClassTask &task);

// Translation retrieval against a ground-truth lexicon of tagged words.
struct LexiconScore {
  double mean_same_concept = 0.0;
  double mean_different_concept = 0.0;
  double precision_at_1 = 0.0;
  size_t words_used = 0;
  size_t words_total = 0;
};

// Over resolvable lexicon words: mean cosine of same-concept and of
// different-concept crosslingual word pairs, and the fraction of words whose
// nearest word from another language shares their concept.
LexiconScore EvalLexicon(const EmbeddingSet &embeddings,
                         std::span<const LexiconEntry> lexicon);

// Table layout: one row per embedding set, one column per task. Cells read
// "score [coverage]".
struct ReportCell {
  std::optional<ScoredResult> result;
  std::string error;  // set when the task failed
};

struct ReportRow {
  std::string name;
  std::vector<ReportCell> cells;
};

struct Report {
  std::vector<std::string> columns;
  std::vector<ReportRow> rows;

  bool HasErrors() const;
};

// Two decimals with the leading zero dropped for |x| < 1: ".82", "-.25",
// "1.00".
std::string FormatScore(double value);
// ".82 [.81]"
std::string FormatCell(const ScoredResult &result);

void EmitReportText(std::ostream &out, const Report &report);
// name,column,score,coverage,n_used,n_total,token_coverage,error
void EmitReportCsv(std::ostream &out, const Report &report);

}  // namespace imgvec

#endif  // IMGVEC_EVAL_H_
