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
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "imgvec/errors.h"
#include "imgvec/eval.h"

namespace imgvec {

std::optional<Vector> DocRepr(const EmbeddingSet &embeddings,
                              std::string_view lang, std::string_view text) {
  Vector sum = Vector::Zero(embeddings.dim());
  size_t covered = 0;
  for (const auto &token : Tokenize(text, lang, embeddings.mode())) {
    if (auto row = embeddings.FindToken(token)) {
      sum += embeddings.row(*row);
      ++covered;
    }
  }
  if (covered == 0) return std::nullopt;
  return sum / static_cast<double>(covered);
}

std::vector<LabeledDoc> ReadLabeledDocs(std::istream &in,
                                        const std::string &source) {
  std::vector<LabeledDoc> docs;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const size_t t1 = line.find('\t');
    const size_t t2 =
        t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || t1 == 0) {
      throw DataError(source + ":" + std::to_string(line_no) +
                      ": expected label<TAB>lang<TAB>text");
    }
    docs.push_back({line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1),
                    line.substr(t2 + 1)});
  }
  return docs;
}

ClassTask LoadClassTask(const std::filesystem::path &train,
                        const std::filesystem::path &test) {
  auto read = [](const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return ReadLabeledDocs(in, path.string());
  };
  ClassTask task;
  task.name = train.stem().string();
  task.train = read(train);
  task.test = read(test);
  return task;
}

Vector SoftmaxClassifier::Scores(VectorRef x) const {
  return weights * x + bias;
}

size_t SoftmaxClassifier::Predict(VectorRef x) const {
  Eigen::Index best;
  Scores(x).maxCoeff(&best);
  return static_cast<size_t>(best);
}

SoftmaxClassifier TrainSoftmaxClassifier(const Matrix &features,
                                         std::span<const size_t> labels,
                                         std::vector<std::string> label_names,
                                         int max_iterations,
                                         double tolerance) {
  const Eigen::Index n = features.rows();
  const Eigen::Index dim = features.cols();
  const Eigen::Index classes = label_names.size();
  if (n == 0 || static_cast<size_t>(n) != labels.size()) {
    throw std::invalid_argument("classifier: features/labels mismatch");
  }
  SoftmaxClassifier clf;
  clf.labels = std::move(label_names);
  clf.weights = Matrix::Zero(classes, dim);
  clf.bias = Vector::Zero(classes);

  const double max_sq = (features.rowwise().squaredNorm().array() + 1.0).maxCoeff();
  const double step = 1.0 / (0.5 * max_sq);

  Matrix targets = Matrix::Zero(n, classes);
  for (Eigen::Index i = 0; i < n; ++i) targets(i, labels[i]) = 1.0;

  auto evaluate = [&](Matrix &probs) {
    Matrix logits = features * clf.weights.transpose();
    logits.rowwise() += clf.bias.transpose();
    double loss = 0.0;
    probs.resize(n, classes);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double max = logits.row(i).maxCoeff();
      const double lse =
          max + std::log((logits.row(i).array() - max).exp().sum());
      probs.row(i) = (logits.row(i).array() - lse).exp();
      loss += lse - logits(i, labels[i]);
    }
    return loss / static_cast<double>(n);
  };

  Matrix probs;
  double loss = evaluate(probs);
  int iteration = 0;
  while (iteration < max_iterations) {
    const Matrix residual = (probs - targets) / static_cast<double>(n);
    clf.weights -= step * residual.transpose() * features;
    clf.bias -= step * residual.colwise().sum().transpose();
    ++iteration;
    const double next = evaluate(probs);
    const bool converged = std::abs(loss - next) < tolerance;
    loss = next;
    if (converged) break;
  }
  clf.iterations = iteration;
  clf.final_loss = loss;
  return clf;
}

ClassificationResult EvalClassification(const EmbeddingSet &embeddings,
                                        const ClassTask &task) {
  std::set<std::string> label_set;
  for (const auto &doc : task.train) label_set.insert(doc.label);
  std::vector<std::string> label_names(label_set.begin(), label_set.end());
  std::map<std::string, size_t> label_index;
  for (size_t i = 0; i < label_names.size(); ++i) {
    label_index[label_names[i]] = i;
  }
  for (const auto &doc : task.test) {
    if (!label_index.count(doc.label)) {
      throw DataError(task.name + ": test label '" + doc.label +
                      "' does not occur in training data");
    }
  }

  std::vector<Vector> train_rows;
  std::vector<size_t> train_labels;
  std::set<size_t> covered_labels;
  for (const auto &doc : task.train) {
    if (auto repr = DocRepr(embeddings, doc.lang, doc.text)) {
      train_rows.push_back(std::move(*repr));
      train_labels.push_back(label_index.at(doc.label));
      covered_labels.insert(train_labels.back());
    }
  }
  if (train_rows.empty()) {
    throw std::domain_error(task.name + ": no covered training documents");
  }
  if (covered_labels.size() < 2) {
    throw std::domain_error(task.name +
                            ": fewer than 2 labels among covered training "
                            "documents");
  }
  Matrix features(train_rows.size(), embeddings.dim());
  for (size_t i = 0; i < train_rows.size(); ++i) {
    features.row(i) = train_rows[i].transpose();
  }

  ClassificationResult out;
  out.classifier = TrainSoftmaxClassifier(features, train_labels, label_names);

  size_t covered = 0, correct = 0, tokens = 0, known_tokens = 0;
  for (const auto &doc : task.test) {
    for (const auto &token : Tokenize(doc.text, doc.lang, embeddings.mode())) {
      ++tokens;
      if (embeddings.FindToken(token)) ++known_tokens;
    }
    auto repr = DocRepr(embeddings, doc.lang, doc.text);
    if (!repr) continue;
    ++covered;
    if (out.classifier.Predict(*repr) == label_index.at(doc.label)) ++correct;
  }
  if (covered == 0) {
    throw std::domain_error(task.name + ": no covered test documents");
  }
  ScoredResult &r = out.result;
  r.score = static_cast<double>(correct) / static_cast<double>(covered);
  r.n_used = covered;
  r.n_total = task.test.size();
  r.coverage = static_cast<double>(covered) / static_cast<double>(r.n_total);
  r.token_coverage = tokens == 0 ? 0.0
                                 : static_cast<double>(known_tokens) /
                                       static_cast<double>(tokens);
  return out;
}

}  // namespace imgvec
