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
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "imgvec/errors.h"
#include "imgvec/eval.h"

namespace imgvec {

EmbeddingSet::EmbeddingSet(std::vector<std::string> words, Matrix vectors,
                           LangMode mode)
    : words_(std::move(words)), vectors_(std::move(vectors)), mode_(mode) {
  if (static_cast<size_t>(vectors_.rows()) != words_.size()) {
    throw std::invalid_argument("embedding set: word/row count mismatch");
  }
  index_.reserve(words_.size());
  for (size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], i);
}

EmbeddingSet EmbeddingSet::FromModel(const Vocabulary &vocab,
                                     const Matrix &embeddings) {
  return EmbeddingSet(vocab.tokens(), embeddings.topRows(vocab.size()),
                      vocab.mode());
}

std::optional<size_t> EmbeddingSet::FindToken(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<size_t> EmbeddingSet::Resolve(std::string_view word) const {
  std::string_view lang, surface;
  std::vector<std::string> tokens;
  if (SplitTaggedWord(word, &lang, &surface)) {
    tokens = Tokenize(surface, lang, mode_);
  } else if (mode_ == LangMode::kUnaware) {
    tokens = Tokenize(word, "", mode_);
  } else {
    return FindToken(word);
  }
  if (tokens.size() != 1) return std::nullopt;
  return FindToken(tokens.front());
}

std::vector<double> FractionalRanks(std::span<const double> values) {
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
      ++j;
    }
    // Positions i..j (0-based) share the average 1-based rank.
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double Spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("spearman: length mismatch");
  }
  if (x.size() < 2) throw std::domain_error("degenerate ranking");
  const auto rx = FractionalRanks(x);
  const auto ry = FractionalRanks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw std::domain_error("degenerate ranking");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

SimTask ReadSimTask(std::istream &in, const std::string &name,
                    const std::string &source) {
  SimTask task;
  task.name = name;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const size_t t1 = line.find('\t');
    const size_t t2 =
        t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw DataError(source + ":" + std::to_string(line_no) +
                      ": expected word1<TAB>word2<TAB>score");
    }
    SimPair pair;
    pair.word1 = line.substr(0, t1);
    pair.word2 = line.substr(t1 + 1, t2 - t1 - 1);
    const char *begin = line.data() + t2 + 1;
    const char *end = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(begin, end, pair.score);
    if (ec != std::errc() || ptr != end || !std::isfinite(pair.score)) {
      throw DataError(source + ":" + std::to_string(line_no) +
                      ": malformed score");
    }
    task.pairs.push_back(std::move(pair));
  }
  if (task.pairs.empty()) throw DataError(source + ": no word pairs");
  return task;
}

SimTask LoadSimTask(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return ReadSimTask(in, path.stem().string(), path.string());
}

namespace {

// Appends covered (model, human) score pairs; returns the covered count.
size_t CollectCovered(const EmbeddingSet &embeddings, const SimTask &task,
                      std::vector<double> &model, std::vector<double> &human) {
  size_t covered = 0;
  for (const auto &pair : task.pairs) {
    const auto a = embeddings.Resolve(pair.word1);
    const auto b = embeddings.Resolve(pair.word2);
    if (!a || !b) continue;
    model.push_back(Cosine(embeddings.row(*a), embeddings.row(*b)));
    human.push_back(pair.score);
    ++covered;
  }
  return covered;
}

ScoredResult Score(const std::vector<double> &model,
                   const std::vector<double> &human, size_t total) {
  if (model.size() < 2) {
    throw std::domain_error("fewer than 2 covered pairs");
  }
  ScoredResult result;
  result.score = Spearman(model, human);
  result.n_used = model.size();
  result.n_total = total;
  result.coverage = static_cast<double>(result.n_used) /
                    static_cast<double>(total);
  return result;
}

}  // namespace

ScoredResult EvalSimilarity(const EmbeddingSet &embeddings,
                            const SimTask &task) {
  std::vector<double> model, human;
  CollectCovered(embeddings, task, model, human);
  return Score(model, human, task.pairs.size());
}

ScoredResult EvalSimilarityAggregate(const EmbeddingSet &embeddings,
                                     std::span<const SimTask> subtasks) {
  if (subtasks.empty()) throw std::invalid_argument("no subtasks to aggregate");
  std::vector<double> model, human;
  size_t total = 0;
  for (const auto &task : subtasks) {
    CollectCovered(embeddings, task, model, human);
    total += task.pairs.size();
  }
  return Score(model, human, total);
}

LexiconScore EvalLexicon(const EmbeddingSet &embeddings,
                         std::span<const LexiconEntry> lexicon) {
  struct Word {
    std::string lang;
    int64_t concept_id;
    size_t row;
  };
  std::unordered_map<std::string, size_t> seen;
  std::vector<Word> words;
  size_t total = 0;
  auto add = [&](const std::string &tagged, int64_t concept_id) {
    if (!seen.emplace(tagged, words.size()).second) return;
    ++total;
    std::string_view lang, surface;
    if (!SplitTaggedWord(tagged, &lang, &surface)) return;
    const auto row = embeddings.Resolve(tagged);
    if (!row) return;
    words.push_back({std::string(lang), concept_id, *row});
  };
  for (const auto &entry : lexicon) {
    add(entry.word1, entry.concept_id);
    add(entry.word2, entry.concept_id);
  }

  LexiconScore score;
  score.words_total = total;
  score.words_used = words.size();
  double same_sum = 0.0, diff_sum = 0.0;
  size_t same_n = 0, diff_n = 0, hits = 0, queried = 0;
  for (size_t i = 0; i < words.size(); ++i) {
    double best = -2.0;
    int64_t best_concept = -1;
    for (size_t j = 0; j < words.size(); ++j) {
      if (words[i].lang == words[j].lang) continue;
      const double c =
          Cosine(embeddings.row(words[i].row), embeddings.row(words[j].row));
      if (c > best) {
        best = c;
        best_concept = words[j].concept_id;
      }
      if (j > i) {
        if (words[i].concept_id == words[j].concept_id) {
          same_sum += c;
          ++same_n;
        } else {
          diff_sum += c;
          ++diff_n;
        }
      }
    }
    if (best_concept >= 0) {
      ++queried;
      if (best_concept == words[i].concept_id) ++hits;
    }
  }
  if (same_n > 0) score.mean_same_concept = same_sum / same_n;
  if (diff_n > 0) score.mean_different_concept = diff_sum / diff_n;
  if (queried > 0) score.precision_at_1 = static_cast<double>(hits) / queried;
  return score;
}

}  // namespace imgvec
