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

#include "imgvec/data.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <unordered_set>

#include "imgvec/errors.h"

namespace imgvec {

namespace {

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool ParseDouble(std::string_view text, double *value) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   *value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::string Where(const std::string &source, size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

// Reads lines with LF endings; a trailing CR is tolerated.
bool NextLine(std::istream &in, std::string &line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::ifstream OpenInput(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

void WriteDouble(std::ostream &out, double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.write(buf, end - buf);
}

}  // namespace

std::vector<TripleRecord> ReadTriples(std::istream &in,
                                      const std::string &source) {
  std::vector<TripleRecord> triples;
  std::string line;
  size_t line_no = 0;
  while (NextLine(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = SplitTabs(line);
    if (fields.size() != 4) {
      throw DataError(Where(source, line_no) + "expected 4 tab-separated " +
                      "columns (weight, lang, query, image_id), found " +
                      std::to_string(fields.size()));
    }
    TripleRecord record;
    if (!ParseDouble(fields[0], &record.weight) ||
        !std::isfinite(record.weight)) {
      throw DataError(Where(source, line_no) + "non-numeric weight '" +
                      std::string(fields[0]) + "'");
    }
    if (record.weight < 0.0) {
      throw DataError(Where(source, line_no) + "negative weight");
    }
    if (fields[3].empty()) {
      throw DataError(Where(source, line_no) + "empty image_id");
    }
    record.lang = fields[1];
    record.query = fields[2];
    record.image_id = fields[3];
    triples.push_back(std::move(record));
  }
  if (in.bad()) throw DataError(source + ": read error");
  return triples;
}

std::vector<TripleRecord> LoadTriples(const std::filesystem::path &path) {
  auto in = OpenInput(path);
  return ReadTriples(in, path.string());
}

void WriteTriples(std::ostream &out, std::span<const TripleRecord> triples) {
  for (const auto &t : triples) {
    WriteDouble(out, t.weight);
    out << '\t' << t.lang << '\t' << t.query << '\t' << t.image_id << '\n';
  }
}

void ImageFeatures::Add(const std::string &id,
                        std::span<const double> values) {
  if (values.empty()) throw DataError("image '" + id + "' has no features");
  if (ids_.empty()) {
    dim_ = values.size();
  } else if (values.size() != dim_) {
    throw DataError("image '" + id + "' has " + std::to_string(values.size()) +
                    " features, expected " + std::to_string(dim_));
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw DataError("image '" + id + "' has a non-finite feature");
    }
  }
  auto [it, inserted] =
      index_.emplace(id, static_cast<uint32_t>(ids_.size()));
  if (!inserted) throw DataError("duplicate image_id '" + id + "'");
  ids_.push_back(id);
  values_.insert(values_.end(), values.begin(), values.end());
}

bool ImageFeatures::Find(const std::string &id, uint32_t *row) const {
  auto it = index_.find(id);
  if (it == index_.end()) return false;
  *row = it->second;
  return true;
}

Matrix ImageFeatures::ToMatrix() const {
  Matrix m(ids_.size(), dim_);
  std::copy(values_.begin(), values_.end(), m.data());
  return m;
}

ImageFeatures ReadFeatures(std::istream &in, const std::string &source) {
  ImageFeatures features;
  std::string line;
  size_t line_no = 0;
  std::vector<double> values;
  while (NextLine(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = SplitTabs(line);
    if (fields.size() != 2) {
      throw DataError(Where(source, line_no) +
                      "expected image_id<TAB>comma-separated features");
    }
    values.clear();
    std::string_view rest = fields[1];
    while (true) {
      const size_t comma = rest.find(',');
      double v;
      if (!ParseDouble(rest.substr(0, comma), &v)) {
        throw DataError(Where(source, line_no) + "malformed feature value");
      }
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    try {
      features.Add(std::string(fields[0]), values);
    } catch (const DataError &e) {
      throw DataError(Where(source, line_no) + e.what());
    }
  }
  if (in.bad()) throw DataError(source + ": read error");
  return features;
}

ImageFeatures LoadFeatures(const std::filesystem::path &path) {
  auto in = OpenInput(path);
  return ReadFeatures(in, path.string());
}

void WriteFeatures(std::ostream &out, const ImageFeatures &features) {
  const Matrix m = features.ToMatrix();
  for (size_t i = 0; i < features.size(); ++i) {
    out << features.ids()[i] << '\t';
    for (size_t j = 0; j < features.dim(); ++j) {
      if (j > 0) out << ',';
      WriteDouble(out, m(i, j));
    }
    out << '\n';
  }
}

std::vector<TripleRecord> FilterMultilingual(
    std::span<const TripleRecord> triples) {
  // Image -> first language seen, flipped to "multi" on a second language.
  struct Seen {
    std::string_view first_lang;
    bool multilingual = false;
  };
  std::unordered_map<std::string_view, Seen> images;
  for (const auto &t : triples) {
    auto [it, inserted] = images.try_emplace(t.image_id, Seen{t.lang, false});
    if (!inserted && it->second.first_lang != t.lang) {
      it->second.multilingual = true;
    }
  }
  std::vector<TripleRecord> kept;
  for (const auto &t : triples) {
    if (images.at(t.image_id).multilingual) kept.push_back(t);
  }
  return kept;
}

std::vector<std::string> CorpusTokens(std::span<const TripleRecord> triples,
                                      LangMode mode) {
  std::vector<std::string> tokens;
  for (const auto &t : triples) {
    auto query = Tokenize(t.query, t.lang, mode);
    std::move(query.begin(), query.end(), std::back_inserter(tokens));
  }
  return tokens;
}

PreparedCorpus PrepareExamples(std::span<const TripleRecord> triples,
                               const Vocabulary &vocab,
                               const ImageFeatures *features) {
  PreparedCorpus out;
  std::unordered_map<std::string, uint32_t> dense;
  for (const auto &t : triples) {
    uint32_t image = 0;
    if (features != nullptr) {
      if (!features->Find(t.image_id, &image)) {
        throw DataError("no feature vector for image_id '" + t.image_id + "'");
      }
    } else {
      auto [it, inserted] = dense.try_emplace(
          t.image_id, static_cast<uint32_t>(out.image_ids.size()));
      if (inserted) out.image_ids.push_back(t.image_id);
      image = it->second;
    }

    const auto tokens = Tokenize(t.query, t.lang, vocab.mode());
    if (tokens.empty()) {
      ++out.dropped_empty;
      continue;
    }
    TrainingExample ex;
    ex.tokens.reserve(tokens.size());
    for (const auto &token : tokens) ex.tokens.push_back(vocab.Lookup(token));
    ex.image = image;
    ex.weight = t.weight;
    out.training.examples.push_back(std::move(ex));
  }

  if (features != nullptr) {
    out.training.image_features = features->ToMatrix();
    out.training.num_images = features->size();
    out.image_ids = features->ids();
  } else {
    out.training.num_images = out.image_ids.size();
  }
  return out;
}

std::vector<LexiconEntry> ReadLexicon(std::istream &in,
                                      const std::string &source) {
  std::vector<LexiconEntry> lexicon;
  std::string line;
  size_t line_no = 0;
  while (NextLine(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = SplitTabs(line);
    if (fields.size() != 3) {
      throw DataError(Where(source, line_no) +
                      "expected word1<TAB>word2<TAB>concept_id");
    }
    LexiconEntry entry;
    entry.word1 = fields[0];
    entry.word2 = fields[1];
    auto [ptr, ec] = std::from_chars(
        fields[2].data(), fields[2].data() + fields[2].size(), entry.concept_id);
    if (ec != std::errc() || ptr != fields[2].data() + fields[2].size()) {
      throw DataError(Where(source, line_no) + "malformed concept_id");
    }
    lexicon.push_back(std::move(entry));
  }
  return lexicon;
}

void WriteLexicon(std::ostream &out, std::span<const LexiconEntry> lexicon) {
  for (const auto &e : lexicon) {
    out << e.word1 << '\t' << e.word2 << '\t' << e.concept_id << '\n';
  }
}

}  // namespace imgvec
