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
#include <numeric>
#include <random>

#include "imgvec/data.h"
#include "imgvec/errors.h"

namespace imgvec {

namespace {

std::vector<double> Normalized(std::vector<double> v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double &x : v) x /= norm;
  }
  return v;
}

}  // namespace

void ValidateSyntheticSpec(const SyntheticSpec &spec) {
  if (spec.num_concepts < 1 || spec.num_languages < 1 ||
      spec.num_examples < 1) {
    throw ConfigError("synthetic corpus needs K, L, N >= 1");
  }
  if (spec.words_per_concept < 1) {
    throw ConfigError("synthetic corpus needs at least one word per concept");
  }
  if (spec.feature_dim < 1) throw ConfigError("feature_dim must be >= 1");
  if (!(spec.noise_sigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
  if (!(spec.singleton_fraction >= 0.0 && spec.singleton_fraction <= 1.0)) {
    throw ConfigError("singleton fraction must be in [0, 1]");
  }
  if (spec.images_per_concept < 1 && spec.singleton_fraction < 1.0) {
    throw ConfigError("images_per_concept must be >= 1");
  }
  if (spec.num_cognates > 0 &&
      (spec.num_languages < 2 || spec.num_cognates > spec.num_concepts)) {
    throw ConfigError("cognates need L >= 2 and at most K cognate concepts");
  }
}

std::string SyntheticLanguage(size_t language) {
  return "l" + std::to_string(language);
}

std::string SyntheticWord(const SyntheticSpec &spec, size_t language,
                          size_t concept_id, size_t slot) {
  if (slot == 0 && concept_id < spec.num_cognates && language < 2) {
    return "cog" + std::to_string(concept_id);
  }
  return "l" + std::to_string(language) + "w" + std::to_string(concept_id) +
         "k" + std::to_string(slot);
}

SyntheticCorpus GenerateSynthetic(const SyntheticSpec &spec) {
  ValidateSyntheticSpec(spec);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const size_t d = spec.feature_dim;

  std::vector<std::vector<double>> prototypes(spec.num_concepts);
  for (auto &p : prototypes) {
    p.resize(d);
    for (double &x : p) x = normal(rng);
    p = Normalized(std::move(p));
  }
  auto draw_image = [&](size_t concept_id) {
    std::vector<double> f = prototypes[concept_id];
    if (spec.noise_sigma > 0.0) {
      for (double &x : f) x += spec.noise_sigma * normal(rng);
    }
    return Normalized(std::move(f));
  };

  SyntheticCorpus corpus;
  const bool pooled = spec.singleton_fraction < 1.0;
  if (pooled) {
    for (size_t c = 0; c < spec.num_concepts; ++c) {
      for (size_t k = 0; k < spec.images_per_concept; ++k) {
        corpus.features.Add(
            "c" + std::to_string(c) + "i" + std::to_string(k), draw_image(c));
      }
    }
  }

  std::uniform_int_distribution<size_t> pick_concept(0, spec.num_concepts - 1);
  std::uniform_int_distribution<size_t> pick_language(0,
                                                      spec.num_languages - 1);
  const size_t max_len = std::min<size_t>(3, spec.words_per_concept);
  std::uniform_int_distribution<size_t> pick_length(1, max_len);
  std::uniform_int_distribution<size_t> pick_pooled(
      0, pooled ? spec.images_per_concept - 1 : 0);
  std::bernoulli_distribution singleton(spec.singleton_fraction);

  std::vector<size_t> slots(spec.words_per_concept);
  size_t next_singleton = 0;
  corpus.triples.reserve(spec.num_examples);
  for (size_t i = 0; i < spec.num_examples; ++i) {
    const size_t c = pick_concept(rng);
    const size_t lang = pick_language(rng);
    const size_t len = pick_length(rng);
    std::iota(slots.begin(), slots.end(), 0);
    std::shuffle(slots.begin(), slots.end(), rng);

    TripleRecord t;
    t.weight = 1.0;
    t.lang = SyntheticLanguage(lang);
    for (size_t k = 0; k < len; ++k) {
      if (k > 0) t.query += ' ';
      t.query += SyntheticWord(spec, lang, c, slots[k]);
    }
    if (!pooled || singleton(rng)) {
      t.image_id = "s" + std::to_string(next_singleton++);
      corpus.features.Add(t.image_id, draw_image(c));
    } else {
      t.image_id = "c" + std::to_string(c) + "i" + std::to_string(pick_pooled(rng));
    }
    corpus.triples.push_back(std::move(t));
  }

  for (size_t c = 0; c < spec.num_concepts; ++c) {
    for (size_t l1 = 0; l1 < spec.num_languages; ++l1) {
      for (size_t l2 = l1 + 1; l2 < spec.num_languages; ++l2) {
        for (size_t k1 = 0; k1 < spec.words_per_concept; ++k1) {
          for (size_t k2 = 0; k2 < spec.words_per_concept; ++k2) {
            corpus.lexicon.push_back(
                {SyntheticLanguage(l1) + ":" + SyntheticWord(spec, l1, c, k1),
                 SyntheticLanguage(l2) + ":" + SyntheticWord(spec, l2, c, k2),
                 static_cast<int64_t>(c)});
          }
        }
      }
    }
  }
  return corpus;
}

}  // namespace imgvec
