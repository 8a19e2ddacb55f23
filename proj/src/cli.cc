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

#include "imgvec/cli.h"

#include <array>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "imgvec/data.h"
#include "imgvec/errors.h"
#include "imgvec/eval.h"
#include "imgvec/training.h"

namespace imgvec::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::array<Preset, 5> kPresets = {{
    {"paper-100", TowerKind::kMlp, LangMode::kAware, 100, 200, false},
    {"paper-300", TowerKind::kMlp, LangMode::kAware, 300, 300, false},
    {"baseline", TowerKind::kLookup, LangMode::kAware, 100, 200, false},
    {"baseline-2lang", TowerKind::kLookup, LangMode::kAware, 100, 200, true},
    {"unaware-100", TowerKind::kMlp, LangMode::kUnaware, 100, 200, false},
}};

// Files are written to temporaries and renamed into place only after every
// writer has succeeded.
class OutputSet {
 public:
  using Writer = std::function<void(std::ostream &)>;

  void Add(fs::path path, Writer writer) {
    outputs_.emplace_back(std::move(path), std::move(writer));
  }

  void Commit() {
    std::vector<fs::path> temps;
    try {
      for (const auto &[path, writer] : outputs_) {
        fs::path temp = path;
        temp += ".tmp";
        temps.push_back(temp);
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + temp.string());
        writer(out);
        out.close();
        if (!out) throw DataError("write failed for " + temp.string());
      }
    } catch (...) {
      std::error_code ignored;
      for (const auto &t : temps) fs::remove(t, ignored);
      throw;
    }
    for (size_t i = 0; i < outputs_.size(); ++i) {
      fs::rename(temps[i], outputs_[i].first);
    }
  }

 private:
  std::vector<std::pair<fs::path, Writer>> outputs_;
};

void EnsureDir(const fs::path &dir) {
  if (dir.empty()) throw ConfigError("--out-dir is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw DataError("cannot create output directory " + dir.string());
  }
}

std::string Num(double value) {
  std::ostringstream s;
  s.precision(6);
  s << value;
  return s.str();
}

// ---------------------------------------------------------------- gensynth

struct GensynthFlags {
  SyntheticSpec spec;
  std::string out_dir;
};

int CmdGensynth(const GensynthFlags &flags, std::ostream &out) {
  ValidateSyntheticSpec(flags.spec);
  const fs::path dir = flags.out_dir;
  EnsureDir(dir);
  const SyntheticCorpus corpus = GenerateSynthetic(flags.spec);
  OutputSet outputs;
  outputs.Add(dir / "triples.tsv",
              [&](std::ostream &o) { WriteTriples(o, corpus.triples); });
  outputs.Add(dir / "features.tsv",
              [&](std::ostream &o) { WriteFeatures(o, corpus.features); });
  outputs.Add(dir / "lexicon.tsv",
              [&](std::ostream &o) { WriteLexicon(o, corpus.lexicon); });
  outputs.Commit();
  out << "wrote " << corpus.triples.size() << " triples, "
      << corpus.features.size() << " images, " << corpus.lexicon.size()
      << " lexicon pairs to " << dir.string() << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------ filter

struct FilterFlags {
  std::string in;
  std::string out;
};

int CmdFilter(const FilterFlags &flags, std::ostream &out) {
  if (flags.out.empty()) throw ConfigError("--out is required");
  const auto triples = LoadTriples(flags.in);
  const auto kept = FilterMultilingual(triples);
  OutputSet outputs;
  outputs.Add(flags.out, [&](std::ostream &o) { WriteTriples(o, kept); });
  outputs.Commit();
  out << "kept " << kept.size() << " triples, dropped "
      << triples.size() - kept.size() << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------- train

struct TrainFlags {
  std::string triples;
  std::string features;
  std::string preset;
  std::optional<std::string> tower;
  std::optional<std::string> lang_mode;
  std::optional<size_t> emb_dim;
  std::optional<size_t> hidden_dim;
  std::optional<size_t> output_dim;
  bool filter_multilingual = false;
  size_t batch_size = 1000;
  int epochs = 5;
  double lr = 0.5;
  double logit_scale = 1.0;
  int64_t min_count = 6;
  int64_t buckets = 1000000;
  uint64_t seed = 1;
  bool deterministic = false;
  std::string out_dir;
};

struct ResolvedTrain {
  TowerKind tower = TowerKind::kMlp;
  LangMode mode = LangMode::kAware;
  size_t emb_dim = 100;
  size_t hidden_dim = 200;
  bool filter = false;
  TrainConfig train;
};

ResolvedTrain ResolveTrain(const TrainFlags &f) {
  ResolvedTrain r;
  if (!f.preset.empty()) {
    const Preset *p = FindPreset(f.preset);
    if (p == nullptr) throw ConfigError("unknown preset '" + f.preset + "'");
    r.tower = p->tower;
    r.mode = p->mode;
    r.emb_dim = p->emb_dim;
    r.hidden_dim = p->hidden_dim;
    r.filter = p->filter_multilingual;
  }
  if (f.tower) r.tower = ParseTowerKind(*f.tower);
  if (f.lang_mode) r.mode = ParseLangMode(*f.lang_mode);
  if (f.emb_dim) r.emb_dim = *f.emb_dim;
  if (f.hidden_dim) r.hidden_dim = *f.hidden_dim;
  if (f.filter_multilingual) r.filter = true;

  if (r.emb_dim < 1) throw ConfigError("--emb-dim must be >= 1");
  if (r.tower == TowerKind::kMlp) {
    if (r.hidden_dim < 1) throw ConfigError("--m must be >= 1");
    if (f.output_dim && *f.output_dim != r.emb_dim) {
      throw ConfigError("mlp tower needs n == emb_dim (got n=" +
                        std::to_string(*f.output_dim) +
                        ", emb_dim=" + std::to_string(r.emb_dim) + ")");
    }
    if (f.features.empty()) {
      throw ConfigError("--features is required for the mlp tower");
    }
  }
  if (f.min_count < 1) throw ConfigError("--min-count must be >= 1");
  if (f.buckets < 1) throw ConfigError("--buckets must be >= 1");
  if (f.triples.empty()) throw ConfigError("--triples is required");
  if (f.out_dir.empty()) throw ConfigError("--out-dir is required");

  r.train.epochs = f.epochs;
  r.train.batch_size = f.batch_size;
  r.train.learning_rate = f.lr;
  r.train.logit_scale = f.logit_scale;
  r.train.seed = f.seed;
  ValidateTrainConfig(r.train);
  return r;
}

int CmdTrain(const TrainFlags &flags, std::ostream &out) {
  const ResolvedTrain cfg = ResolveTrain(flags);

  auto triples = LoadTriples(flags.triples);
  if (cfg.filter) {
    auto kept = FilterMultilingual(triples);
    out << "multilingual filter: kept " << kept.size() << " of "
        << triples.size() << " triples\n";
    triples = std::move(kept);
  }

  VocabOptions vocab_options;
  vocab_options.min_count = flags.min_count;
  vocab_options.num_buckets = flags.buckets;
  vocab_options.mode = cfg.mode;
  const Vocabulary vocab =
      Vocabulary::Build(CorpusTokens(triples, cfg.mode), vocab_options);

  std::optional<ImageFeatures> features;
  if (cfg.tower == TowerKind::kMlp) features = LoadFeatures(flags.features);
  const PreparedCorpus prepared =
      PrepareExamples(triples, vocab, features ? &*features : nullptr);
  out << "vocabulary: " << vocab.size() << " tokens + " << vocab.num_buckets()
      << " hash buckets (" << LangModeName(cfg.mode) << ")\n";
  out << "examples: " << prepared.training.examples.size() << " (dropped "
      << prepared.dropped_empty << " empty queries), images: "
      << prepared.training.num_images << '\n';

  ModelShape shape;
  shape.tower = cfg.tower;
  shape.num_rows = vocab.total_rows();
  shape.emb_dim = cfg.emb_dim;
  shape.hidden_dim = cfg.hidden_dim;
  shape.feature_dim = features ? features->dim() : 0;
  shape.num_images = prepared.training.num_images;

  const fs::path dir = flags.out_dir;
  EnsureDir(dir);
  TrainResult result =
      Train(prepared.training, shape, cfg.train, [&](int epoch, double loss) {
        out << "epoch " << epoch << " mean_loss " << Num(loss) << '\n';
      });

  Checkpoint ckpt;
  ckpt.config = cfg.train;
  ckpt.vocab_fingerprint = vocab.Fingerprint();
  ckpt.epoch = cfg.train.epochs;
  ckpt.epoch_losses = result.epoch_losses;
  ckpt.model = std::move(result.model);
  ckpt.optimizer = std::move(result.optimizer);

  OutputSet outputs;
  outputs.Add(dir / "vocab.txt", [&](std::ostream &o) { vocab.Save(o); });
  outputs.Add(dir / "embeddings.txt", [&](std::ostream &o) {
    WriteWord2Vec(o, vocab, ckpt.model.embeddings);
  });
  outputs.Add(dir / "loss.csv", [&](std::ostream &o) {
    WriteLossCurve(o, ckpt.epoch_losses);
  });
  outputs.Add(dir / "checkpoint.bin",
              [&](std::ostream &o) { SaveCheckpoint(o, ckpt); });
  outputs.Commit();

  if (!ckpt.epoch_losses.empty()) {
    out << "final loss " << Num(ckpt.epoch_losses.back()) << '\n';
  }
  out << "wrote " << (dir / "embeddings.txt").string() << " (" << vocab.size()
      << " x " << cfg.emb_dim << ")\n";
  return kExitOk;
}

// -------------------------------------------------------------------- eval

struct EvalFlags {
  std::string embeddings;
  std::string lang_mode = "aware";
  std::string name;
  std::vector<std::string> sim;
  bool aggregate = false;
  std::vector<std::string> mono;
  std::vector<std::string> class_train;
  std::vector<std::string> class_test;
  std::string lexicon;
  std::string out_dir;
};

template <typename F>
ReportCell Attempt(F &&f) {
  ReportCell cell;
  try {
    cell.result = f();
  } catch (const std::domain_error &e) {
    cell.error = e.what();
  }
  return cell;
}

int CmdEval(const EvalFlags &flags, std::ostream &out) {
  const LangMode mode = ParseLangMode(flags.lang_mode);
  if (flags.class_train.size() != flags.class_test.size()) {
    throw ConfigError("--class-train and --class-test must be paired");
  }
  if (flags.sim.empty() && flags.mono.empty() && flags.class_train.empty() &&
      flags.lexicon.empty()) {
    throw ConfigError("no evaluation tasks given");
  }

  // Load everything first so a missing file fails before any output.
  std::vector<SimTask> sim_tasks, mono_tasks;
  for (const auto &p : flags.sim) sim_tasks.push_back(LoadSimTask(p));
  for (const auto &p : flags.mono) mono_tasks.push_back(LoadSimTask(p));
  std::vector<ClassTask> class_tasks;
  for (size_t i = 0; i < flags.class_train.size(); ++i) {
    class_tasks.push_back(
        LoadClassTask(flags.class_train[i], flags.class_test[i]));
  }
  std::vector<LexiconEntry> lexicon;
  if (!flags.lexicon.empty()) {
    std::ifstream in(flags.lexicon);
    if (!in) throw DataError("cannot open " + flags.lexicon);
    lexicon = ReadLexicon(in, flags.lexicon);
  }
  std::ifstream emb_in(flags.embeddings);
  if (!emb_in) throw DataError("cannot open " + flags.embeddings);
  WordVectors vectors = ReadWord2Vec(emb_in, flags.embeddings);
  const EmbeddingSet embeddings(std::move(vectors.words),
                                std::move(vectors.vectors), mode);

  Report report;
  ReportRow row;
  row.name = flags.name.empty() ? fs::path(flags.embeddings).stem().string()
                                : flags.name;
  for (const auto &task : sim_tasks) {
    report.columns.push_back(task.name);
    row.cells.push_back(
        Attempt([&] { return EvalSimilarity(embeddings, task); }));
  }
  if (flags.aggregate && !sim_tasks.empty()) {
    report.columns.push_back("all");
    row.cells.push_back(
        Attempt([&] { return EvalSimilarityAggregate(embeddings, sim_tasks); }));
  }
  if (!mono_tasks.empty()) {
    report.columns.push_back("mono-avg");
    row.cells.push_back(Attempt([&] {
      ScoredResult avg;
      for (const auto &task : mono_tasks) {
        const ScoredResult r = EvalSimilarity(embeddings, task);
        avg.score += r.score;
        avg.coverage += r.coverage;
        avg.n_used += r.n_used;
        avg.n_total += r.n_total;
      }
      avg.score /= mono_tasks.size();
      avg.coverage /= mono_tasks.size();
      return avg;
    }));
  }
  for (const auto &task : class_tasks) {
    report.columns.push_back(task.name);
    row.cells.push_back(Attempt(
        [&] { return EvalClassification(embeddings, task).result; }));
  }
  if (!lexicon.empty()) {
    const LexiconScore s = EvalLexicon(embeddings, lexicon);
    report.columns.push_back("lexicon-p@1");
    ScoredResult r;
    r.score = s.precision_at_1;
    r.n_used = s.words_used;
    r.n_total = s.words_total;
    r.coverage = s.words_total == 0
                     ? 0.0
                     : static_cast<double>(s.words_used) / s.words_total;
    row.cells.push_back(ReportCell{r, ""});
    out << "lexicon: mean cosine same-concept " << Num(s.mean_same_concept)
        << ", different-concept " << Num(s.mean_different_concept)
        << ", precision@1 " << Num(s.precision_at_1) << '\n';
  }
  report.rows.push_back(std::move(row));

  EmitReportText(out, report);
  if (!flags.out_dir.empty()) {
    const fs::path dir = flags.out_dir;
    EnsureDir(dir);
    OutputSet outputs;
    outputs.Add(dir / "report.txt",
                [&](std::ostream &o) { EmitReportText(o, report); });
    outputs.Add(dir / "report.csv",
                [&](std::ostream &o) { EmitReportCsv(o, report); });
    outputs.Commit();
  }
  return report.HasErrors() ? kExitData : kExitOk;
}

// --------------------------------------------------------------- gradcheck

struct GradcheckFlags {
  std::string tower = "both";
  uint64_t seed = 17;
  size_t batch_size = 8;
  double logit_scale = 1.0;
  bool corrupt = false;
};

constexpr double kGradTolerance = 1e-4;

int CmdGradcheck(const GradcheckFlags &flags, std::ostream &out) {
  std::vector<TowerKind> towers;
  if (flags.tower == "both") {
    towers = {TowerKind::kMlp, TowerKind::kLookup};
  } else {
    towers = {ParseTowerKind(flags.tower)};
  }
  if (flags.batch_size < 1) throw ConfigError("--batch-size must be >= 1");

  GradientTamper tamper;
  if (flags.corrupt) {
    tamper = [](Gradients &g) {
      if (!g.embeddings.empty()) g.embeddings.begin()->second.array() += 1e-3;
    };
  }
  bool pass = true;
  for (TowerKind tower : towers) {
    GradCheckConfig config;
    config.tower = tower;
    config.seed = flags.seed;
    config.batch_size = flags.batch_size;
    config.logit_scale = flags.logit_scale;
    const GradCheckReport r = GradCheck(config, tamper);
    const bool ok = r.max_rel_error < kGradTolerance;
    pass = pass && ok;
    out << (ok ? "PASS" : "FAIL") << ' ' << TowerKindName(tower)
        << " max_rel_error=" << Num(r.max_rel_error)
        << " entries=" << r.entries_checked
        << " max_abs_grad=" << Num(r.max_abs_analytic) << '\n';
  }
  return pass ? kExitOk : kExitFailure;
}

}  // namespace

std::span<const Preset> Presets() { return kPresets; }

const Preset *FindPreset(std::string_view name) {
  for (const auto &p : kPresets) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

int Run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err) {
  CLI::App app{"Multilingual word embeddings from image-text data"};
  app.require_subcommand(1);

  GensynthFlags gensynth;
  auto *gen = app.add_subcommand("gensynth", "Generate a synthetic corpus");
  gen->add_option("--concepts", gensynth.spec.num_concepts, "K");
  gen->add_option("--languages", gensynth.spec.num_languages, "L");
  gen->add_option("--words", gensynth.spec.words_per_concept,
                  "Words per concept per language");
  gen->add_option("--feature-dim", gensynth.spec.feature_dim, "d");
  gen->add_option("--sigma", gensynth.spec.noise_sigma, "Feature noise");
  gen->add_option("--examples", gensynth.spec.num_examples, "N");
  gen->add_option("--seed", gensynth.spec.seed);
  gen->add_option("--images-per-concept", gensynth.spec.images_per_concept);
  gen->add_option("--singleton-fraction", gensynth.spec.singleton_fraction);
  gen->add_option("--cognates", gensynth.spec.num_cognates,
                  "Concepts sharing a surface form in languages 0 and 1");
  gen->add_option("--out-dir", gensynth.out_dir)->required();

  FilterFlags filter;
  auto *flt = app.add_subcommand(
      "filter", "Keep triples whose image occurs with >= 2 languages");
  flt->add_option("--in", filter.in)->required();
  flt->add_option("--out", filter.out)->required();

  TrainFlags train;
  auto *trn = app.add_subcommand("train", "Train embeddings");
  trn->add_option("--triples", train.triples)->required();
  trn->add_option("--features", train.features);
  trn->add_option("--preset", train.preset,
                  "paper-100, paper-300, baseline, baseline-2lang, "
                  "unaware-100");
  trn->add_option("--tower", train.tower, "mlp or lookup");
  trn->add_option("--lang-mode", train.lang_mode, "aware or unaware");
  trn->add_option("--emb-dim", train.emb_dim);
  trn->add_option("--m", train.hidden_dim, "MLP hidden width");
  trn->add_option("--n", train.output_dim, "MLP output width (= emb-dim)");
  trn->add_flag("--filter-multilingual", train.filter_multilingual);
  trn->add_option("--batch-size", train.batch_size)->capture_default_str();
  trn->add_option("--epochs", train.epochs)->capture_default_str();
  trn->add_option("--lr", train.lr)->capture_default_str();
  trn->add_option("--logit-scale", train.logit_scale)->capture_default_str();
  trn->add_option("--min-count", train.min_count)->capture_default_str();
  trn->add_option("--buckets", train.buckets)->capture_default_str();
  trn->add_option("--seed", train.seed)->capture_default_str();
  trn->add_flag("--deterministic", train.deterministic,
                "Fixed reduction order (training is single-threaded)");
  trn->add_option("--out-dir", train.out_dir)->required();

  EvalFlags eval;
  auto *evl = app.add_subcommand("eval", "Evaluate exported embeddings");
  evl->add_option("--embeddings", eval.embeddings)->required();
  evl->add_option("--lang-mode", eval.lang_mode)->capture_default_str();
  evl->add_option("--name", eval.name, "Report row label");
  evl->add_option("--sim", eval.sim, "Crosslingual similarity task TSV");
  evl->add_flag("--aggregate", eval.aggregate,
                "Add an 'all' column pooling the --sim tasks");
  evl->add_option("--mono", eval.mono,
                  "Monolingual similarity task TSV (reported as average)");
  evl->add_option("--class-train", eval.class_train);
  evl->add_option("--class-test", eval.class_test);
  evl->add_option("--lexicon", eval.lexicon, "Ground-truth lexicon TSV");
  evl->add_option("--out-dir", eval.out_dir);

  GradcheckFlags grad;
  auto *grd = app.add_subcommand("gradcheck", "Finite-difference check");
  grd->add_option("--tower", grad.tower, "mlp, lookup or both")
      ->capture_default_str();
  grd->add_option("--seed", grad.seed)->capture_default_str();
  grd->add_option("--batch-size", grad.batch_size)->capture_default_str();
  grd->add_option("--logit-scale", grad.logit_scale)->capture_default_str();
  grd->add_flag("--corrupt-gradient", grad.corrupt)->group("");

  std::vector<char *> argv;
  argv.reserve(args.size());
  for (const auto &a : args) argv.push_back(const_cast<char *>(a.c_str()));
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return CmdGensynth(gensynth, out);
    if (*flt) return CmdFilter(filter, out);
    if (*trn) return CmdTrain(train, out);
    if (*evl) return CmdEval(eval, out);
    if (*grd) return CmdGradcheck(grad, out);
  } catch (const ConfigError &e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace imgvec::cli
