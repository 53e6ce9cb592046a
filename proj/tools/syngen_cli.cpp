// Copyright 2026 The SynGen Authors. All Rights Reserved.
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
// =============================================================================


// Command-line front end. Talks to the library only through the C API.
//
// Exit codes: 0 success, 1 other failure, 2 usage or configuration error,
// 3 diverged training, 4 gradient check above threshold.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "syngen/syngen.h"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitGradcheck = 4;

struct Failure {
  int code;
  std::string message;
};

int ExitCodeFor(syngen_status s) {
  switch (s) {
    case SYNGEN_OK: return kExitOk;
    case SYNGEN_ERR_CONFIGURATION:
    case SYNGEN_ERR_INVALID_ARGUMENT: return kExitUsage;
    case SYNGEN_ERR_DIVERGED: return kExitDiverged;
    default: return kExitFailure;
  }
}

void Check(syngen_status s, const std::string& what) {
  if (s != SYNGEN_OK) {
    throw Failure{ExitCodeFor(s), what + ": " + syngen_status_name(s) + ": " + syngen_last_error()};
  }
}

struct DatasetDeleter {
  void operator()(syngen_dataset* d) const { syngen_dataset_free(d); }
};
struct ModelDeleter {
  void operator()(syngen_model* m) const { syngen_model_free(m); }
};
using DatasetPtr = std::unique_ptr<syngen_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<syngen_model, ModelDeleter>;

std::string TakeString(char* s) {
  std::string out = s ? s : "";
  syngen_string_free(s);
  return out;
}

DatasetPtr LoadDataset(const std::string& path) {
  syngen_dataset* ds = nullptr;
  Check(syngen_dataset_load(path.c_str(), &ds), "loading '" + path + "'");
  return DatasetPtr(ds);
}

ModelPtr LoadModel(const std::string& path) {
  syngen_model* m = nullptr;
  Check(syngen_model_load(path.c_str(), &m), "loading checkpoint '" + path + "'");
  return ModelPtr(m);
}

std::optional<std::uint64_t> EnvSeed() {
  const char* v = std::getenv("SYNGEN_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const auto seed = std::stoull(v, &used);
    if (used == std::string(v).size()) return seed;
  } catch (const std::exception&) {
  }
  throw Failure{kExitUsage, std::string("SYNGEN_SEED is not an unsigned integer: ") + v};
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{kExitUsage, "cannot read config '" + path + "'"};
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Failure{kExitUsage, "config '" + path + "': " + e.what()};
  }
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{kExitFailure, "cannot write '" + path.string() + "'"};
  out << text;
}

fs::path PrepareOut(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Failure{kExitFailure, "cannot create '" + dir + "': " + ec.message()};
  return p;
}

// ---------------------------------------------------------------------------
// Training flags shared by train and ablate.

struct TrainFlags {
  std::string data;
  std::string dev;
  std::string out = "syngen_out";
  std::string config;
  std::optional<std::string> task;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<double> lr_gat;
  std::optional<double> lr_other;
  std::optional<double> clip_norm;
  std::optional<std::size_t> eval_every;
  std::optional<std::size_t> beam;
  bool constrained = false;
  bool no_shuffle = false;
  bool no_clip = false;
  bool checkpoint_every_epoch = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> d;
  std::optional<std::size_t> heads;
  std::optional<std::size_t> encoder_layers;
  std::optional<std::size_t> decoder_layers;
  std::optional<double> blend_alpha;
  std::optional<double> embed_std;
  std::optional<std::string> ablation;
  std::optional<std::string> node_init;
};

void AddTrainFlags(CLI::App* cmd, TrainFlags& f, bool with_ablation) {
  cmd->add_option("--data", f.data, "training JSONL")->required()->check(CLI::ExistingFile);
  cmd->add_option("--dev", f.dev, "development JSONL for model selection")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory")->capture_default_str();
  cmd->add_option("--config", f.config, "JSON config file (flags take precedence)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--task", f.task, "aesc | pair | triplet");
  cmd->add_option("--epochs", f.epochs);
  cmd->add_option("--batch-size", f.batch_size);
  cmd->add_option("--lr-gat", f.lr_gat, "learning rate of the graph attention weights");
  cmd->add_option("--lr-other", f.lr_other, "learning rate of every other parameter");
  cmd->add_option("--clip-norm", f.clip_norm, "global gradient norm limit");
  cmd->add_flag("--no-clip", f.no_clip, "disable gradient clipping");
  cmd->add_flag("--no-shuffle", f.no_shuffle, "keep dataset order");
  cmd->add_option("--eval-every", f.eval_every, "training F1 every k epochs (0 = last only)");
  cmd->add_option("--beam", f.beam, "beam width used for F1 during training");
  cmd->add_flag("--constrained", f.constrained, "grammar-constrained decoding");
  cmd->add_flag("--checkpoint-every-epoch", f.checkpoint_every_epoch,
                "write a checkpoint after every epoch under <out>/checkpoints");
  cmd->add_option("--seed", f.seed, "seed (falls back to SYNGEN_SEED)");
  cmd->add_option("--d", f.d, "model width");
  cmd->add_option("--heads", f.heads);
  cmd->add_option("--encoder-layers", f.encoder_layers);
  cmd->add_option("--decoder-layers", f.decoder_layers);
  cmd->add_option("--blend-alpha", f.blend_alpha);
  cmd->add_option("--embed-std", f.embed_std);
  if (with_ablation) {
    cmd->add_option("--ablation", f.ablation, "full | no_graph | no_gate | no_graph_no_gate");
  }
  cmd->add_option("--node-init", f.node_init, "pos_only | token_only | pos_plus_token");
}

// flags > config file > SYNGEN_SEED > defaults.
json ResolveTrainConfig(const TrainFlags& f, const fs::path& out) {
  json j = f.config.empty() ? json::object() : ReadJsonFile(f.config);
  if (!j.is_object()) throw Failure{kExitUsage, "config must be a JSON object"};
  if (!j.contains("model")) j["model"] = json::object();
  json& m = j["model"];
  if (!j["model"].contains("seed")) {
    if (auto s = EnvSeed()) m["seed"] = *s;
  }
  auto set = [](json& target, const char* key, const auto& v) {
    if (v) target[key] = *v;
  };
  set(j, "task", f.task);
  set(j, "epochs", f.epochs);
  set(j, "batch_size", f.batch_size);
  set(j, "lr_gat", f.lr_gat);
  set(j, "lr_other", f.lr_other);
  set(j, "clip_norm", f.clip_norm);
  if (f.no_clip) j["clip_norm"] = 0.0;
  if (f.no_shuffle) j["shuffle"] = false;
  set(j, "eval_every", f.eval_every);
  set(j, "beam", f.beam);
  if (f.constrained) j["constrained"] = true;
  if (f.checkpoint_every_epoch) j["checkpoint_dir"] = (out / "checkpoints").string();
  set(m, "seed", f.seed);
  set(m, "d", f.d);
  set(m, "heads", f.heads);
  set(m, "encoder_layers", f.encoder_layers);
  set(m, "decoder_layers", f.decoder_layers);
  set(m, "blend_alpha", f.blend_alpha);
  set(m, "embed_std", f.embed_std);
  set(m, "ablation", f.ablation);
  set(m, "node_init", f.node_init);
  char* resolved = nullptr;
  Check(syngen_train_config_resolve(j.dump().c_str(), &resolved), "configuration");
  return json::parse(TakeString(resolved));
}

void PrintEpoch(void* user, std::size_t epoch, double loss, double f1) {
  const auto* total = static_cast<const std::size_t*>(user);
  std::ostringstream line;
  line << "epoch " << epoch << "/" << *total << " loss " << loss;
  if (!std::isnan(f1)) line << " f1 " << f1;
  std::cerr << line.str() << '\n';
}

struct TrainOutcome {
  json stats;
  json report;
};

// Trains one model described by `config` and writes its artifacts to `out`.
TrainOutcome RunTraining(const json& config, const syngen_dataset* train,
                         const syngen_dataset* dev, const fs::path& out) {
  WriteText(out / "resolved_config.json", config.dump(2) + "\n");
  std::cerr << "resolved config: " << config.dump() << '\n';
  const std::string cfg = config.dump();
  syngen_model* raw = nullptr;
  Check(syngen_model_create(train, cfg.c_str(), &raw), "creating model");
  ModelPtr model(raw);
  const std::size_t epochs = config.at("epochs").get<std::size_t>();
  char* stats = nullptr;
  const std::string stats_path = (out / "stats.csv").string();
  Check(syngen_train(model.get(), train, dev, cfg.c_str(), stats_path.c_str(), PrintEpoch,
                     const_cast<std::size_t*>(&epochs), &stats),
        "training");
  TrainOutcome outcome;
  outcome.stats = json::parse(TakeString(stats));
  const std::string ckpt = (out / "checkpoint.json").string();
  Check(syngen_model_save(model.get(), ckpt.c_str()), "saving checkpoint");
  json decode{{"task", config.at("task")},
              {"beam", config.at("beam")},
              {"constrained", config.at("constrained")}};
  char* report = nullptr;
  Check(syngen_evaluate(model.get(), train, decode.dump().c_str(), &report), "evaluating");
  outcome.report = json::parse(TakeString(report));
  return outcome;
}

int CmdTrain(const TrainFlags& f) {
  const fs::path out = PrepareOut(f.out);
  const json config = ResolveTrainConfig(f, out);
  auto train = LoadDataset(f.data);
  DatasetPtr dev;
  if (!f.dev.empty()) dev = LoadDataset(f.dev);
  const auto outcome = RunTraining(config, train.get(), dev.get(), out);
  const auto& r = outcome.report;
  std::cout << "train precision " << r.at("precision").get<double>() << " recall "
            << r.at("recall").get<double>() << " f1 " << r.at("f1").get<double>() << '\n';
  std::cout << "checkpoint " << (out / "checkpoint.json").string() << '\n';
  return kExitOk;
}

int CmdAblate(const TrainFlags& f) {
  const fs::path out = PrepareOut(f.out);
  auto train = LoadDataset(f.data);
  DatasetPtr dev;
  if (!f.dev.empty()) dev = LoadDataset(f.dev);
  json rows = json::array();
  std::ostringstream csv;
  csv << "ablation,precision,recall,f1,final_loss\n";
  for (const char* ablation : {"full", "no_graph", "no_gate", "no_graph_no_gate"}) {
    const fs::path dir = PrepareOut((out / ablation).string());
    json config = ResolveTrainConfig(f, dir);
    config["model"]["ablation"] = ablation;
    const auto outcome = RunTraining(config, train.get(), dev.get(), dir);
    const auto& r = outcome.report;
    const auto& epochs = outcome.stats.at("epochs");
    const double final_loss = epochs.empty() ? 0.0 : epochs.back().at("loss").get<double>();
    csv << ablation << ',' << r.at("precision").get<double>() << ','
        << r.at("recall").get<double>() << ',' << r.at("f1").get<double>() << ',' << final_loss
        << '\n';
    rows.push_back(json{{"ablation", ablation}, {"report", r}, {"final_loss", final_loss}});
    std::cout << ablation << " f1 " << r.at("f1").get<double>() << '\n';
  }
  WriteText(out / "ablation.csv", csv.str());
  WriteText(out / "ablation.json", rows.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct DecodeFlags {
  std::string checkpoint;
  std::string data;
  std::string out = "syngen_out";
  std::string task = "triplet";
  std::size_t beam = 4;
  std::size_t max_steps = 0;
  bool constrained = false;
};

void AddDecodeFlags(CLI::App* cmd, DecodeFlags& f, bool with_out) {
  cmd->add_option("--checkpoint", f.checkpoint)->required()->check(CLI::ExistingFile);
  cmd->add_option("--data", f.data)->required()->check(CLI::ExistingFile);
  if (with_out) cmd->add_option("--out", f.out, "output directory")->capture_default_str();
  cmd->add_option("--task", f.task, "aesc | pair | triplet")->capture_default_str();
  cmd->add_option("--beam", f.beam, "beam width")->capture_default_str();
  cmd->add_option("--max-steps", f.max_steps, "decode step limit (0 = automatic)");
  cmd->add_flag("--constrained", f.constrained, "grammar-constrained decoding");
}

std::string DecodeOptions(const DecodeFlags& f) {
  return json{{"task", f.task},
              {"beam", f.beam},
              {"max_steps", f.max_steps},
              {"constrained", f.constrained}}
      .dump();
}

int CmdEvaluate(const DecodeFlags& f) {
  auto model = LoadModel(f.checkpoint);
  auto ds = LoadDataset(f.data);
  char* report = nullptr;
  Check(syngen_evaluate(model.get(), ds.get(), DecodeOptions(f).c_str(), &report), "evaluating");
  std::cout << json::parse(TakeString(report)).dump(2) << '\n';
  return kExitOk;
}

int CmdDecode(const DecodeFlags& f) {
  const fs::path out = PrepareOut(f.out);
  auto model = LoadModel(f.checkpoint);
  auto ds = LoadDataset(f.data);
  const std::string path = (out / "predictions.jsonl").string();
  Check(syngen_decode(model.get(), ds.get(), DecodeOptions(f).c_str(), path.c_str()), "decoding");
  std::cout << path << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct GradcheckFlags {
  std::string ablation = "full";
  std::string node_init = "pos_only";
  std::string task = "triplet";
  bool all = false;
  bool break_gradient = false;
  std::size_t d = 8;
  std::optional<std::uint64_t> seed;
  double epsilon = 1e-5;
  double threshold = 1e-4;
};

int CmdGradcheck(const GradcheckFlags& f) {
  std::vector<std::string> ablations{f.ablation};
  std::vector<std::string> inits{f.node_init};
  if (f.all) {
    ablations = {"full", "no_graph", "no_gate", "no_graph_no_gate"};
    inits = {"pos_only", "token_only", "pos_plus_token"};
  }
  std::optional<std::uint64_t> seed = f.seed ? f.seed : EnvSeed();
  syngen_set_break_gradient(f.break_gradient ? 1 : 0);
  double worst = 0.0;
  for (const auto& ablation : ablations) {
    for (const auto& init : inits) {
      json options{{"ablation", ablation},
                   {"node_init", init},
                   {"task", f.task},
                   {"d", f.d},
                   {"epsilon", f.epsilon}};
      if (seed) options["seed"] = *seed;
      double err = 0.0;
      char* report = nullptr;
      Check(syngen_gradcheck(options.dump().c_str(), &err, &report), "gradient check");
      const json r = json::parse(TakeString(report));
      std::cout << ablation << "/" << init << " max_rel_err " << err << " worst "
                << r.at("worst_param").get<std::string>() << "["
                << r.at("worst_index").get<std::size_t>() << "] analytic "
                << r.at("worst_analytic").get<double>() << " numeric "
                << r.at("worst_numeric").get<double>() << " (" << r.at("seconds").get<double>()
                << " s)\n";
      worst = std::max(worst, err);
    }
  }
  syngen_set_break_gradient(0);
  if (worst < f.threshold) {
    std::cout << "max_rel_err < " << f.threshold << '\n';
    return kExitOk;
  }
  std::cout << "max_rel_err " << worst << " >= " << f.threshold << '\n';
  return kExitGradcheck;
}

// ---------------------------------------------------------------------------

struct AttentionFlags {
  std::string ours;
  std::string baseline;
  std::string data;
  std::string out = "syngen_out";
};

int CmdAnalyzeAttention(const AttentionFlags& f) {
  const fs::path out = PrepareOut(f.out);
  auto ours = LoadModel(f.ours);
  auto baseline = LoadModel(f.baseline);
  auto ds = LoadDataset(f.data);
  char* report = nullptr;
  Check(syngen_analyze_attention(ours.get(), baseline.get(), ds.get(), out.string().c_str(),
                                 &report),
        "attention analysis");
  json r = json::parse(TakeString(report));
  WriteText(out / "gap_report.json", r.dump(2) + "\n");
  std::cout << "Value " << r.at("Value").get<double>() << " Rank " << r.at("Rank").get<double>()
            << " Prop " << r.at("Prop").get<double>() << " pairs "
            << r.at("pairs").get<std::size_t>() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SynthFlags {
  std::size_t n = 8;
  std::optional<std::uint64_t> seed;
  std::string out = "synth.jsonl";
};

int CmdSynth(const SynthFlags& f) {
  const std::uint64_t seed = f.seed ? *f.seed : EnvSeed().value_or(1);
  syngen_dataset* raw = nullptr;
  Check(syngen_dataset_synthesize(f.n, seed, &raw), "synthesizing");
  DatasetPtr ds(raw);
  const fs::path out(f.out);
  if (out.has_parent_path()) PrepareOut(out.parent_path().string());
  Check(syngen_dataset_save(ds.get(), f.out.c_str()), "writing '" + f.out + "'");
  std::cout << f.out << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SynGen: dual-channel encoder with a pointer decoder for aspect sentiment "
               "structure extraction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(syngen_version()));

  TrainFlags train_flags;
  auto* train = app.add_subcommand("train", "train a model and write checkpoint + stats");
  AddTrainFlags(train, train_flags, true);

  TrainFlags ablate_flags;
  auto* ablate = app.add_subcommand("ablate", "train every ablation variant and compare");
  AddTrainFlags(ablate, ablate_flags, false);

  DecodeFlags eval_flags;
  auto* evaluate = app.add_subcommand("evaluate", "decode and score; report JSON on stdout");
  AddDecodeFlags(evaluate, eval_flags, false);

  DecodeFlags decode_flags;
  auto* decode = app.add_subcommand("decode", "write predictions as JSON lines");
  AddDecodeFlags(decode, decode_flags, true);

  GradcheckFlags gc;
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
  gradcheck->add_option("--ablation", gc.ablation)->capture_default_str();
  gradcheck->add_option("--node-init", gc.node_init)->capture_default_str();
  gradcheck->add_option("--task", gc.task)->capture_default_str();
  gradcheck->add_flag("--all", gc.all, "every ablation and node initialisation");
  gradcheck->add_option("--d", gc.d)->capture_default_str();
  gradcheck->add_option("--seed", gc.seed);
  gradcheck->add_option("--epsilon", gc.epsilon)->capture_default_str();
  gradcheck->add_option("--threshold", gc.threshold)->capture_default_str();
  gradcheck->add_flag("--break-gradient", gc.break_gradient,
                      "test hook: corrupt one backward rule");

  AttentionFlags af;
  auto* attention =
      app.add_subcommand("analyze-attention", "compare attention of two checkpoints");
  attention->add_option("--ours", af.ours)->required()->check(CLI::ExistingFile);
  attention->add_option("--baseline", af.baseline)->required()->check(CLI::ExistingFile);
  attention->add_option("--data", af.data)->required()->check(CLI::ExistingFile);
  attention->add_option("--out", af.out, "output directory")->capture_default_str();

  SynthFlags sf;
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--n", sf.n, "sentence count")->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth->add_option("--seed", sf.seed, "seed (falls back to SYNGEN_SEED, then 1)");
  synth->add_option("--out", sf.out, "output JSONL path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) return CmdTrain(train_flags);
    if (*ablate) return CmdAblate(ablate_flags);
    if (*evaluate) return CmdEvaluate(eval_flags);
    if (*decode) return CmdDecode(decode_flags);
    if (*gradcheck) return CmdGradcheck(gc);
    if (*attention) return CmdAnalyzeAttention(af);
    if (*synth) return CmdSynth(sf);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    if (f.code == kExitUsage) std::cerr << app.help();
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
