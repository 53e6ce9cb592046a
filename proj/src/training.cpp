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

#include "training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <numeric>
#include <random>

#include "error.hpp"
#include "optim.hpp"

namespace syngen {

using nlohmann::json;

void TrainConfig::Validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::kConfiguration, what); };
  if (!(lr_gat > 0.0) && lr_gat != 0.0) bad("lr_gat must be non-negative");
  if (!(lr_other > 0.0) && lr_other != 0.0) bad("lr_other must be non-negative");
  if (batch_size == 0) bad("batch_size must be >= 1");
  if (beam == 0) bad("beam must be >= 1");
  model.Validate();
}

json TrainConfigToJson(const TrainConfig& c) {
  return json{{"task", std::string(SubtaskName(c.task))},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"lr_gat", c.lr_gat},
              {"lr_other", c.lr_other},
              {"clip_norm", c.clip_norm},
              {"shuffle", c.shuffle},
              {"eval_every", c.eval_every},
              {"beam", c.beam},
              {"constrained", c.constrained},
              {"checkpoint_dir", c.checkpoint_dir},
              {"model", ModelConfigToJson(c.model)}};
}

TrainConfig TrainConfigFromJson(const json& j, TrainConfig c) {
  if (!j.is_object()) throw Error(ErrorKind::kConfiguration, "train config must be an object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "task") c.task = ParseSubtask(value.get<std::string>());
      else if (key == "epochs") c.epochs = value.get<std::size_t>();
      else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
      else if (key == "lr_gat") c.lr_gat = value.get<double>();
      else if (key == "lr_other") c.lr_other = value.get<double>();
      else if (key == "clip_norm") c.clip_norm = value.get<double>();
      else if (key == "shuffle") c.shuffle = value.get<bool>();
      else if (key == "eval_every") c.eval_every = value.get<std::size_t>();
      else if (key == "beam") c.beam = value.get<std::size_t>();
      else if (key == "constrained") c.constrained = value.get<bool>();
      else if (key == "checkpoint_dir") c.checkpoint_dir = value.get<std::string>();
      else if (key == "model") {
        json merged = ModelConfigToJson(c.model);
        merged.update(value);
        c.model = ModelConfigFromJson(merged);
      } else {
        throw Error(ErrorKind::kConfiguration, "unknown train config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfiguration, std::string("train config: ") + e.what());
  }
  c.Validate();
  return c;
}

void WriteStatsCsv(std::ostream& out, const TrainStats& stats) {
  out << std::setprecision(17) << "epoch,loss,f1,dev_f1,seconds\n";
  for (const auto& e : stats.epochs) {
    out << e.epoch << ',' << e.loss << ',';
    if (e.train_f1) out << *e.train_f1;
    out << ',';
    if (e.dev_f1) out << *e.dev_f1;
    out << ',' << e.seconds << '\n';
  }
}

Evaluation EvaluateModel(const SynGenModel& model, std::span<const Sentence> sentences,
                         const DecodeOptions& options) {
  Evaluation ev;
  std::vector<std::vector<Prediction>> predicted;
  std::vector<std::vector<Triplet>> gold;
  for (const auto& s : sentences) {
    gold.push_back(GoldFor(s, options.kind));
    ModelScorer scorer(model, s);
    ev.decoded.push_back(BeamSearch(scorer, options));
    ev.parsed.push_back(ParseSequence(ev.decoded.back().indices, options.kind,
                                      CandidateIndexSpace(s.size())));
    predicted.push_back(ev.parsed.back().predictions);
  }
  ev.report = SpanF1(predicted, gold, options.kind);
  return ev;
}

std::unique_ptr<SynGenModel> CreateModel(std::span<const Sentence> train, const TrainConfig& config) {
  config.Validate();
  return std::make_unique<SynGenModel>(config.model, Vocabulary::Build(train));
}

Tensor TeacherForcedLoss(const SynGenModel& model, const Sentence& s, SubtaskKind k) {
  const CandidateIndexSpace space(s.size());
  return model.Loss(model.Prepare(s), LinearizeTargets(s, k, space));
}

TrainStats Train(SynGenModel& model, std::span<const Sentence> train,
                 std::span<const Sentence> dev, const TrainConfig& config,
                 const std::function<void(const EpochStats&)>& on_epoch) {
  config.Validate();
  if (train.empty()) throw Error(ErrorKind::kEmptyInput, "training set is empty");
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  struct Example {
    EncodedSentence encoded;
    std::vector<int> targets;
  };
  std::vector<Example> examples;
  for (const auto& s : train) {
    Example ex{model.Prepare(s), LinearizeTargets(s, config.task, CandidateIndexSpace(s.size()))};
    if (ex.targets.size() > model.config().max_positions) {
      throw Error(ErrorKind::kRange, "sentence '" + s.id + "': target length " +
                                         std::to_string(ex.targets.size()) +
                                         " exceeds max_positions");
    }
    examples.push_back(std::move(ex));
  }
  for (const auto& s : dev) GoldFor(s, config.task);

  auto groups = model.params().Groups(config.lr_gat, config.lr_other);
  OptimizerState optimizer;
  std::mt19937_64 order_rng(config.model.seed ^ 0x5eedULL);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);

  DecodeOptions decode{config.task, config.beam, 0, config.constrained};
  TrainStats stats;
  double best_dev = -1.0;
  std::vector<std::vector<double>> best_snapshot;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto epoch_start = Clock::now();
    if (config.shuffle) std::shuffle(order.begin(), order.end(), order_rng);
    double loss_sum = 0.0;
    std::size_t step = 0;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      ++step;
      const std::size_t e = std::min(order.size(), b + config.batch_size);
      Tensor batch_loss;
      for (std::size_t i = b; i < e; ++i) {
        const auto& ex = examples[order[i]];
        Tensor l = model.Loss(ex.encoded, ex.targets);
        batch_loss = batch_loss.defined() ? Add(batch_loss, l) : l;
      }
      batch_loss = Scale(batch_loss, 1.0 / static_cast<double>(e - b));
      const double value = batch_loss.item();
      if (!std::isfinite(value)) {
        throw Error(ErrorKind::kDiverged, "non-finite loss at epoch " + std::to_string(epoch) +
                                              ", step " + std::to_string(step));
      }
      loss_sum += value * static_cast<double>(e - b);
      Backward(batch_loss);
      if (config.clip_norm > 0.0) ClipGradNorm(groups, config.clip_norm);
      AdamStep(groups, optimizer);
    }

    EpochStats es;
    es.epoch = epoch;
    es.loss = loss_sum / static_cast<double>(examples.size());
    const bool last = epoch == config.epochs;
    const bool scheduled = config.eval_every > 0 && epoch % config.eval_every == 0;
    if (last || scheduled) {
      es.train_f1 = EvaluateModel(model, train, decode).report.f1;
    }
    if (!dev.empty() && (last || scheduled || config.eval_every == 0)) {
      es.dev_f1 = EvaluateModel(model, dev, decode).report.f1;
      if (*es.dev_f1 > best_dev) {
        best_dev = *es.dev_f1;
        best_snapshot = model.Snapshot();
        stats.selected_epoch = epoch;
      }
    }
    if (!config.checkpoint_dir.empty()) {
      std::filesystem::create_directories(config.checkpoint_dir);
      char name[32];
      std::snprintf(name, sizeof(name), "epoch_%04zu.json", epoch);
      model.Save((std::filesystem::path(config.checkpoint_dir) / name).string());
    }
    es.seconds = std::chrono::duration<double>(Clock::now() - epoch_start).count();
    stats.epochs.push_back(es);
    if (on_epoch) on_epoch(es);
  }
  if (!best_snapshot.empty()) model.Restore(best_snapshot);
  stats.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return stats;
}

}  // namespace syngen
