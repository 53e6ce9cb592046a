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

#include "syngen/syngen.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "evaluation.hpp"
#include "inference.hpp"
#include "model.hpp"
#include "model_check.hpp"
#include "synth.hpp"
#include "training.hpp"

struct syngen_dataset {
  std::vector<syngen::Sentence> sentences;
};

struct syngen_model {
  std::unique_ptr<syngen::SynGenModel> model;
};

namespace {

using nlohmann::json;
using syngen::Error;
using syngen::ErrorKind;

thread_local std::string g_last_error;

syngen_status StatusFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimension: return SYNGEN_ERR_DIMENSION;
    case ErrorKind::kDegenerateMask: return SYNGEN_ERR_DEGENERATE_MASK;
    case ErrorKind::kRank: return SYNGEN_ERR_RANK;
    case ErrorKind::kDeterminism: return SYNGEN_ERR_DETERMINISM;
    case ErrorKind::kIncompleteBackward: return SYNGEN_ERR_INCOMPLETE_BACKWARD;
    case ErrorKind::kParse: return SYNGEN_ERR_PARSE;
    case ErrorKind::kValidation: return SYNGEN_ERR_VALIDATION;
    case ErrorKind::kIncompleteGold: return SYNGEN_ERR_INCOMPLETE_GOLD;
    case ErrorKind::kRange: return SYNGEN_ERR_RANGE;
    case ErrorKind::kConfiguration: return SYNGEN_ERR_CONFIGURATION;
    case ErrorKind::kEmptyInput: return SYNGEN_ERR_EMPTY_INPUT;
    case ErrorKind::kPrecondition: return SYNGEN_ERR_PRECONDITION;
    case ErrorKind::kAlignment: return SYNGEN_ERR_ALIGNMENT;
    case ErrorKind::kIncompatible: return SYNGEN_ERR_INCOMPATIBLE;
    case ErrorKind::kDiverged: return SYNGEN_ERR_DIVERGED;
    case ErrorKind::kIo: return SYNGEN_ERR_IO;
  }
  return SYNGEN_ERR_INTERNAL;
}

template <typename Fn>
syngen_status Guard(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return SYNGEN_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return StatusFor(e.kind());
  } catch (const json::exception& e) {
    g_last_error = std::string("json: ") + e.what();
    return SYNGEN_ERR_PARSE;
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return SYNGEN_ERR_IO;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SYNGEN_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return SYNGEN_ERR_INTERNAL;
  }
}

void Require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::kPrecondition, what);
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json ParseJson(const char* text, const char* what) {
  if (text == nullptr || *text == '\0') return json::object();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kConfiguration, std::string(what) + ": " + e.what());
  }
}

syngen::DecodeOptions DecodeOptionsFromJson(const json& j) {
  syngen::DecodeOptions o;
  for (const auto& [key, value] : j.items()) {
    if (key == "task") o.kind = syngen::ParseSubtask(value.get<std::string>());
    else if (key == "beam") o.beam = value.get<std::size_t>();
    else if (key == "max_steps") o.max_steps = value.get<std::size_t>();
    else if (key == "constrained") o.constrained = value.get<bool>();
    else throw Error(ErrorKind::kConfiguration, "unknown decode option '" + key + "'");
  }
  if (o.beam == 0) throw Error(ErrorKind::kConfiguration, "beam must be >= 1");
  return o;
}

json TripletToJson(const syngen::Triplet& t) {
  json o;
  o["aspect"] = {t.aspect.start, t.aspect.end};
  if (t.opinion) o["opinion"] = {t.opinion->start, t.opinion->end};
  if (t.polarity) o["polarity"] = std::string(syngen::PolarityName(*t.polarity));
  return o;
}

// Sentences longer than the model's positional tables cannot be encoded.
void CheckCompatible(const syngen::SynGenModel& model, const std::vector<syngen::Sentence>& ds) {
  for (const auto& s : ds) {
    if (s.size() + 2 > model.config().max_positions) {
      throw Error(ErrorKind::kIncompatible,
                  "sentence '" + s.id + "' has " + std::to_string(s.size()) +
                      " tokens; the checkpoint supports at most " +
                      std::to_string(model.config().max_positions - 2));
    }
  }
}

std::vector<std::string> Labels(const syngen::Sentence& s) {
  std::vector<std::string> labels{"<s>"};
  labels.insert(labels.end(), s.tokens.begin(), s.tokens.end());
  labels.push_back("</s>");
  return labels;
}

void WriteCsvFile(const std::filesystem::path& path, const syngen::Tensor& m,
                  const std::vector<std::string>& labels) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  syngen::WriteAttentionCsv(out, m, labels);
}

}  // namespace

extern "C" {

const char* syngen_version(void) { return "0.1.0"; }

const char* syngen_status_name(syngen_status status) {
  switch (status) {
    case SYNGEN_OK: return "ok";
    case SYNGEN_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SYNGEN_ERR_DIMENSION: return "dimension error";
    case SYNGEN_ERR_DEGENERATE_MASK: return "degenerate mask";
    case SYNGEN_ERR_RANK: return "rank error";
    case SYNGEN_ERR_DETERMINISM: return "determinism error";
    case SYNGEN_ERR_INCOMPLETE_BACKWARD: return "incomplete backward";
    case SYNGEN_ERR_PARSE: return "parse error";
    case SYNGEN_ERR_VALIDATION: return "validation error";
    case SYNGEN_ERR_INCOMPLETE_GOLD: return "incomplete gold";
    case SYNGEN_ERR_RANGE: return "range error";
    case SYNGEN_ERR_CONFIGURATION: return "configuration error";
    case SYNGEN_ERR_EMPTY_INPUT: return "empty input";
    case SYNGEN_ERR_PRECONDITION: return "precondition error";
    case SYNGEN_ERR_ALIGNMENT: return "alignment error";
    case SYNGEN_ERR_INCOMPATIBLE: return "incompatibility error";
    case SYNGEN_ERR_DIVERGED: return "diverged training";
    case SYNGEN_ERR_IO: return "io error";
    case SYNGEN_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* syngen_last_error(void) { return g_last_error.c_str(); }

void syngen_string_free(char* s) { std::free(s); }

syngen_status syngen_dataset_load(const char* path, syngen_dataset** out) {
  return Guard([&] {
    Require(path && out, "dataset_load: null argument");
    auto ds = std::make_unique<syngen_dataset>();
    ds->sentences = syngen::ParseDataset(path);
    *out = ds.release();
  });
}

syngen_status syngen_dataset_synthesize(size_t count, uint64_t seed, syngen_dataset** out) {
  return Guard([&] {
    Require(out != nullptr, "dataset_synthesize: null argument");
    auto ds = std::make_unique<syngen_dataset>();
    ds->sentences = syngen::Synthesize(count, seed);
    *out = ds.release();
  });
}

syngen_status syngen_dataset_save(const syngen_dataset* ds, const char* path) {
  return Guard([&] {
    Require(ds && path, "dataset_save: null argument");
    syngen::WriteDataset(path, ds->sentences);
  });
}

size_t syngen_dataset_size(const syngen_dataset* ds) { return ds ? ds->sentences.size() : 0; }

void syngen_dataset_free(syngen_dataset* ds) { delete ds; }

syngen_status syngen_train_config_resolve(const char* overrides_json, char** resolved_json) {
  return Guard([&] {
    Require(resolved_json != nullptr, "train_config_resolve: null argument");
    const auto config = syngen::TrainConfigFromJson(ParseJson(overrides_json, "train config"));
    *resolved_json = Dup(syngen::TrainConfigToJson(config).dump(2));
  });
}

syngen_status syngen_model_create(const syngen_dataset* train, const char* train_config_json,
                                  syngen_model** out) {
  return Guard([&] {
    Require(train && out, "model_create: null argument");
    const auto config = syngen::TrainConfigFromJson(ParseJson(train_config_json, "train config"));
    auto m = std::make_unique<syngen_model>();
    m->model = syngen::CreateModel(train->sentences, config);
    *out = m.release();
  });
}

syngen_status syngen_model_load(const char* path, syngen_model** out) {
  return Guard([&] {
    Require(path && out, "model_load: null argument");
    auto m = std::make_unique<syngen_model>();
    m->model = syngen::SynGenModel::Load(path);
    *out = m.release();
  });
}

syngen_status syngen_model_save(const syngen_model* model, const char* path) {
  return Guard([&] {
    Require(model && path, "model_save: null argument");
    model->model->Save(path);
  });
}

syngen_status syngen_model_config(const syngen_model* model, char** config_json) {
  return Guard([&] {
    Require(model && config_json, "model_config: null argument");
    json j = syngen::ModelConfigToJson(model->model->config());
    j["vocab_size"] = model->model->vocab().size();
    j["num_parameters"] = model->model->params().TotalSize();
    *config_json = Dup(j.dump(2));
  });
}

void syngen_model_free(syngen_model* model) { delete model; }

syngen_status syngen_train(syngen_model* model, const syngen_dataset* train,
                           const syngen_dataset* dev, const char* train_config_json,
                           const char* stats_csv_path, syngen_epoch_callback callback, void* user,
                           char** stats_json) {
  return Guard([&] {
    Require(model && train, "train: null argument");
    auto& m = *model->model;
    json overrides = ParseJson(train_config_json, "train config");
    // The architecture belongs to the model; only optimisation settings apply.
    overrides.erase("model");
    syngen::TrainConfig base;
    base.model = m.config();
    const auto config = syngen::TrainConfigFromJson(overrides, base);
    CheckCompatible(m, train->sentences);
    static const std::vector<syngen::Sentence> kNoDev;
    if (dev) CheckCompatible(m, dev->sentences);
    const auto stats = syngen::Train(
        m, train->sentences, dev ? dev->sentences : kNoDev, config,
        [&](const syngen::EpochStats& e) {
          if (callback) {
            callback(user, e.epoch, e.loss,
                     e.train_f1 ? *e.train_f1 : std::numeric_limits<double>::quiet_NaN());
          }
        });
    if (stats_csv_path) {
      std::ofstream out(stats_csv_path);
      if (!out) throw Error(ErrorKind::kIo, std::string("cannot write '") + stats_csv_path + "'");
      syngen::WriteStatsCsv(out, stats);
    }
    if (stats_json) {
      json epochs = json::array();
      for (const auto& e : stats.epochs) {
        json row{{"epoch", e.epoch}, {"loss", e.loss}, {"seconds", e.seconds}};
        row["f1"] = e.train_f1 ? json(*e.train_f1) : json(nullptr);
        row["dev_f1"] = e.dev_f1 ? json(*e.dev_f1) : json(nullptr);
        epochs.push_back(row);
      }
      json j{{"epochs", epochs}, {"wall_seconds", stats.wall_seconds}};
      j["selected_epoch"] = stats.selected_epoch ? json(*stats.selected_epoch) : json(nullptr);
      *stats_json = Dup(j.dump());
    }
  });
}

syngen_status syngen_evaluate(const syngen_model* model, const syngen_dataset* ds,
                              const char* decode_options_json, char** report_json) {
  return Guard([&] {
    Require(model && ds && report_json, "evaluate: null argument");
    const auto options = DecodeOptionsFromJson(ParseJson(decode_options_json, "decode options"));
    CheckCompatible(*model->model, ds->sentences);
    const auto ev = syngen::EvaluateModel(*model->model, ds->sentences, options);
    json j = syngen::EvalReportToJson(ev.report);
    std::size_t malformed = 0;
    for (const auto& p : ev.parsed) malformed += p.malformed_frames;
    j["malformed_frames"] = malformed;
    j["task"] = std::string(syngen::SubtaskName(options.kind));
    j["beam"] = options.beam;
    j["constrained"] = options.constrained;
    *report_json = Dup(j.dump());
  });
}

syngen_status syngen_decode(const syngen_model* model, const syngen_dataset* ds,
                            const char* decode_options_json, const char* output_path) {
  return Guard([&] {
    Require(model && ds && output_path, "decode: null argument");
    const auto options = DecodeOptionsFromJson(ParseJson(decode_options_json, "decode options"));
    CheckCompatible(*model->model, ds->sentences);
    std::ofstream out(output_path, std::ios::binary);
    if (!out) throw Error(ErrorKind::kIo, std::string("cannot write '") + output_path + "'");
    for (const auto& s : ds->sentences) {
      syngen::ModelScorer scorer(*model->model, s);
      const auto decoded = syngen::BeamSearch(scorer, options);
      const auto parsed =
          syngen::ParseSequence(decoded.indices, options.kind, syngen::CandidateIndexSpace(s.size()));
      json preds = json::array();
      for (const auto& p : parsed.predictions) preds.push_back(TripletToJson(p));
      json line{{"sentence_id", s.id},
                {"predictions", preds},
                {"malformed_frames", parsed.malformed_frames},
                {"score", decoded.score},
                {"indices", decoded.indices}};
      out << line.dump() << '\n';
    }
  });
}

syngen_status syngen_gradcheck(const char* options_json, double* max_rel_err, char** report_json) {
  return Guard([&] {
    const json j = ParseJson(options_json, "gradcheck options");
    syngen::ModelGradCheckOptions o;
    for (const auto& [key, value] : j.items()) {
      if (key == "ablation") o.ablation = syngen::ParseAblation(value.get<std::string>());
      else if (key == "node_init") o.node_init = syngen::ParseNodeInit(value.get<std::string>());
      else if (key == "task") o.task = syngen::ParseSubtask(value.get<std::string>());
      else if (key == "d") o.d = value.get<std::size_t>();
      else if (key == "seed") o.seed = value.get<std::uint64_t>();
      else if (key == "epsilon") o.epsilon = value.get<double>();
      else throw Error(ErrorKind::kConfiguration, "unknown gradcheck option '" + key + "'");
    }
    const auto report = syngen::CheckModelGradients(o);
    if (max_rel_err) *max_rel_err = report.overall.max_rel_error;
    if (report_json) {
      json groups = json::object();
      for (const auto& [name, r] : report.per_group) {
        groups[name] = json{{"max_rel_err", r.max_rel_error},
                            {"worst_param", r.worst_param},
                            {"entries", r.entries_checked}};
      }
      json out{{"ablation", std::string(syngen::AblationName(o.ablation))},
               {"node_init", std::string(syngen::NodeInitName(o.node_init))},
               {"task", std::string(syngen::SubtaskName(o.task))},
               {"d", o.d},
               {"n", report.n},
               {"epsilon", o.epsilon},
               {"max_rel_err", report.overall.max_rel_error},
               {"worst_param", report.overall.worst_param},
               {"worst_index", report.overall.worst_index},
               {"worst_analytic", report.overall.worst_analytic},
               {"worst_numeric", report.overall.worst_numeric},
               {"entries", report.overall.entries_checked},
               {"groups", groups},
               {"seconds", report.seconds}};
      *report_json = Dup(out.dump());
    }
  });
}

void syngen_set_break_gradient(int broken) { syngen::SetBreakGradient(broken != 0); }

syngen_status syngen_analyze_attention(const syngen_model* ours, const syngen_model* baseline,
                                       const syngen_dataset* ds, const char* out_dir,
                                       char** report_json) {
  return Guard([&] {
    Require(ours && baseline && ds && out_dir, "analyze_attention: null argument");
    if (!(ours->model->vocab() == baseline->model->vocab())) {
      throw Error(ErrorKind::kIncompatible, "the two checkpoints use different vocabularies");
    }
    CheckCompatible(*ours->model, ds->sentences);
    CheckCompatible(*baseline->model, ds->sentences);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    std::vector<syngen::PairGap> gaps;
    json files = json::array();
    for (std::size_t i = 0; i < ds->sentences.size(); ++i) {
      const auto& s = ds->sentences[i];
      const auto a = syngen::AttentionExtract(*ours->model, s);
      const auto b = syngen::AttentionExtract(*baseline->model, s);
      const auto labels = Labels(s);
      const std::string stem = "sentence_" + std::to_string(i);
      WriteCsvFile(dir / (stem + "_ours.csv"), a, labels);
      WriteCsvFile(dir / (stem + "_baseline.csv"), b, labels);
      std::vector<double> diff(a.numel());
      for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = a.data()[k] - b.data()[k];
      WriteCsvFile(dir / (stem + "_diff.csv"), syngen::Tensor::FromData(a.shape(), diff), labels);
      files.push_back(json{{"sentence_id", s.id}, {"stem", stem}});
      for (auto g : syngen::AttentionGapPairs(a, b, s.gold)) {
        g.sentence_id = s.id;
        gaps.push_back(g);
      }
    }
    const auto report = syngen::SummarizeGaps(std::move(gaps));
    {
      std::ofstream out(dir / "gap_report.csv");
      if (!out) throw Error(ErrorKind::kIo, "cannot write gap_report.csv");
      syngen::WriteGapReportCsv(out, report);
    }
    {
      // gnuplot heatmap of the first difference matrix.
      std::ofstream gp(dir / "heatmap.gp");
      gp << "set datafile separator ','\n"
            "set palette defined (-1 'blue', 0 'white', 1 'red')\n"
            "set xtics rotate by 45 right\n"
            "plot 'sentence_0_diff.csv' matrix rowheaders columnheaders with image\n";
    }
    if (report_json) {
      json j{{"Value", report.value_gap}, {"Rank", report.rank_gap}, {"Prop", report.prop},
             {"pairs", report.pairs},     {"prop_excluded", report.prop_excluded},
             {"files", files}};
      *report_json = Dup(j.dump());
    }
  });
}

}  // extern "C"
