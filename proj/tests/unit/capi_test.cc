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


// Exercises the shared library strictly through its C interface.

#include "syngen/syngen.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string Take(char* s) {
  std::string out = s ? s : "";
  syngen_string_free(s);
  return out;
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CApiTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("syngen_capi_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  syngen_dataset* Synth(size_t n, uint64_t seed) {
    syngen_dataset* ds = nullptr;
    EXPECT_EQ(syngen_dataset_synthesize(n, seed, &ds), SYNGEN_OK);
    return ds;
  }

  static constexpr const char* kTiny =
      R"({"epochs": 2, "batch_size": 2, "model": {"d": 8, "heads": 2, "max_positions": 32}})";

  fs::path dir_;
};

TEST_F(CApiTest, StatusNamesAndVersion) {
  EXPECT_STREQ(syngen_status_name(SYNGEN_OK), "ok");
  EXPECT_STREQ(syngen_status_name(SYNGEN_ERR_INCOMPATIBLE), "incompatibility error");
  EXPECT_NE(std::string(syngen_version()), "");
}

TEST_F(CApiTest, DatasetRoundTrip) {
  syngen_dataset* ds = Synth(5, 2);
  EXPECT_EQ(syngen_dataset_size(ds), 5u);
  const auto a = (dir_ / "a.jsonl").string(), b = (dir_ / "b.jsonl").string();
  ASSERT_EQ(syngen_dataset_save(ds, a.c_str()), SYNGEN_OK);
  syngen_dataset* back = nullptr;
  ASSERT_EQ(syngen_dataset_load(a.c_str(), &back), SYNGEN_OK);
  ASSERT_EQ(syngen_dataset_save(back, b.c_str()), SYNGEN_OK);
  EXPECT_EQ(ReadFile(a), ReadFile(b));
  syngen_dataset_free(ds);
  syngen_dataset_free(back);
}

TEST_F(CApiTest, ErrorsCarryStatusAndMessage) {
  syngen_dataset* ds = nullptr;
  EXPECT_EQ(syngen_dataset_load((dir_ / "missing.jsonl").string().c_str(), &ds), SYNGEN_ERR_IO);
  EXPECT_NE(std::string(syngen_last_error()), "");
  const auto bad = dir_ / "bad.jsonl";
  std::ofstream(bad) << "{\"id\":\"x\",\"tokens\":[\"a\"],\"pos\":[],\"deps\":[[0,1]],\"triplets\":[]}\n";
  EXPECT_EQ(syngen_dataset_load(bad.string().c_str(), &ds), SYNGEN_ERR_VALIDATION);
  char* out = nullptr;
  EXPECT_EQ(syngen_train_config_resolve("{\"epochz\": 1}", &out), SYNGEN_ERR_CONFIGURATION);
  EXPECT_EQ(syngen_train_config_resolve("{not json", &out), SYNGEN_ERR_CONFIGURATION);
  EXPECT_EQ(syngen_dataset_load(nullptr, &ds), SYNGEN_ERR_PRECONDITION);
}

TEST_F(CApiTest, ResolveFillsDefaults) {
  char* out = nullptr;
  ASSERT_EQ(syngen_train_config_resolve(R"({"model": {"ablation": "no_gate"}})", &out), SYNGEN_OK);
  const json j = json::parse(Take(out));
  EXPECT_EQ(j["model"]["ablation"], "no_gate");
  EXPECT_EQ(j["lr_gat"], 1e-5);
  EXPECT_EQ(j["lr_other"], 1e-4);
  EXPECT_EQ(j["task"], "triplet");
}

TEST_F(CApiTest, TrainEvaluateDecodeSaveLoad) {
  syngen_dataset* ds = Synth(4, 3);
  syngen_model* model = nullptr;
  ASSERT_EQ(syngen_model_create(ds, kTiny, &model), SYNGEN_OK) << syngen_last_error();
  char* stats = nullptr;
  const auto csv = (dir_ / "stats.csv").string();
  ASSERT_EQ(syngen_train(model, ds, nullptr, kTiny, csv.c_str(), nullptr, nullptr, &stats),
            SYNGEN_OK)
      << syngen_last_error();
  EXPECT_EQ(json::parse(Take(stats))["epochs"].size(), 2u);
  EXPECT_EQ(ReadFile(csv).substr(0, 27), "epoch,loss,f1,dev_f1,second");

  char* report = nullptr;
  ASSERT_EQ(syngen_evaluate(model, ds, R"({"beam": 1})", &report), SYNGEN_OK);
  const json r = json::parse(Take(report));
  EXPECT_GE(r["f1"].get<double>(), 0.0);
  EXPECT_EQ(syngen_evaluate(model, ds, R"({"beam": 0})", &report), SYNGEN_ERR_CONFIGURATION);

  const auto ckpt = (dir_ / "model.json").string();
  ASSERT_EQ(syngen_model_save(model, ckpt.c_str()), SYNGEN_OK);
  syngen_model* loaded = nullptr;
  ASSERT_EQ(syngen_model_load(ckpt.c_str(), &loaded), SYNGEN_OK);
  const auto p1 = (dir_ / "p1.jsonl").string(), p2 = (dir_ / "p2.jsonl").string();
  ASSERT_EQ(syngen_decode(model, ds, "{}", p1.c_str()), SYNGEN_OK);
  ASSERT_EQ(syngen_decode(loaded, ds, "{}", p2.c_str()), SYNGEN_OK);
  EXPECT_EQ(ReadFile(p1), ReadFile(p2));
  std::istringstream lines(ReadFile(p1));
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    const json j = json::parse(line);
    EXPECT_TRUE(j.contains("sentence_id") && j.contains("predictions") &&
                j.contains("malformed_frames") && j.contains("score"));
    ++count;
  }
  EXPECT_EQ(count, 4u);
  syngen_model_free(loaded);
  syngen_model_free(model);
  syngen_dataset_free(ds);
}

TEST_F(CApiTest, PairTaskNeedsOpinions) {
  const auto path = dir_ / "aesc.jsonl";
  std::ofstream(path) << R"({"id":"a","tokens":["good","food"],"pos":["ADJ","NOUN"],)"
                      << R"("deps":[[2,1],[0,2]],"triplets":[{"aspect":[2,2],"polarity":"positive"}]})"
                      << "\n";
  syngen_dataset* ds = nullptr;
  ASSERT_EQ(syngen_dataset_load(path.string().c_str(), &ds), SYNGEN_OK);
  syngen_model* model = nullptr;
  ASSERT_EQ(syngen_model_create(ds, kTiny, &model), SYNGEN_OK);
  char* report = nullptr;
  EXPECT_EQ(syngen_evaluate(model, ds, R"({"task": "pair"})", &report), SYNGEN_ERR_INCOMPLETE_GOLD);
  EXPECT_EQ(syngen_evaluate(model, ds, R"({"task": "aesc"})", &report), SYNGEN_OK);
  syngen_string_free(report);
  syngen_model_free(model);
  syngen_dataset_free(ds);
}

TEST_F(CApiTest, AnalyzeAttention) {
  syngen_dataset* ds = Synth(3, 4);
  syngen_dataset* other = Synth(3, 99);
  syngen_model* a = nullptr;
  syngen_model* b = nullptr;
  ASSERT_EQ(syngen_model_create(ds, kTiny, &a), SYNGEN_OK);
  ASSERT_EQ(syngen_model_create(other, kTiny, &b), SYNGEN_OK);
  char* report = nullptr;
  const auto out = (dir_ / "attn").string();
  ASSERT_EQ(syngen_analyze_attention(a, a, ds, out.c_str(), &report), SYNGEN_OK);
  const json r = json::parse(Take(report));
  EXPECT_EQ(r["Value"], 0.0);
  EXPECT_EQ(r["Rank"], 0.0);
  EXPECT_EQ(r["Prop"], 0.0);
  EXPECT_TRUE(fs::exists(dir_ / "attn" / "sentence_0_diff.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "attn" / "heatmap.gp"));
  const std::string gap = ReadFile(dir_ / "attn" / "gap_report.csv");
  EXPECT_EQ(gap.substr(0, gap.find('\n')), "scope,sentence_id,aspect,opinion,Value,Rank,Prop");
  EXPECT_EQ(syngen_analyze_attention(a, b, ds, out.c_str(), &report), SYNGEN_ERR_INCOMPATIBLE);
  syngen_model_free(a);
  syngen_model_free(b);
  syngen_dataset_free(ds);
  syngen_dataset_free(other);
}

TEST_F(CApiTest, OversizedSentenceIsIncompatible) {
  syngen_dataset* ds = Synth(2, 5);
  syngen_model* model = nullptr;
  ASSERT_EQ(syngen_model_create(ds, R"({"model": {"d": 8, "heads": 2, "max_positions": 4}})", &model),
            SYNGEN_OK);
  char* report = nullptr;
  EXPECT_EQ(syngen_evaluate(model, ds, "{}", &report), SYNGEN_ERR_INCOMPATIBLE);
  syngen_model_free(model);
  syngen_dataset_free(ds);
}

TEST_F(CApiTest, GradcheckAndBrokenHook) {
  double err = 1.0;
  char* report = nullptr;
  ASSERT_EQ(syngen_gradcheck(R"({"ablation": "no_graph"})", &err, &report), SYNGEN_OK);
  EXPECT_LT(err, 1e-4);
  EXPECT_TRUE(json::parse(Take(report)).contains("worst_param"));
  syngen_set_break_gradient(1);
  ASSERT_EQ(syngen_gradcheck("{}", &err, nullptr), SYNGEN_OK);
  syngen_set_break_gradient(0);
  EXPECT_GT(err, 1e-4);
}

TEST_F(CApiTest, TrainingIsDeterministic) {
  syngen_dataset* ds = Synth(4, 6);
  std::string runs[2];
  for (auto& stats : runs) {
    syngen_model* m = nullptr;
    ASSERT_EQ(syngen_model_create(ds, kTiny, &m), SYNGEN_OK);
    char* s = nullptr;
    ASSERT_EQ(syngen_train(m, ds, nullptr, kTiny, nullptr, nullptr, nullptr, &s), SYNGEN_OK);
    json j = json::parse(Take(s));
    for (auto& e : j["epochs"]) e.erase("seconds");
    stats = j["epochs"].dump();
    syngen_model_free(m);
  }
  EXPECT_EQ(runs[0], runs[1]);
  syngen_dataset_free(ds);
}

}  // namespace
