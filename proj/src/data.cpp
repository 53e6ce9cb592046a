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

#include "data.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "error.hpp"

namespace syngen {

using nlohmann::json;

std::string_view PolarityName(Polarity p) {
  switch (p) {
    case Polarity::kNeutral: return "neutral";
    case Polarity::kPositive: return "positive";
    case Polarity::kNegative: return "negative";
  }
  return "neutral";
}

Polarity ParsePolarity(std::string_view name) {
  if (name == "neutral") return Polarity::kNeutral;
  if (name == "positive") return Polarity::kPositive;
  if (name == "negative") return Polarity::kNegative;
  throw Error(ErrorKind::kValidation, "polarity: unknown value '" + std::string(name) + "'");
}

std::string_view SubtaskName(SubtaskKind k) {
  switch (k) {
    case SubtaskKind::kAesc: return "aesc";
    case SubtaskKind::kPair: return "pair";
    case SubtaskKind::kTriplet: return "triplet";
  }
  return "triplet";
}

SubtaskKind ParseSubtask(std::string_view name) {
  if (name == "aesc") return SubtaskKind::kAesc;
  if (name == "pair") return SubtaskKind::kPair;
  if (name == "triplet") return SubtaskKind::kTriplet;
  throw Error(ErrorKind::kConfiguration, "unknown task '" + std::string(name) + "'");
}

std::size_t FrameLength(SubtaskKind k) {
  switch (k) {
    case SubtaskKind::kAesc: return 3;
    case SubtaskKind::kPair: return 4;
    case SubtaskKind::kTriplet: return 5;
  }
  return 5;
}

Triplet Project(const Triplet& t, SubtaskKind k) {
  Triplet out;
  out.aspect = t.aspect;
  if (k != SubtaskKind::kAesc) out.opinion = t.opinion;
  if (k != SubtaskKind::kPair) out.polarity = t.polarity;
  return out;
}

// ---------------------------------------------------------------------------
// Validation and JSON

namespace {

[[noreturn]] void Invalid(const Sentence& s, const std::string& what) {
  throw Error(ErrorKind::kValidation,
              (s.id.empty() ? std::string() : "sentence '" + s.id + "': ") + what);
}

void CheckSpan(const Sentence& s, const Span& span, const char* field) {
  const int n = static_cast<int>(s.size());
  if (span.start < 1 || span.start > span.end || span.end > n) {
    Invalid(s, std::string(field) + ": span [" + std::to_string(span.start) + ", " +
                   std::to_string(span.end) + "] outside 1.." + std::to_string(n));
  }
}

Span SpanFromJson(const json& j, const char* field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw Error(ErrorKind::kValidation, std::string(field) + ": expected [start, end]");
  }
  return Span{j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

void ValidateSentence(const Sentence& s) {
  const std::size_t n = s.size();
  if (n == 0) Invalid(s, "tokens: sentence is empty");
  if (s.pos_tags.size() != n) {
    Invalid(s, "pos: " + std::to_string(s.pos_tags.size()) + " tags for " + std::to_string(n) +
                   " tokens");
  }
  for (const auto& tag : s.pos_tags) {
    if (std::find(kUniversalPosTags.begin(), kUniversalPosTags.end(), tag) ==
        kUniversalPosTags.end()) {
      Invalid(s, "pos: '" + tag + "' is not a Universal POS tag");
    }
  }
  if (s.dep_edges.size() != n) {
    Invalid(s, "deps: " + std::to_string(s.dep_edges.size()) + " edges for " +
                   std::to_string(n) + " tokens");
  }
  std::vector<int> head(n + 1, -1);
  int roots = 0;
  for (const auto& e : s.dep_edges) {
    if (e.dependent < 1 || e.dependent > static_cast<int>(n)) {
      Invalid(s, "deps: dependent " + std::to_string(e.dependent) + " outside 1.." +
                     std::to_string(n));
    }
    if (e.head < 0 || e.head > static_cast<int>(n)) {
      Invalid(s, "deps: head " + std::to_string(e.head) + " outside 0.." + std::to_string(n));
    }
    if (e.head == e.dependent) Invalid(s, "deps: self edge on " + std::to_string(e.head));
    if (head[e.dependent] != -1) {
      Invalid(s, "deps: dependent " + std::to_string(e.dependent) + " has two heads");
    }
    head[e.dependent] = e.head;
    if (e.head == 0) ++roots;
  }
  if (roots != 1) Invalid(s, "deps: expected exactly one root edge, found " + std::to_string(roots));
  // Every word must reach the root without revisiting a node.
  for (std::size_t start = 1; start <= n; ++start) {
    int v = static_cast<int>(start);
    std::size_t hops = 0;
    while (v != 0) {
      v = head[v];
      if (++hops > n) Invalid(s, "deps: cycle through word " + std::to_string(start));
    }
  }
  for (const auto& t : s.gold) {
    CheckSpan(s, t.aspect, "triplets.aspect");
    if (t.opinion) CheckSpan(s, *t.opinion, "triplets.opinion");
  }
}

Sentence SentenceFromJson(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kValidation, "expected a JSON object");
  Sentence s;
  auto require = [&](const char* key) -> const json& {
    auto it = j.find(key);
    if (it == j.end()) throw Error(ErrorKind::kValidation, std::string(key) + ": missing");
    return *it;
  };
  if (auto it = j.find("id"); it != j.end()) {
    s.id = it->is_string() ? it->get<std::string>() : it->dump();
  }
  try {
    s.tokens = require("tokens").get<std::vector<std::string>>();
    s.pos_tags = require("pos").get<std::vector<std::string>>();
  } catch (const json::type_error&) {
    throw Error(ErrorKind::kValidation, "tokens/pos: expected arrays of strings");
  }
  for (const auto& e : require("deps")) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer()) {
      throw Error(ErrorKind::kValidation, "deps: expected [head, dependent] pairs");
    }
    s.dep_edges.push_back(DepEdge{e[0].get<int>(), e[1].get<int>()});
  }
  if (auto it = j.find("triplets"); it != j.end()) {
    if (!it->is_array()) throw Error(ErrorKind::kValidation, "triplets: expected an array");
    for (const auto& t : *it) {
      if (!t.is_object()) throw Error(ErrorKind::kValidation, "triplets: expected objects");
      GoldTriplet g;
      if (!t.contains("aspect")) throw Error(ErrorKind::kValidation, "triplets.aspect: missing");
      g.aspect = SpanFromJson(t["aspect"], "triplets.aspect");
      if (t.contains("opinion")) g.opinion = SpanFromJson(t["opinion"], "triplets.opinion");
      if (t.contains("polarity")) {
        if (!t["polarity"].is_string()) {
          throw Error(ErrorKind::kValidation, "triplets.polarity: expected a string");
        }
        g.polarity = ParsePolarity(t["polarity"].get<std::string>());
      }
      s.gold.push_back(g);
    }
  }
  ValidateSentence(s);
  return s;
}

json SentenceToJson(const Sentence& s) {
  json j;
  if (!s.id.empty()) j["id"] = s.id;
  j["tokens"] = s.tokens;
  j["pos"] = s.pos_tags;
  json deps = json::array();
  for (const auto& e : s.dep_edges) deps.push_back({e.head, e.dependent});
  j["deps"] = deps;
  json triplets = json::array();
  for (const auto& t : s.gold) {
    json o;
    o["aspect"] = {t.aspect.start, t.aspect.end};
    if (t.opinion) o["opinion"] = {t.opinion->start, t.opinion->end};
    if (t.polarity) o["polarity"] = std::string(PolarityName(*t.polarity));
    triplets.push_back(o);
  }
  j["triplets"] = triplets;
  return j;
}

std::vector<Sentence> ParseDatasetText(std::string_view text) {
  std::vector<Sentence> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      Sentence s = SentenceFromJson(j);
      if (s.id.empty()) s.id = std::to_string(out.size());
      out.push_back(std::move(s));
    } catch (const Error& e) {
      throw Error(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Sentence> ParseDataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open dataset '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseDatasetText(buf.str());
}

void WriteDataset(const std::string& path, std::span<const Sentence> sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write dataset '" + path + "'");
  for (const auto& s : sentences) out << SentenceToJson(s).dump() << '\n';
}

std::vector<Triplet> GoldFor(const Sentence& s, SubtaskKind k) {
  std::vector<Triplet> out;
  for (const auto& t : s.gold) {
    if (k != SubtaskKind::kAesc && !t.opinion) {
      throw Error(ErrorKind::kIncompleteGold, "sentence '" + s.id + "': opinion span required for " +
                                                  std::string(SubtaskName(k)));
    }
    if (k != SubtaskKind::kPair && !t.polarity) {
      throw Error(ErrorKind::kIncompleteGold, "sentence '" + s.id + "': polarity required for " +
                                                  std::string(SubtaskName(k)));
    }
    out.push_back(Project(t, k));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Vocabularies

int PosId(std::string_view tag) {
  for (std::size_t i = 0; i < kUniversalPosTags.size(); ++i) {
    if (kUniversalPosTags[i] == tag) return static_cast<int>(i) + 1;
  }
  throw Error(ErrorKind::kValidation, "pos: '" + std::string(tag) + "' is not a Universal POS tag");
}

Vocabulary::Vocabulary() {
  for (const char* t : {"<pad>", "<s>", "</s>", "<unk>", "<neutral>", "<positive>", "<negative>"}) {
    Add(t);
  }
}

void Vocabulary::Add(const std::string& token) {
  if (ids_.emplace(token, static_cast<int>(tokens_.size())).second) tokens_.push_back(token);
}

Vocabulary Vocabulary::Build(std::span<const Sentence> sentences) {
  Vocabulary v;
  for (const auto& s : sentences)
    for (const auto& t : s.tokens) v.Add(t);
  return v;
}

Vocabulary Vocabulary::FromTokens(std::vector<std::string> tokens) {
  Vocabulary v;
  if (tokens.size() < kNumReserved ||
      !std::equal(v.tokens_.begin(), v.tokens_.end(), tokens.begin())) {
    throw Error(ErrorKind::kIncompatible, "vocabulary: reserved entries do not match");
  }
  for (std::size_t i = kNumReserved; i < tokens.size(); ++i) {
    if (v.ids_.count(tokens[i])) {
      throw Error(ErrorKind::kIncompatible, "vocabulary: duplicate token '" + tokens[i] + "'");
    }
    v.Add(tokens[i]);
  }
  return v;
}

int Vocabulary::Id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::Token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw Error(ErrorKind::kRange, "vocabulary id " + std::to_string(id) + " out of range");
  }
  return tokens_[id];
}

// ---------------------------------------------------------------------------

AdjacencyMatrix BuildAdjacency(const Sentence& s) {
  const std::size_t n = s.size();
  AdjacencyMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) a.set(i, i, true);
  for (const auto& e : s.dep_edges) {
    if (e.head == 0) continue;
    a.set(e.head - 1, e.dependent - 1, true);
    a.set(e.dependent - 1, e.head - 1, true);
  }
  return a;
}

IndexKind CandidateIndexSpace::Kind(int y) const {
  if (y < 0 || y > n_ + 4) {
    throw Error(ErrorKind::kRange, "index " + std::to_string(y) + " outside 0.." +
                                       std::to_string(n_ + 4));
  }
  if (y == 0) return IndexKind::kBos;
  if (y <= n_) return IndexKind::kPointer;
  if (y == n_ + 1) return IndexKind::kEos;
  return IndexKind::kPolarity;
}

Polarity CandidateIndexSpace::PolarityOf(int y) const {
  if (Kind(y) != IndexKind::kPolarity) {
    throw Error(ErrorKind::kRange, "index " + std::to_string(y) + " is not a polarity index");
  }
  return static_cast<Polarity>(y - (n_ + 2));
}

std::vector<int> LinearizePredictions(std::span<const Triplet> sorted, SubtaskKind k,
                                      const CandidateIndexSpace& space) {
  std::vector<int> out;
  out.reserve(sorted.size() * FrameLength(k) + 1);
  for (const auto& t : sorted) {
    out.push_back(t.aspect.start);
    out.push_back(t.aspect.end);
    if (k != SubtaskKind::kAesc) {
      out.push_back(t.opinion->start);
      out.push_back(t.opinion->end);
    }
    if (k != SubtaskKind::kPair) out.push_back(space.PolarityIndex(*t.polarity));
  }
  out.push_back(space.eos());
  return out;
}

std::vector<int> LinearizeTargets(const Sentence& s, SubtaskKind k,
                                  const CandidateIndexSpace& space) {
  const auto gold = GoldFor(s, k);
  return LinearizePredictions(gold, k, space);
}

std::vector<int> DecoderInputs(std::span<const int> targets) {
  std::vector<int> in;
  in.reserve(targets.size());
  in.push_back(0);
  if (!targets.empty()) in.insert(in.end(), targets.begin(), targets.end() - 1);
  return in;
}

}  // namespace syngen
