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

// Annotated sentences, vocabularies, the dependency adjacency matrix and the
// candidate index space the pointer decoder predicts over.

#ifndef SYNGEN_DATA_HPP_
#define SYNGEN_DATA_HPP_

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace syngen {

enum class Polarity { kNeutral = 0, kPositive = 1, kNegative = 2 };

std::string_view PolarityName(Polarity p);
Polarity ParsePolarity(std::string_view name);

enum class SubtaskKind { kAesc, kPair, kTriplet };

std::string_view SubtaskName(SubtaskKind k);
SubtaskKind ParseSubtask(std::string_view name);
// Slots per prediction frame, excluding the terminator: 3, 4 or 5.
std::size_t FrameLength(SubtaskKind k);

// Inclusive, 1-based token range.
struct Span {
  int start = 0;
  int end = 0;
  auto operator<=>(const Span&) const = default;
};

// One (aspect[, opinion][, polarity]) tuple. Used both for gold annotations
// and for decoded predictions.
struct Triplet {
  Span aspect;
  std::optional<Span> opinion;
  std::optional<Polarity> polarity;
  auto operator<=>(const Triplet&) const = default;
};

using GoldTriplet = Triplet;
using Prediction = Triplet;

// Keeps only the fields the subtask predicts.
Triplet Project(const Triplet& t, SubtaskKind k);

struct DepEdge {
  int head = 0;  // 0 = root
  int dependent = 0;
};

struct Sentence {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<std::string> pos_tags;
  std::vector<DepEdge> dep_edges;
  std::vector<GoldTriplet> gold;

  std::size_t size() const { return tokens.size(); }
};

// Raises ErrorKind::kValidation naming the offending field.
void ValidateSentence(const Sentence& s);

Sentence SentenceFromJson(const nlohmann::json& j);
nlohmann::json SentenceToJson(const Sentence& s);

// One JSON object per line; blank lines are skipped. Malformed lines raise
// ErrorKind::kParse with the 1-based line number.
std::vector<Sentence> ParseDataset(const std::string& path);
std::vector<Sentence> ParseDatasetText(std::string_view text);
void WriteDataset(const std::string& path, std::span<const Sentence> sentences);

// Gold predictions for the subtask, projected, deduplicated and sorted.
// Raises ErrorKind::kIncompleteGold when a required field is absent.
std::vector<Triplet> GoldFor(const Sentence& s, SubtaskKind k);

// The 17 Universal POS tags; ids are 1..17 with 0 reserved for padding.
inline constexpr std::array<std::string_view, 17> kUniversalPosTags = {
    "ADJ", "ADP", "ADV",   "AUX",   "CCONJ", "DET",  "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};
inline constexpr std::size_t kPosVocabSize = kUniversalPosTags.size() + 1;
int PosId(std::string_view tag);

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;
  static constexpr int kNeutral = 4;
  static constexpr int kPositive = 5;
  static constexpr int kNegative = 6;
  static constexpr int kNumReserved = 7;

  Vocabulary();
  // Reserved entries first, then tokens in order of first appearance.
  static Vocabulary Build(std::span<const Sentence> sentences);
  // Inverse of tokens(); the reserved prefix must match.
  static Vocabulary FromTokens(std::vector<std::string> tokens);

  int Id(const std::string& token) const;  // unknown -> kUnk
  const std::string& Token(int id) const;
  int PolarityId(Polarity p) const { return kNeutral + static_cast<int>(p); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  void Add(const std::string& token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

// Symmetric n×n dependency graph with self-loops.
class AdjacencyMatrix {
 public:
  explicit AdjacencyMatrix(std::size_t n) : n_(n), bits_(n * n, 0) {}

  std::size_t n() const { return n_; }
  bool at(std::size_t i, std::size_t j) const { return bits_[i * n_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool v) { bits_[i * n_ + j] = v ? 1 : 0; }
  std::span<const unsigned char> bits() const { return bits_; }

  bool operator==(const AdjacencyMatrix&) const = default;

 private:
  std::size_t n_;
  std::vector<unsigned char> bits_;
};

// Word i and j (0-based here) are linked iff an edge joins them in either
// direction; every node is linked to itself. Root edges add nothing.
AdjacencyMatrix BuildAdjacency(const Sentence& s);

enum class IndexKind { kBos, kPointer, kEos, kPolarity };

// Layout over n+5 outcomes: 0 = <s>, 1..n = token pointers, n+1 = </s>,
// n+2..n+4 = neutral, positive, negative.
class CandidateIndexSpace {
 public:
  explicit CandidateIndexSpace(std::size_t n) : n_(static_cast<int>(n)) {}

  int n() const { return n_; }
  int total() const { return n_ + 5; }
  int bos() const { return 0; }
  int eos() const { return n_ + 1; }
  int PolarityIndex(Polarity p) const { return n_ + 2 + static_cast<int>(p); }

  // Raises ErrorKind::kRange outside 0..n+4.
  IndexKind Kind(int y) const;
  Polarity PolarityOf(int y) const;

 private:
  int n_;
};

// Gold frames in canonical order followed by </s>. The decoder input is the
// same sequence shifted right behind <s>; see DecoderInputs.
std::vector<int> LinearizeTargets(const Sentence& s, SubtaskKind k,
                                  const CandidateIndexSpace& space);
std::vector<int> LinearizePredictions(std::span<const Triplet> sorted, SubtaskKind k,
                                      const CandidateIndexSpace& space);
std::vector<int> DecoderInputs(std::span<const int> targets);

}  // namespace syngen

#endif  // SYNGEN_DATA_HPP_
