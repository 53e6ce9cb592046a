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

#include "synth.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <string>
#include <string_view>

#include "error.hpp"

namespace syngen {

namespace {

struct Lexeme {
  std::vector<std::string_view> words;
};

struct Opinion {
  std::string_view word;
  Polarity polarity;
};

const std::vector<Lexeme>& Aspects() {
  static const std::vector<Lexeme> kAspects = {
      {{"food"}},  {{"service"}}, {{"sushi"}},  {{"staff"}},       {{"pizza"}},
      {{"wine"}},  {{"decor"}},   {{"menu"}},   {{"pasta"}},       {{"dessert"}},
      {{"fish", "tacos"}},        {{"wine", "list"}},              {{"goat", "cheese"}},
      {{"happy", "hour"}}};
  return kAspects;
}

const std::vector<Opinion>& Opinions() {
  static const std::vector<Opinion> kOpinions = {
      {"great", Polarity::kPositive},  {"fresh", Polarity::kPositive},
      {"hot", Polarity::kPositive},    {"tasty", Polarity::kPositive},
      {"friendly", Polarity::kPositive}, {"delicious", Polarity::kPositive},
      {"rude", Polarity::kNegative},   {"cold", Polarity::kNegative},
      {"bland", Polarity::kNegative},  {"slow", Polarity::kNegative},
      {"awful", Polarity::kNegative},  {"stale", Polarity::kNegative},
      {"okay", Polarity::kNeutral},    {"average", Polarity::kNeutral},
      {"ordinary", Polarity::kNeutral}};
  return kOpinions;
}

// mt19937_64 output is fully specified, so draws are portable.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  std::size_t Below(std::size_t k) { return static_cast<std::size_t>(rng_() % k); }

 private:
  std::mt19937_64 rng_;
};

class Builder {
 public:
  void Word(std::string_view w, std::string_view pos) {
    s_.tokens.emplace_back(w);
    s_.pos_tags.emplace_back(pos);
  }
  Span Aspect(const Lexeme& a) {
    const int start = static_cast<int>(s_.tokens.size()) + 1;
    for (auto w : a.words) Word(w, "NOUN");
    return Span{start, static_cast<int>(s_.tokens.size())};
  }
  Span OpinionWord(const Opinion& o) {
    Word(o.word, "ADJ");
    const int i = static_cast<int>(s_.tokens.size());
    return Span{i, i};
  }
  void Gold(Span a, Span o, Polarity p) { s_.gold.push_back(GoldTriplet{a, o, p}); }
  Sentence& sentence() { return s_; }

 private:
  Sentence s_;
};

// Random recursive tree over a random node order: the first node is the
// root and every later node hangs off an earlier one.
void RandomTree(Sentence& s, Draw& draw) {
  const std::size_t n = s.size();
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i) + 1;
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[draw.Below(i)]);
  s.dep_edges.assign(n, DepEdge{});
  for (std::size_t i = 0; i < n; ++i) {
    const int head = i == 0 ? 0 : order[draw.Below(i)];
    s.dep_edges[i] = DepEdge{head, order[i]};
  }
  std::sort(s.dep_edges.begin(), s.dep_edges.end(),
            [](const DepEdge& a, const DepEdge& b) { return a.dependent < b.dependent; });
}

}  // namespace

std::vector<Sentence> Synthesize(std::size_t count, std::uint64_t seed) {
  if (count == 0) throw Error(ErrorKind::kConfiguration, "synth: count must be >= 1");
  Draw draw(seed);
  const auto& aspects = Aspects();
  const auto& opinions = Opinions();
  std::vector<Sentence> out;
  for (std::size_t i = 0; i < count; ++i) {
    Builder b;
    const Lexeme& a1 = aspects[draw.Below(aspects.size())];
    const Opinion& o1 = opinions[draw.Below(opinions.size())];
    std::size_t a2i = draw.Below(aspects.size());
    if (&aspects[a2i] == &a1) a2i = (a2i + 1) % aspects.size();
    const Lexeme& a2 = aspects[a2i];
    const Opinion& o2 = opinions[draw.Below(opinions.size())];
    switch (draw.Below(6)) {
      case 0: {  // the A is O .
        b.Word("the", "DET");
        Span a = b.Aspect(a1);
        b.Word("is", "AUX");
        Span o = b.OpinionWord(o1);
        b.Word(".", "PUNCT");
        b.Gold(a, o, o1.polarity);
        break;
      }
      case 1: {  // A was really O !
        Span a = b.Aspect(a1);
        b.Word("was", "AUX");
        b.Word("really", "ADV");
        Span o = b.OpinionWord(o1);
        b.Word("!", "PUNCT");
        b.Gold(a, o, o1.polarity);
        break;
      }
      case 2: {  // i thought the O A was worth it .
        b.Word("i", "PRON");
        b.Word("thought", "VERB");
        b.Word("the", "DET");
        Span o = b.OpinionWord(o1);
        Span a = b.Aspect(a1);
        b.Word("was", "AUX");
        b.Word("worth", "ADJ");
        b.Word("it", "PRON");
        b.Word(".", "PUNCT");
        b.Gold(a, o, o1.polarity);
        break;
      }
      case 3: {  // the A is O but the A2 is O2 .
        b.Word("the", "DET");
        Span a = b.Aspect(a1);
        b.Word("is", "AUX");
        Span o = b.OpinionWord(o1);
        b.Word("but", "CCONJ");
        b.Word("the", "DET");
        Span a_2 = b.Aspect(a2);
        b.Word("is", "AUX");
        Span o_2 = b.OpinionWord(o2);
        b.Word(".", "PUNCT");
        b.Gold(a, o, o1.polarity);
        b.Gold(a_2, o_2, o2.polarity);
        break;
      }
      case 4: {  // O A and O2 A2 .
        Span o = b.OpinionWord(o1);
        Span a = b.Aspect(a1);
        b.Word("and", "CCONJ");
        Span o_2 = b.OpinionWord(o2);
        Span a_2 = b.Aspect(a2);
        b.Word(".", "PUNCT");
        b.Gold(a, o, o1.polarity);
        b.Gold(a_2, o_2, o2.polarity);
        break;
      }
      default: {  // we found the A O and the A2 quite O2 .
        b.Word("we", "PRON");
        b.Word("found", "VERB");
        b.Word("the", "DET");
        Span a = b.Aspect(a1);
        Span o = b.OpinionWord(o1);
        b.Word("and", "CCONJ");
        b.Word("the", "DET");
        Span a_2 = b.Aspect(a2);
        b.Word("quite", "ADV");
        Span o_2 = b.OpinionWord(o2);
        b.Word(".", "PUNCT");
        b.Gold(a, o, o1.polarity);
        b.Gold(a_2, o_2, o2.polarity);
        break;
      }
    }
    Sentence& s = b.sentence();
    s.id = "synth-" + std::to_string(i);
    RandomTree(s, draw);
    ValidateSentence(s);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace syngen
