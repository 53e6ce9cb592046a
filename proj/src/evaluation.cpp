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

#include "evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <set>

#include "error.hpp"

namespace syngen {

nlohmann::json EvalReportToJson(const EvalReport& r) {
  return nlohmann::json{{"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1},
                        {"predicted", r.predicted}, {"gold", r.gold},     {"correct", r.correct}};
}

EvalReport SpanF1(std::span<const std::vector<Prediction>> predicted,
                  std::span<const std::vector<Triplet>> gold, SubtaskKind k) {
  if (predicted.size() != gold.size()) {
    throw Error(ErrorKind::kAlignment, std::to_string(predicted.size()) + " prediction sets vs " +
                                           std::to_string(gold.size()) + " gold sets");
  }
  EvalReport r;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    std::set<Triplet> p, g;
    for (const auto& t : predicted[i]) p.insert(Project(t, k));
    for (const auto& t : gold[i]) g.insert(Project(t, k));
    r.predicted += p.size();
    r.gold += g.size();
    for (const auto& t : p) r.correct += g.count(t);
  }
  r.precision = r.predicted ? static_cast<double>(r.correct) / r.predicted : 0.0;
  r.recall = r.gold ? static_cast<double>(r.correct) / r.gold : 0.0;
  r.f1 = r.precision + r.recall > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

Tensor AttentionExtract(const SynGenModel& model, const Sentence& s, int layer) {
  NoGradGuard guard;
  const auto encoded = model.Prepare(s);
  EncoderDiagnostics diag;
  model.Encode(encoded, &diag);
  const int layers = static_cast<int>(diag.semantic_attention.size());
  const int l = layer < 0 ? layers + layer : layer;
  if (l < 0 || l >= layers) {
    throw Error(ErrorKind::kRange, "attention layer " + std::to_string(layer) + " out of range");
  }
  const auto& heads = diag.semantic_attention[l];
  std::vector<double> avg(heads.front().numel(), 0.0);
  for (const auto& h : heads) {
    auto d = h.data();
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += d[i];
  }
  for (double& v : avg) v /= static_cast<double>(heads.size());
  return Tensor::FromData(heads.front().shape(), std::move(avg));
}

namespace {

std::string CsvField(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) return v;
  std::string q = "\"";
  for (char c : v) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

// Attention mass from one aspect row onto the opinion span.
double Mass(const Tensor& m, int row, const Span& opinion) {
  double s = 0.0;
  for (int j = opinion.start; j <= opinion.end; ++j) s += m.at(row, j);
  return s;
}

// Mean 0-based descending rank of the opinion tokens among token columns
// 1..n of one row. Ties share the better rank.
double OpinionRank(const Tensor& m, int row, const Span& opinion, int n) {
  double total = 0.0;
  for (int j = opinion.start; j <= opinion.end; ++j) {
    int rank = 0;
    for (int c = 1; c <= n; ++c)
      if (m.at(row, c) > m.at(row, j)) ++rank;
    total += rank;
  }
  return total / (opinion.end - opinion.start + 1);
}

}  // namespace

std::vector<PairGap> AttentionGapPairs(const Tensor& ours, const Tensor& baseline,
                                       std::span<const Triplet> pairs) {
  if (ours.shape() != baseline.shape() || ours.rank() != 2 || ours.rows() != ours.cols() ||
      ours.rows() < 3) {
    throw Error(ErrorKind::kDimension, "attention gap: " + ShapeString(ours.shape()) + " vs " +
                                           ShapeString(baseline.shape()));
  }
  const int n = static_cast<int>(ours.rows()) - 2;
  std::vector<PairGap> out;
  for (const auto& t : pairs) {
    if (!t.opinion) continue;
    PairGap g;
    g.aspect = t.aspect;
    g.opinion = *t.opinion;
    const int rows = t.aspect.end - t.aspect.start + 1;
    double rank_sum = 0.0;
    for (int r = t.aspect.start; r <= t.aspect.end; ++r) {
      g.a_ours += Mass(ours, r, g.opinion);
      g.a_baseline += Mass(baseline, r, g.opinion);
      if (n > 1) {
        rank_sum += (OpinionRank(baseline, r, g.opinion, n) - OpinionRank(ours, r, g.opinion, n)) /
                    static_cast<double>(n - 1);
      }
    }
    g.a_ours /= rows;
    g.a_baseline /= rows;
    g.value_gap = g.a_ours - g.a_baseline;
    g.rank_gap = rank_sum / rows;
    if (g.a_ours != 0.0) g.prop = (g.a_ours - g.a_baseline) / g.a_ours;
    out.push_back(g);
  }
  return out;
}

AttentionGapReport SummarizeGaps(std::vector<PairGap> pairs) {
  AttentionGapReport r;
  std::size_t with_prop = 0;
  for (const auto& g : pairs) {
    r.value_gap += g.value_gap;
    r.rank_gap += g.rank_gap;
    if (g.prop) {
      r.prop += *g.prop;
      ++with_prop;
    } else {
      ++r.prop_excluded;
    }
  }
  r.pairs = pairs.size();
  if (r.pairs) {
    r.value_gap /= r.pairs;
    r.rank_gap /= r.pairs;
  }
  if (with_prop) r.prop /= with_prop;
  r.per_pair = std::move(pairs);
  return r;
}

void WriteAttentionCsv(std::ostream& out, const Tensor& m, std::span<const std::string> labels) {
  out << std::setprecision(17);
  out << "query";
  for (const auto& l : labels) out << ',' << CsvField(l);
  out << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << CsvField(i < labels.size() ? labels[i] : std::to_string(i));
    for (std::size_t j = 0; j < m.cols(); ++j) out << ',' << m.at(i, j);
    out << '\n';
  }
}

void WriteGapReportCsv(std::ostream& out, const AttentionGapReport& r) {
  out << std::setprecision(17);
  out << "scope,sentence_id,aspect,opinion,Value,Rank,Prop\n";
  for (const auto& g : r.per_pair) {
    out << "pair," << CsvField(g.sentence_id) << ',' << g.aspect.start << '-' << g.aspect.end << ','
        << g.opinion.start << '-' << g.opinion.end << ',' << g.value_gap << ',' << g.rank_gap
        << ',';
    if (g.prop) out << *g.prop; else out << "NA";
    out << '\n';
  }
  out << "corpus,,,," << r.value_gap << ',' << r.rank_gap << ',' << r.prop << '\n';
}

}  // namespace syngen
