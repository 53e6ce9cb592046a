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

#include "inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace syngen {

ModelScorer::ModelScorer(const SynGenModel& model, const Sentence& s)
    : model_(model), encoded_(model.Prepare(s)) {
  NoGradGuard guard;
  encoder_out_ = model_.Encode(encoded_);
  const auto cand = model_.Candidates(encoder_out_);
  bank_ = Concat({cand.blended, cand.polarity}, 0);
}

std::vector<double> ModelScorer::LogProbs(std::span<const int> prefix) {
  NoGradGuard guard;
  const Tensor h =
      model_.decoder().StepHidden(encoder_out_.fused, prefix, encoded_.word_ids());
  const Tensor logits = MatMul(h, Transpose(bank_));
  std::vector<double> out = logits.ToVector();
  const double mx = *std::max_element(out.begin(), out.end());
  double z = 0.0;
  for (double v : out) z += std::exp(v - mx);
  const double log_z = mx + std::log(z);
  for (double& v : out) v -= log_z;
  return out;
}

std::size_t DefaultMaxSteps(std::size_t n, SubtaskKind k) {
  return std::min<std::size_t>(FrameLength(k) * std::max<std::size_t>(n, 1) + 1, 64);
}

std::vector<bool> ConstrainedMask(std::size_t position_in_frame, SubtaskKind k,
                                  const CandidateIndexSpace& space,
                                  std::span<const int> partial_frame) {
  const std::size_t len = FrameLength(k);
  if (position_in_frame >= len) {
    throw Error(ErrorKind::kPrecondition, "frame position " + std::to_string(position_in_frame) +
                                              " beyond frame length " + std::to_string(len));
  }
  std::vector<bool> allow(space.total(), false);
  auto pointers_from = [&](int first) {
    for (int i = std::max(first, 1); i <= space.n(); ++i) allow[i] = true;
  };
  const bool polarity_slot = k != SubtaskKind::kPair && position_in_frame == len - 1;
  if (polarity_slot) {
    for (int p = 0; p < 3; ++p) allow[space.PolarityIndex(static_cast<Polarity>(p))] = true;
  } else if (position_in_frame % 2 == 0) {
    pointers_from(1);
    if (position_in_frame == 0) allow[space.eos()] = true;
  } else {
    const int start = position_in_frame - 1 < partial_frame.size() ? partial_frame[position_in_frame - 1] : 1;
    pointers_from(space.Kind(start) == IndexKind::kPointer ? start : 1);
  }
  return allow;
}

namespace {

// Allowed next indices for a hypothesis, or empty when unconstrained.
std::vector<bool> AllowedNext(std::span<const int> generated, std::size_t step,
                              const DecodeOptions& options, const CandidateIndexSpace& space) {
  if (!options.constrained) return {};
  const std::size_t len = FrameLength(options.kind);
  const std::size_t pos = generated.size() % len;
  auto allow = ConstrainedMask(pos, options.kind, space, generated.subspan(generated.size() - pos));
  // Not enough budget left for another full frame plus </s>: stop here.
  const std::size_t remaining = options.max_steps - step;
  if (pos == 0 && remaining < len + 1) {
    std::fill(allow.begin(), allow.end(), false);
    allow[space.eos()] = true;
  }
  return allow;
}

std::size_t MaxSteps(const StepScorer& scorer, const DecodeOptions& options) {
  const std::size_t steps =
      options.max_steps ? options.max_steps : DefaultMaxSteps(scorer.num_words(), options.kind);
  return std::min(steps, scorer.max_prefix());
}

}  // namespace

DecodeResult GreedyDecode(StepScorer& scorer, const DecodeOptions& options) {
  const CandidateIndexSpace space(scorer.num_words());
  DecodeOptions opts = options;
  opts.max_steps = MaxSteps(scorer, options);
  DecodeResult result;
  std::vector<int> prefix{space.bos()};
  for (std::size_t step = 0; step < opts.max_steps; ++step) {
    const auto lp = scorer.LogProbs(prefix);
    const auto allow = AllowedNext(result.indices, step, opts, space);
    int best = -1;
    for (int y = 0; y < space.total(); ++y) {
      if (!allow.empty() && !allow[y]) continue;
      if (best < 0 || lp[y] > lp[best]) best = y;
    }
    result.indices.push_back(best);
    result.score += lp[best];
    prefix.push_back(best);
    if (best == space.eos()) {
      result.finished = true;
      break;
    }
  }
  return result;
}

DecodeResult BeamSearch(StepScorer& scorer, const DecodeOptions& options) {
  if (options.beam == 0) throw Error(ErrorKind::kPrecondition, "beam width must be >= 1");
  const CandidateIndexSpace space(scorer.num_words());
  DecodeOptions opts = options;
  opts.max_steps = MaxSteps(scorer, options);

  struct Hyp {
    std::vector<int> indices;
    double score = 0.0;
  };
  std::vector<Hyp> live{Hyp{}};
  std::vector<Hyp> finished;
  std::vector<int> prefix;

  for (std::size_t step = 0; step < opts.max_steps && !live.empty(); ++step) {
    std::vector<Hyp> expansions;
    expansions.reserve(live.size() * space.total());
    for (const auto& h : live) {
      prefix.assign(1, space.bos());
      prefix.insert(prefix.end(), h.indices.begin(), h.indices.end());
      const auto lp = scorer.LogProbs(prefix);
      const auto allow = AllowedNext(h.indices, step, opts, space);
      for (int y = 0; y < space.total(); ++y) {
        if (!allow.empty() && !allow[y]) continue;
        Hyp e{h.indices, h.score + lp[y]};
        e.indices.push_back(y);
        expansions.push_back(std::move(e));
      }
    }
    // Stable: ties keep parent order, then lower index first.
    std::stable_sort(expansions.begin(), expansions.end(),
                     [](const Hyp& a, const Hyp& b) { return a.score > b.score; });
    if (expansions.size() > opts.beam) expansions.resize(opts.beam);
    live.clear();
    for (auto& e : expansions) {
      if (e.indices.back() == space.eos()) {
        finished.push_back(std::move(e));
      } else {
        live.push_back(std::move(e));
      }
    }
    // Scores never increase, so no live hypothesis can overtake.
    if (!finished.empty() && !live.empty()) {
      double best_finished = -std::numeric_limits<double>::infinity();
      for (const auto& f : finished) best_finished = std::max(best_finished, f.score);
      if (best_finished >= live.front().score) break;
    }
  }

  DecodeResult result;
  if (!finished.empty()) {
    const auto best = std::max_element(finished.begin(), finished.end(),
                                       [](const Hyp& a, const Hyp& b) { return a.score < b.score; });
    result.indices = best->indices;
    result.score = best->score;
    result.finished = true;
  } else if (!live.empty()) {
    result.indices = live.front().indices;
    result.score = live.front().score;
  }
  return result;
}

ParseResult ParseSequence(std::span<const int> indices, SubtaskKind k,
                          const CandidateIndexSpace& space) {
  ParseResult out;
  std::vector<int> body(indices.begin(), indices.end());
  if (auto it = std::find(body.begin(), body.end(), space.eos()); it != body.end()) {
    body.erase(it, body.end());
  }
  const std::size_t len = FrameLength(k);
  const std::size_t frames = body.size() / len;
  if (body.size() % len != 0) ++out.malformed_frames;

  auto kind_of = [&](int y) -> std::optional<IndexKind> {
    if (y < 0 || y >= space.total()) return std::nullopt;
    return space.Kind(y);
  };
  auto span_at = [&](std::size_t off) -> std::optional<Span> {
    if (kind_of(body[off]) != IndexKind::kPointer || kind_of(body[off + 1]) != IndexKind::kPointer) {
      return std::nullopt;
    }
    if (body[off] > body[off + 1]) return std::nullopt;
    return Span{body[off], body[off + 1]};
  };

  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t off = f * len;
    Prediction p;
    bool ok = true;
    if (auto a = span_at(off)) p.aspect = *a; else ok = false;
    if (ok && k != SubtaskKind::kAesc) {
      if (auto o = span_at(off + 2)) p.opinion = *o; else ok = false;
    }
    if (ok && k != SubtaskKind::kPair) {
      const int y = body[off + len - 1];
      if (kind_of(y) == IndexKind::kPolarity) p.polarity = space.PolarityOf(y); else ok = false;
    }
    if (!ok) {
      ++out.malformed_frames;
      continue;
    }
    if (std::find(out.predictions.begin(), out.predictions.end(), p) != out.predictions.end()) {
      ++out.duplicates;
      continue;
    }
    out.predictions.push_back(p);
  }
  return out;
}

}  // namespace syngen
