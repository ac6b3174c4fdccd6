// Copyright 2026 The cocur Authors
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

#include "cocur/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cocur/error.hpp"
#include "cocur/schedule.hpp"
#include "cocur/simd/kernels.hpp"
#include "cocur/text_io.hpp"

namespace cocur::diag {

std::vector<double> default_percentiles() {
  std::vector<double> out;
  for (int q = 0; q < 100; q += 10) out.push_back(q);
  return out;
}

PercentileCurve retained_curve(std::span<const double> values, std::span<const double> ordering_scores,
                               std::span<const double> percentiles, Statistic stat, std::string label) {
  if (values.size() != ordering_scores.size()) throw Error("curve: ordering scores must cover the corpus");
  if (values.empty()) throw Error("curve: retained set is empty");
  for (std::size_t i = 0; i < percentiles.size(); ++i) {
    if (!(percentiles[i] >= 0.0 && percentiles[i] < 100.0)) throw Error("curve: percentages must lie in [0, 100)");
    if (i > 0 && !(percentiles[i] > percentiles[i - 1])) throw Error("curve: percentages must increase strictly");
  }
  std::vector<std::uint32_t> ids(values.size());
  std::iota(ids.begin(), ids.end(), 0u);

  PercentileCurve curve{std::move(label), {}};
  std::vector<double> kept;
  for (double q : percentiles) {
    const auto sel = sched::select_top(ids, ordering_scores, 1.0 - q / 100.0);
    if (sel.empty()) throw Error("curve: retained set is empty");
    kept.clear();
    for (auto id : sel) kept.push_back(values[id]);
    const double n = static_cast<double>(kept.size());
    const double mean = simd::sum(kept) / n;
    const double v = stat == Statistic::mean ? mean : std::sqrt(simd::sum_sq_dev(kept, mean) / n);
    curve.rows.push_back({q, v});
  }
  return curve;
}

std::vector<double> per_word_losses(const tm::Model1& model, const Corpus& corpus) {
  std::vector<double> out;
  out.reserve(corpus.size());
  for (const auto& p : corpus) {
    if (p.target.empty()) throw Error("per-word loss: empty target sentence");
    out.push_back(-tm::tm_logprob(model, p.source, p.target) / static_cast<double>(p.target.size()));
  }
  return out;
}

PercentileCurve perword_loss_curve(const tm::Model1& model, const Corpus& corpus, std::span<const double> scores,
                                   std::span<const double> percentiles, std::string label) {
  return retained_curve(per_word_losses(model, corpus), scores, percentiles, Statistic::mean, std::move(label));
}

PercentileCurve loss_stddev_curve(const tm::Model1& model, const Corpus& corpus, std::span<const double> scores,
                                  std::span<const double> percentiles, std::string label) {
  return retained_curve(per_word_losses(model, corpus), scores, percentiles, Statistic::stddev, std::move(label));
}

PercentileCurve domain_relevance_curve(const lm::DomainScorer& scorer, const Corpus& corpus,
                                       std::span<const double> ordering_scores,
                                       std::span<const double> percentiles, std::string label) {
  return retained_curve(lm::domain_scores(scorer, corpus), ordering_scores, percentiles, Statistic::mean,
                        std::move(label));
}

std::string curves_csv(std::span<const PercentileCurve> curves) {
  std::string out = "filtering_pct,value,label\n";
  for (const auto& c : curves)
    for (const auto& r : c.rows)
      out += text::format_double(r.filtering_pct) + ',' + text::format_double(r.value) + ',' + c.label + '\n';
  return out;
}

SelectionQuality selection_quality(std::span<const std::uint32_t> selected, const Corpus& labeled) {
  if (!labeled.labeled()) throw Error("selection_quality: corpus carries no labels");
  SelectionQuality q;
  if (selected.empty()) return q;
  std::size_t clean = 0, indomain = 0, joint = 0;
  for (auto id : selected) {
    if (id >= labeled.size()) throw Error("selection_quality: id out of range");
    const auto& l = *labeled[id].labels;
    clean += l.clean;
    indomain += l.in_domain;
    joint += l.clean && l.in_domain;
  }
  const double n = static_cast<double>(selected.size());
  q.clean_precision = static_cast<double>(clean) / n;
  q.indomain_precision = static_cast<double>(indomain) / n;
  q.joint_precision = static_cast<double>(joint) / n;
  return q;
}

double score_auc(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw Error("score_auc: scores and labels differ in length");
  const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw Error("score_auc: both classes must be present");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Average ranks over tie groups, then the rank-sum statistic.
  double pos_rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]]) pos_rank_sum += avg_rank;
    i = j;
  }
  const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

}  // namespace cocur::diag
