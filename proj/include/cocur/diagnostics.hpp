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

#pragma once

// Selection diagnostics: statistics of the retained set as a function of
// the filtering percentage 100 * (1 - selection ratio), plus ground-truth
// precision and ranking AUC for labeled corpora.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cocur/corpus.hpp"
#include "cocur/model1.hpp"
#include "cocur/ngram_lm.hpp"

namespace cocur::diag {

struct CurveRow {
  double filtering_pct = 0.0;
  double value = 0.0;
};

struct PercentileCurve {
  std::string label;
  std::vector<CurveRow> rows;
};

// {0, 10, ..., 90}
std::vector<double> default_percentiles();

enum class Statistic { mean, stddev };

// For each filtering percentage q, `stat` of `values` over the ids kept by
// select_top(ordering_scores, 1 - q/100). Percentages must be strictly
// increasing within [0, 100).
PercentileCurve retained_curve(std::span<const double> values, std::span<const double> ordering_scores,
                               std::span<const double> percentiles, Statistic stat, std::string label);

// -tm_logprob(x, y) / |y| for every pair.
std::vector<double> per_word_losses(const tm::Model1& model, const Corpus& corpus);

PercentileCurve perword_loss_curve(const tm::Model1& model, const Corpus& corpus, std::span<const double> scores,
                                   std::span<const double> percentiles, std::string label = "perword_loss");
PercentileCurve loss_stddev_curve(const tm::Model1& model, const Corpus& corpus, std::span<const double> scores,
                                  std::span<const double> percentiles, std::string label = "loss_stddev");
PercentileCurve domain_relevance_curve(const lm::DomainScorer& scorer, const Corpus& corpus,
                                       std::span<const double> ordering_scores,
                                       std::span<const double> percentiles,
                                       std::string label = "domain_relevance");

// CSV with header filtering_pct,value,label
std::string curves_csv(std::span<const PercentileCurve> curves);

struct SelectionQuality {
  double clean_precision = 0.0;
  double indomain_precision = 0.0;
  double joint_precision = 0.0;
};

SelectionQuality selection_quality(std::span<const std::uint32_t> selected, const Corpus& labeled);

// Mann-Whitney probability that a positive outranks a negative; ties 0.5.
double score_auc(std::span<const double> scores, const std::vector<bool>& labels);

}  // namespace cocur::diag
