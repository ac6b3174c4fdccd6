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

// Dynamic data selection and the curricula built from it.
//
// A pace function maps a training step to the fraction of data retained;
// select_top keeps that fraction of the highest-scoring examples. Single
// curricula rank by one score, the mixed co-curriculum ranks by the sum of
// both scores, and the cascaded co-curriculum keeps the top beta(t) by the
// denoising score and then the top gamma(t) of those by the domain score.
// Survivors are sampled uniformly.

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cocur::sched {

struct PaceFunction {
  std::int64_t half_life = 1;
  double floor = 1.0;  // in (0, 1]
};

// max(0.5^(t / half_life), floor)
double pace(const PaceFunction& p, std::int64_t t);

// First step at which pace(p, t) == p.floor.
std::int64_t floor_step(const PaceFunction& p);

// ceil(ratio * n), at least 1 for non-empty n. A relative slack of 1e-12
// absorbs rounding in products such as (2/3) * 3.
std::size_t retained_count(double ratio, std::size_t n);

// The retained_count(ratio, ids.size()) highest-scoring ids, ties to the
// lower id. `scores` is parallel to `ids`. The result is sorted by id.
std::vector<std::uint32_t> select_top(std::span<const std::uint32_t> ids, std::span<const double> scores,
                                      double ratio);
std::vector<std::uint32_t> select_top(std::int64_t t, std::span<const std::uint32_t> ids,
                                      std::span<const double> scores, const PaceFunction& p);

// Positions (indices into `scores`) of the k best candidates, ranked by
// score then id then position; returned in ascending position order.
std::vector<std::size_t> top_positions(std::span<const double> scores, std::span<const std::uint32_t> ids,
                                       std::span<const std::size_t> candidates, std::size_t k);

inline double mix_score(double domain_score, double denoise_score) { return denoise_score + domain_score; }

// Element-wise mix; with z_normalize each score list is standardized
// (population statistics) before the sum.
std::vector<double> mix_scores(std::span<const double> domain, std::span<const double> denoise,
                               bool z_normalize = false);

enum class NestingOrder { denoise_first, domain_first };

std::vector<std::uint32_t> cascade_select(std::span<const std::uint32_t> ids,
                                          std::span<const double> denoise_scores, double beta_ratio,
                                          std::span<const double> domain_scores, double gamma_ratio,
                                          NestingOrder order = NestingOrder::denoise_first);
std::vector<std::uint32_t> cascade_select(std::int64_t t, std::span<const std::uint32_t> ids,
                                          std::span<const double> denoise_scores, const PaceFunction& beta,
                                          std::span<const double> domain_scores, const PaceFunction& gamma,
                                          NestingOrder order = NestingOrder::denoise_first);

// Uniform weights over a support set inside a universe of `universe` slots.
class WeightVector {
 public:
  WeightVector(std::vector<std::uint32_t> support, std::size_t universe);

  std::size_t universe() const { return universe_; }
  std::span<const std::uint32_t> support() const { return support_; }
  // Every member weighs 1 / denominator().
  std::uint64_t denominator() const { return support_.size(); }
  double value() const { return 1.0 / static_cast<double>(support_.size()); }
  double operator[](std::uint32_t slot) const;
  bool contains(std::uint32_t slot) const;
  std::vector<double> dense() const;

 private:
  std::vector<std::uint32_t> support_;  // sorted, unique
  std::size_t universe_;
};

WeightVector weights(std::vector<std::uint32_t> selected, std::size_t universe);

using Rng = std::mt19937_64;

// batch_size draws with replacement; returns support members.
std::vector<std::uint32_t> sample_batch(const WeightVector& w, std::size_t batch_size, Rng& rng);

enum class CurriculumKind { random, domain, denoise, mix, cascade };

std::string_view kind_name(CurriculumKind kind);
CurriculumKind parse_kind(std::string_view name);

struct CurriculumConfig {
  CurriculumKind kind = CurriculumKind::cascade;
  PaceFunction lambda{400000, 0.1};  // single curricula and mix
  PaceFunction beta{400000, 0.2};    // cascade, denoising stage
  PaceFunction gamma{900000, 0.5};   // cascade, domain stage
  std::int64_t max_steps = 3000000;
  std::size_t batch_size = 128;
  std::size_t buffer_size = 65536;
  double refill_fraction = 1.0;
  bool full_dataset = false;  // select over the whole corpus, no buffer
  bool z_normalize = false;   // mix only
  NestingOrder nesting = NestingOrder::denoise_first;
  std::uint64_t seed = 1;
};

inline constexpr std::int64_t kReferenceSteps = 3000000;

// Defaults with the half-lives scaled by max_steps / 3M (at least 1 step).
CurriculumConfig scaled_config(std::int64_t max_steps);

void validate(const CurriculumConfig& config);

// First step where every pace the kind uses sits at its floor.
std::int64_t late_phase_start(const CurriculumConfig& config);

// Scores indexed by pair id. Kinds that do not use a score may leave it empty.
struct PairScores {
  std::vector<double> domain;
  std::vector<double> denoise;
};

// Retained ids over `ids` at step t for the configured kind.
std::vector<std::uint32_t> select_for_kind(const CurriculumConfig& config, const PairScores& scores,
                                           std::int64_t t, std::span<const std::uint32_t> ids);

struct StepRecord {
  std::int64_t step = 0;
  double lambda = 0.0;  // NaN when unused by the kind
  double beta = 0.0;
  double gamma = 0.0;
  std::size_t selected = 0;
  std::vector<std::uint32_t> batch;  // pair ids
};

// The online loop: a buffer of pairs drawn from a per-epoch shuffle of the
// corpus, scored, filtered for step t, weighted uniformly and sampled.
class Schedule {
 public:
  Schedule(CurriculumConfig config, std::shared_ptr<const PairScores> scores, std::size_t corpus_size);

  StepRecord step(std::int64_t t);
  std::vector<StepRecord> run(std::int64_t first_step, std::int64_t count);

  const CurriculumConfig& config() const { return config_; }
  std::span<const std::uint32_t> buffer() const { return buffer_; }
  std::uint64_t epoch() const { return epoch_; }

 private:
  std::uint32_t next_from_stream();
  void refill();

  CurriculumConfig config_;
  std::shared_ptr<const PairScores> scores_;
  std::size_t corpus_size_;
  std::vector<std::uint32_t> stream_;
  std::size_t cursor_ = 0;
  std::uint64_t epoch_ = 0;
  std::vector<std::uint32_t> buffer_;
  Rng stream_rng_;
  Rng sample_rng_;
};

// Batch log CSV: step,lambda,beta,gamma,selected,batch_ids
std::string batch_log_header();
std::string format_step(const StepRecord& record);

}  // namespace cocur::sched
