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

#include "cocur/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cocur/error.hpp"
#include "cocur/simd/kernels.hpp"
#include "cocur/text_io.hpp"

namespace cocur::sched {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double rank_key(double s) { return std::isnan(s) ? -std::numeric_limits<double>::infinity() : s; }

std::vector<std::size_t> all_positions(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

std::vector<std::uint32_t> ids_at(std::span<const std::uint32_t> ids, std::span<const std::size_t> positions) {
  std::vector<std::uint32_t> out;
  out.reserve(positions.size());
  for (std::size_t p : positions) out.push_back(ids[p]);
  std::sort(out.begin(), out.end());
  return out;
}

void check_parallel(std::size_t ids, std::size_t scores, const char* what) {
  if (ids != scores) throw Error(std::string(what) + ": scores must be parallel to ids");
}

std::vector<std::size_t> cascade_positions(std::span<const std::uint32_t> ids, std::span<const double> denoise,
                                           double beta_ratio, std::span<const double> domain, double gamma_ratio,
                                           NestingOrder order) {
  auto first_scores = order == NestingOrder::denoise_first ? denoise : domain;
  auto second_scores = order == NestingOrder::denoise_first ? domain : denoise;
  const double first_ratio = order == NestingOrder::denoise_first ? beta_ratio : gamma_ratio;
  const double second_ratio = order == NestingOrder::denoise_first ? gamma_ratio : beta_ratio;
  const auto all = all_positions(ids.size());
  const auto stage1 = top_positions(first_scores, ids, all, retained_count(first_ratio, all.size()));
  return top_positions(second_scores, ids, stage1, retained_count(second_ratio, stage1.size()));
}

// Positions retained at step t; `scores_by_pos` views are parallel to ids.
std::vector<std::size_t> select_positions(const CurriculumConfig& config, std::span<const std::uint32_t> ids,
                                          std::span<const double> domain, std::span<const double> denoise,
                                          std::int64_t t) {
  const auto all = all_positions(ids.size());
  switch (config.kind) {
    case CurriculumKind::random:
      return all;
    case CurriculumKind::domain:
      return top_positions(domain, ids, all, retained_count(pace(config.lambda, t), ids.size()));
    case CurriculumKind::denoise:
      return top_positions(denoise, ids, all, retained_count(pace(config.lambda, t), ids.size()));
    case CurriculumKind::mix: {
      const auto psi = mix_scores(domain, denoise, config.z_normalize);
      return top_positions(psi, ids, all, retained_count(pace(config.lambda, t), ids.size()));
    }
    case CurriculumKind::cascade:
      return cascade_positions(ids, denoise, pace(config.beta, t), domain, pace(config.gamma, t), config.nesting);
  }
  throw Error("unknown curriculum kind");
}

bool needs_domain(CurriculumKind k) {
  return k == CurriculumKind::domain || k == CurriculumKind::mix || k == CurriculumKind::cascade;
}
bool needs_denoise(CurriculumKind k) {
  return k == CurriculumKind::denoise || k == CurriculumKind::mix || k == CurriculumKind::cascade;
}

}  // namespace

double pace(const PaceFunction& p, std::int64_t t) {
  if (t < 0) throw Error("pace: step must be >= 0");
  if (p.half_life <= 0) throw Error("pace: half_life must be positive");
  const double decayed = std::pow(0.5, static_cast<double>(t) / static_cast<double>(p.half_life));
  return std::max(decayed, p.floor);
}

std::int64_t floor_step(const PaceFunction& p) {
  if (p.floor >= 1.0) return 0;
  auto t = static_cast<std::int64_t>(std::ceil(static_cast<double>(p.half_life) * std::log2(1.0 / p.floor)));
  t = std::max<std::int64_t>(t, 0);
  while (t > 0 && pace(p, t - 1) <= p.floor) --t;
  while (pace(p, t) > p.floor) ++t;
  return t;
}

std::size_t retained_count(double ratio, std::size_t n) {
  if (n == 0) return 0;
  if (!(ratio > 0.0)) return 1;
  const double k = std::ceil(ratio * static_cast<double>(n) * (1.0 - 1e-12));
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(k, 1.0)), 1, n);
}

std::vector<std::size_t> top_positions(std::span<const double> scores, std::span<const std::uint32_t> ids,
                                       std::span<const std::size_t> candidates, std::size_t k) {
  std::vector<std::size_t> cand(candidates.begin(), candidates.end());
  k = std::min(k, cand.size());
  auto better = [&](std::size_t a, std::size_t b) {
    const double sa = rank_key(scores[a]), sb = rank_key(scores[b]);
    if (sa != sb) return sa > sb;
    if (ids[a] != ids[b]) return ids[a] < ids[b];
    return a < b;
  };
  if (k < cand.size()) {
    std::nth_element(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end(), better);
    cand.resize(k);
  }
  std::sort(cand.begin(), cand.end());
  return cand;
}

std::vector<std::uint32_t> select_top(std::span<const std::uint32_t> ids, std::span<const double> scores,
                                      double ratio) {
  check_parallel(ids.size(), scores.size(), "select_top");
  const auto all = all_positions(ids.size());
  return ids_at(ids, top_positions(scores, ids, all, retained_count(ratio, ids.size())));
}

std::vector<std::uint32_t> select_top(std::int64_t t, std::span<const std::uint32_t> ids,
                                      std::span<const double> scores, const PaceFunction& p) {
  return select_top(ids, scores, pace(p, t));
}

std::vector<double> mix_scores(std::span<const double> domain, std::span<const double> denoise, bool z_normalize) {
  if (domain.size() != denoise.size()) throw Error("mix_scores: score lists differ in length");
  std::vector<double> out(domain.size());
  if (!z_normalize) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = mix_score(domain[i], denoise[i]);
    return out;
  }
  auto standardize = [](std::span<const double> s) {
    std::vector<double> z(s.begin(), s.end());
    if (z.empty()) return z;
    const double mean = simd::sum(z) / static_cast<double>(z.size());
    const double sd = std::sqrt(simd::sum_sq_dev(z, mean) / static_cast<double>(z.size()));
    for (double& v : z) v = sd > 0.0 ? (v - mean) / sd : v - mean;
    return z;
  };
  const auto zd = standardize(domain);
  const auto zn = standardize(denoise);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mix_score(zd[i], zn[i]);
  return out;
}

std::vector<std::uint32_t> cascade_select(std::span<const std::uint32_t> ids,
                                          std::span<const double> denoise_scores, double beta_ratio,
                                          std::span<const double> domain_scores, double gamma_ratio,
                                          NestingOrder order) {
  check_parallel(ids.size(), denoise_scores.size(), "cascade_select");
  check_parallel(ids.size(), domain_scores.size(), "cascade_select");
  return ids_at(ids, cascade_positions(ids, denoise_scores, beta_ratio, domain_scores, gamma_ratio, order));
}

std::vector<std::uint32_t> cascade_select(std::int64_t t, std::span<const std::uint32_t> ids,
                                          std::span<const double> denoise_scores, const PaceFunction& beta,
                                          std::span<const double> domain_scores, const PaceFunction& gamma,
                                          NestingOrder order) {
  return cascade_select(ids, denoise_scores, pace(beta, t), domain_scores, pace(gamma, t), order);
}

WeightVector::WeightVector(std::vector<std::uint32_t> support, std::size_t universe)
    : support_(std::move(support)), universe_(universe) {
  if (support_.empty()) throw Error("weights: empty selection");
  std::sort(support_.begin(), support_.end());
  support_.erase(std::unique(support_.begin(), support_.end()), support_.end());
  if (support_.back() >= universe_) throw Error("weights: selection outside the universe");
}

bool WeightVector::contains(std::uint32_t slot) const {
  return std::binary_search(support_.begin(), support_.end(), slot);
}

double WeightVector::operator[](std::uint32_t slot) const { return contains(slot) ? value() : 0.0; }

std::vector<double> WeightVector::dense() const {
  std::vector<double> out(universe_, 0.0);
  for (std::uint32_t s : support_) out[s] = value();
  return out;
}

WeightVector weights(std::vector<std::uint32_t> selected, std::size_t universe) {
  return WeightVector(std::move(selected), universe);
}

std::vector<std::uint32_t> sample_batch(const WeightVector& w, std::size_t batch_size, Rng& rng) {
  std::vector<std::uint32_t> out;
  out.reserve(batch_size);
  const auto support = w.support();
  std::uniform_int_distribution<std::size_t> pick(0, support.size() - 1);
  for (std::size_t i = 0; i < batch_size; ++i) out.push_back(support[pick(rng)]);
  return out;
}

std::string_view kind_name(CurriculumKind kind) {
  switch (kind) {
    case CurriculumKind::random: return "random";
    case CurriculumKind::domain: return "domain";
    case CurriculumKind::denoise: return "denoise";
    case CurriculumKind::mix: return "mix";
    case CurriculumKind::cascade: return "cascade";
  }
  return "?";
}

CurriculumKind parse_kind(std::string_view name) {
  for (auto k : {CurriculumKind::random, CurriculumKind::domain, CurriculumKind::denoise, CurriculumKind::mix,
                 CurriculumKind::cascade})
    if (kind_name(k) == name) return k;
  throw Error("unknown curriculum kind '" + std::string(name) + "'");
}

CurriculumConfig scaled_config(std::int64_t max_steps) {
  if (max_steps <= 0) throw Error("max_steps must be positive");
  CurriculumConfig c;
  c.max_steps = max_steps;
  const double f = static_cast<double>(max_steps) / static_cast<double>(kReferenceSteps);
  auto scale = [f](std::int64_t h) {
    return std::max<std::int64_t>(1, std::llround(static_cast<double>(h) * f));
  };
  c.lambda.half_life = scale(c.lambda.half_life);
  c.beta.half_life = scale(c.beta.half_life);
  c.gamma.half_life = scale(c.gamma.half_life);
  return c;
}

void validate(const CurriculumConfig& c) {
  for (const auto* p : {&c.lambda, &c.beta, &c.gamma}) {
    if (p->half_life <= 0) throw Error("pace half-life must be positive");
    if (!(p->floor > 0.0 && p->floor <= 1.0)) throw Error("pace floor must lie in (0, 1]");
  }
  if (c.max_steps < 0) throw Error("max_steps must be >= 0");
  if (c.buffer_size == 0) throw Error("buffer_size must be >= 1");
  if (!(c.refill_fraction > 0.0 && c.refill_fraction <= 1.0)) throw Error("refill fraction must lie in (0, 1]");
}

std::int64_t late_phase_start(const CurriculumConfig& c) {
  switch (c.kind) {
    case CurriculumKind::random: return 0;
    case CurriculumKind::cascade: return std::max(floor_step(c.beta), floor_step(c.gamma));
    default: return floor_step(c.lambda);
  }
}

std::vector<std::uint32_t> select_for_kind(const CurriculumConfig& config, const PairScores& scores,
                                           std::int64_t t, std::span<const std::uint32_t> ids) {
  std::vector<double> dom, den;
  if (needs_domain(config.kind)) {
    if (scores.domain.empty()) throw Error("curriculum needs domain scores");
    for (auto id : ids) dom.push_back(scores.domain.at(id));
  }
  if (needs_denoise(config.kind)) {
    if (scores.denoise.empty()) throw Error("curriculum needs denoising scores");
    for (auto id : ids) den.push_back(scores.denoise.at(id));
  }
  if (dom.empty()) dom.assign(ids.size(), 0.0);
  if (den.empty()) den.assign(ids.size(), 0.0);
  return ids_at(ids, select_positions(config, ids, dom, den, t));
}

Schedule::Schedule(CurriculumConfig config, std::shared_ptr<const PairScores> scores, std::size_t corpus_size)
    : config_(config),
      scores_(std::move(scores)),
      corpus_size_(corpus_size),
      stream_rng_(config.seed),
      sample_rng_(config.seed ^ 0x9E3779B97F4A7C15ull) {
  validate(config_);
  if (corpus_size_ == 0) throw Error("schedule: empty corpus");
  if (!scores_) throw Error("schedule: missing scores");
  if (needs_domain(config_.kind) && scores_->domain.size() != corpus_size_)
    throw Error("schedule: domain scores do not cover the corpus");
  if (needs_denoise(config_.kind) && scores_->denoise.size() != corpus_size_)
    throw Error("schedule: denoising scores do not cover the corpus");
  if (config_.full_dataset) {
    buffer_.resize(corpus_size_);
    std::iota(buffer_.begin(), buffer_.end(), 0u);
    return;
  }
  stream_.resize(corpus_size_);
  std::iota(stream_.begin(), stream_.end(), 0u);
  std::shuffle(stream_.begin(), stream_.end(), stream_rng_);
  const std::size_t b = std::min(config_.buffer_size, corpus_size_);
  buffer_.reserve(b);
  for (std::size_t i = 0; i < b; ++i) buffer_.push_back(next_from_stream());
}

std::uint32_t Schedule::next_from_stream() {
  if (cursor_ == stream_.size()) {
    std::shuffle(stream_.begin(), stream_.end(), stream_rng_);
    cursor_ = 0;
    ++epoch_;
  }
  return stream_[cursor_++];
}

void Schedule::refill() {
  if (config_.full_dataset) return;
  const std::size_t n = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(config_.refill_fraction * static_cast<double>(buffer_.size()))), 1,
      buffer_.size());
  buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(n));
  for (std::size_t i = 0; i < n; ++i) buffer_.push_back(next_from_stream());
}

StepRecord Schedule::step(std::int64_t t) {
  StepRecord rec;
  rec.step = t;
  rec.lambda = rec.beta = rec.gamma = kNaN;
  switch (config_.kind) {
    case CurriculumKind::random: rec.lambda = 1.0; break;
    case CurriculumKind::cascade:
      rec.beta = pace(config_.beta, t);
      rec.gamma = pace(config_.gamma, t);
      break;
    default: rec.lambda = pace(config_.lambda, t);
  }

  std::vector<double> dom(buffer_.size(), 0.0), den(buffer_.size(), 0.0);
  if (needs_domain(config_.kind))
    for (std::size_t i = 0; i < buffer_.size(); ++i) dom[i] = scores_->domain[buffer_[i]];
  if (needs_denoise(config_.kind))
    for (std::size_t i = 0; i < buffer_.size(); ++i) den[i] = scores_->denoise[buffer_[i]];
  const auto positions = select_positions(config_, buffer_, dom, den, t);
  if (positions.empty()) throw Error("schedule: empty selection");
  rec.selected = positions.size();

  std::vector<std::uint32_t> support;
  support.reserve(positions.size());
  for (std::size_t p : positions) support.push_back(static_cast<std::uint32_t>(p));
  const WeightVector w(std::move(support), buffer_.size());
  for (std::uint32_t pos : sample_batch(w, config_.batch_size, sample_rng_)) rec.batch.push_back(buffer_[pos]);

  refill();
  return rec;
}

std::vector<StepRecord> Schedule::run(std::int64_t first_step, std::int64_t count) {
  std::vector<StepRecord> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
  for (std::int64_t i = 0; i < count; ++i) out.push_back(step(first_step + i));
  return out;
}

std::string batch_log_header() { return "step,lambda,beta,gamma,selected,batch_ids"; }

std::string format_step(const StepRecord& r) {
  auto ratio = [](double v) { return std::isnan(v) ? std::string() : text::format_double(v); };
  std::string out = std::to_string(r.step) + ',' + ratio(r.lambda) + ',' + ratio(r.beta) + ',' + ratio(r.gamma) +
                    ',' + std::to_string(r.selected) + ',';
  for (std::size_t i = 0; i < r.batch.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(r.batch[i]);
  }
  return out;
}

}  // namespace cocur::sched
