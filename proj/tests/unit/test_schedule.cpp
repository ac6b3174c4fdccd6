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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <set>

#include "cocur/error.hpp"
#include "cocur/schedule.hpp"
#include "support/toy_table.hpp"

using namespace cocur;
using namespace cocur::sched;

namespace {

std::vector<std::uint32_t> iota_ids(std::size_t n) {
  std::vector<std::uint32_t> v(n);
  std::iota(v.begin(), v.end(), 0u);
  return v;
}

std::shared_ptr<const PairScores> random_scores(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  auto s = std::make_shared<PairScores>();
  for (std::size_t i = 0; i < n; ++i) {
    s->domain.push_back(g(rng));
    s->denoise.push_back(g(rng));
  }
  return s;
}

}  // namespace

TEST_CASE("pace values") {
  const PaceFunction p{400000, 0.1};
  CHECK(pace(p, 0) == 1.0);
  CHECK(pace(p, 400000) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pace(p, 800000) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(pace(p, 2000000) == 0.1);
  CHECK_THROWS_AS((void)pace(p, -1), Error);
  CHECK_THROWS_AS((void)pace(PaceFunction{0, 0.1}, 3), Error);
}

TEST_CASE("floor_step is the first step at the floor") {
  for (const PaceFunction p : {PaceFunction{400000, 0.2}, PaceFunction{900000, 0.5}, PaceFunction{7, 0.3},
                               PaceFunction{1, 1.0}}) {
    const auto s = floor_step(p);
    CHECK(pace(p, s) == p.floor);
    if (s > 0) CHECK(pace(p, s - 1) > p.floor);
  }
  CHECK(floor_step(PaceFunction{900000, 0.5}) == 900000);
}

TEST_CASE("retained_count uses the ceiling") {
  CHECK(retained_count(0.5, 8) == 4);
  CHECK(retained_count(1.0 / 3.0, 3) == 1);
  CHECK(retained_count(0.1, 10000) == 1000);
  CHECK(retained_count(0.2, 10000) == 2000);
  CHECK(retained_count(0.25, 3) == 1);
  CHECK(retained_count(1e-9, 5) == 1);
  CHECK(retained_count(1.0, 0) == 0);
}

TEST_CASE("select_top examples") {
  const auto ids = iota_ids(4);
  const std::vector<double> s{3, 1, 2, 0};
  CHECK(select_top(ids, s, 1.0) == ids);
  CHECK(select_top(ids, s, 0.5) == std::vector<std::uint32_t>{0, 2});
  const std::vector<double> tied{1, 1, 0};
  CHECK(select_top(iota_ids(3), tied, 1.0 / 3.0) == std::vector<std::uint32_t>{0});
  // Ties break on the id, not the position.
  const std::vector<std::uint32_t> shuffled{9, 4, 6};
  CHECK(select_top(shuffled, tied, 1.0 / 3.0) == std::vector<std::uint32_t>{4});
  CHECK_THROWS_AS((void)select_top(ids, tied, 0.5), Error);
}

TEST_CASE("mix_score examples") {
  CHECK(mix_score(0.3, 0.2) == doctest::Approx(0.5));
  CHECK(mix_score(0.0, 0.7) == 0.7);
  CHECK(mix_score(0.25 + 0.5, 0.5 - 0.5) == mix_score(0.25, 0.5));
  const std::vector<double> d{1, 2, 3}, n{10, 20, 30};
  CHECK(mix_scores(d, n) == std::vector<double>{11, 22, 33});
  const auto z = mix_scores(d, n, true);
  CHECK(z[1] == doctest::Approx(0.0));
  CHECK(z[0] == doctest::Approx(-z[2]));
  CHECK(z[2] == doctest::Approx(2.0 * std::sqrt(1.5)));
}

TEST_CASE("cascade examples") {
  const auto& ids = testing::toy::kIds;
  CHECK(cascade_select(ids, testing::toy::kDenoise, 2.0 / 3.0, testing::toy::kDomain, 0.5) ==
        std::vector<std::uint32_t>{0});
  CHECK(cascade_select(ids, testing::toy::kDenoise, 1.0, testing::toy::kDomain, 1.0) == ids);
}

TEST_CASE("cascade containment and size") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 300;
    const auto s = random_scores(n, rng());
    const auto ids = iota_ids(n);
    const double b = u(rng), g = u(rng);
    const auto stage1 = select_top(ids, s->denoise, b);
    const auto out = cascade_select(ids, s->denoise, b, s->domain, g);
    CHECK(std::includes(stage1.begin(), stage1.end(), out.begin(), out.end()));
    CHECK(out.size() == retained_count(g, retained_count(b, n)));
  }
}

TEST_CASE("cascade floor identity on 10,000 ids") {
  const auto s = random_scores(10000, 11);
  const auto ids = iota_ids(10000);
  const auto co = cascade_select(3000000, ids, s->denoise, PaceFunction{400000, 0.2}, s->domain,
                                 PaceFunction{900000, 0.5});
  const auto single = select_top(3000000, ids, s->domain, PaceFunction{400000, 0.1});
  CHECK(co.size() == single.size());
  CHECK(co.size() == 1000);
}

TEST_CASE("domain-first nesting is available") {
  const auto& ids = testing::toy::kIds;
  // Domain first keeps {1,2}; denoising then keeps the better of those, example 1.
  CHECK(cascade_select(ids, testing::toy::kDenoise, 0.5, testing::toy::kDomain, 2.0 / 3.0,
                       NestingOrder::domain_first) == std::vector<std::uint32_t>{0});
}

TEST_CASE("weights examples") {
  const auto w = weights({0, 2}, 3);
  CHECK(w.dense() == std::vector<double>{0.5, 0.0, 0.5});
  CHECK(weights({0, 1, 2}, 3).denominator() == 3);
  CHECK(weights({1}, 3)[1] == 1.0);
  CHECK_THROWS_AS((void)weights({}, 3), Error);
  CHECK_THROWS_AS((void)weights({3}, 3), Error);
}

TEST_CASE("toy table weight columns") {
  const auto got = testing::toy::generate();
  const auto want = testing::toy::expected();
  for (std::size_t k = 0; k < 4; ++k) {
    CAPTURE(k);
    CHECK(got.domain[k] == want.domain[k]);
    CHECK(got.denoise[k] == want.denoise[k]);
    CHECK(got.co[k] == want.co[k]);
  }
}

TEST_CASE("sample_batch examples") {
  Rng rng(1);
  CHECK(sample_batch(weights({7}, 8), 4, rng) == std::vector<std::uint32_t>{7, 7, 7, 7});
  CHECK(sample_batch(weights({0, 1}, 2), 0, rng).empty());
  Rng fixed(12345);
  const auto draws = sample_batch(weights({0, 1}, 2), 10000, fixed);
  const double zeros = static_cast<double>(std::count(draws.begin(), draws.end(), 0u)) / 10000.0;
  CHECK(zeros >= 0.45);
  CHECK(zeros <= 0.55);
  Rng a(5), b(5);
  CHECK(sample_batch(weights({1, 4, 9}, 10), 50, a) == sample_batch(weights({1, 4, 9}, 10), 50, b));
}

TEST_CASE("buffer step keeps the paced fraction") {
  CurriculumConfig c;
  c.kind = CurriculumKind::domain;
  c.lambda = PaceFunction{1, 0.1};
  c.buffer_size = 8;
  c.batch_size = 16;
  Schedule s(c, random_scores(100, 1), 100);
  const auto rec = s.step(1);
  CHECK(rec.lambda == 0.5);
  CHECK(std::isnan(rec.beta));
  CHECK(rec.selected == 4);
  CHECK(rec.batch.size() == 16);
  CHECK(std::set<std::uint32_t>(rec.batch.begin(), rec.batch.end()).size() <= 4);
}

TEST_CASE("random kind keeps the whole buffer") {
  CurriculumConfig c;
  c.kind = CurriculumKind::random;
  c.buffer_size = 32;
  Schedule s(c, std::make_shared<PairScores>(), 100);
  for (const auto& rec : s.run(0, 20)) CHECK(rec.selected == 32);
}

TEST_CASE("buffer is clamped to the corpus") {
  CurriculumConfig c;
  c.kind = CurriculumKind::cascade;
  c.buffer_size = 1000;
  Schedule s(c, random_scores(10, 2), 10);
  CHECK(s.buffer().size() == 10);
}

TEST_CASE("stream wraps into a reshuffled epoch") {
  CurriculumConfig c;
  c.kind = CurriculumKind::random;
  c.buffer_size = 3;
  c.batch_size = 1;
  Schedule s(c, std::make_shared<PairScores>(), 5);
  std::vector<std::uint32_t> drawn(s.buffer().begin(), s.buffer().end());
  CHECK(s.epoch() == 0);
  s.step(0);
  drawn.insert(drawn.end(), s.buffer().begin(), s.buffer().end());
  CHECK(s.epoch() == 1);
  std::vector<std::uint32_t> first_epoch(drawn.begin(), drawn.begin() + 5);
  std::sort(first_epoch.begin(), first_epoch.end());
  CHECK(first_epoch == iota_ids(5));
  for (auto id : drawn) CHECK(id < 5);
}

TEST_CASE("partial refill replaces the oldest entries") {
  CurriculumConfig c;
  c.kind = CurriculumKind::random;
  c.buffer_size = 10;
  c.refill_fraction = 0.3;
  Schedule s(c, std::make_shared<PairScores>(), 100);
  const std::vector<std::uint32_t> before(s.buffer().begin(), s.buffer().end());
  s.step(0);
  const std::vector<std::uint32_t> after(s.buffer().begin(), s.buffer().end());
  CHECK(std::equal(before.begin() + 3, before.end(), after.begin()));
}

TEST_CASE("schedules are deterministic per seed") {
  auto scores = random_scores(500, 4);
  CurriculumConfig c;
  c.lambda = c.beta = c.gamma = PaceFunction{5, 0.2};
  c.buffer_size = 64;
  c.batch_size = 8;
  for (auto kind : {CurriculumKind::random, CurriculumKind::domain, CurriculumKind::denoise, CurriculumKind::mix,
                    CurriculumKind::cascade}) {
    c.kind = kind;
    Schedule a(c, scores, 500), b(c, scores, 500);
    const auto ra = a.run(0, 30), rb = b.run(0, 30);
    for (std::size_t i = 0; i < ra.size(); ++i) CHECK(format_step(ra[i]) == format_step(rb[i]));
    c.seed = 2;
    Schedule other(c, scores, 500);
    CHECK(format_step(other.step(0)) != format_step(ra[0]));
    c.seed = 1;
  }
}

TEST_CASE("full-dataset mode selects over every id") {
  CurriculumConfig c;
  c.kind = CurriculumKind::denoise;
  c.full_dataset = true;
  c.lambda = PaceFunction{10, 0.1};
  auto scores = random_scores(200, 6);
  Schedule s(c, scores, 200);
  CHECK(s.buffer().size() == 200);
  CHECK(s.step(10).selected == 100);
  CHECK(select_for_kind(c, *scores, 10, iota_ids(200)) == select_top(iota_ids(200), scores->denoise, 0.5));
}

TEST_CASE("missing scores are rejected") {
  CurriculumConfig c;
  c.kind = CurriculumKind::cascade;
  auto partial = std::make_shared<PairScores>();
  partial->domain.assign(10, 0.0);
  CHECK_THROWS_AS(Schedule(c, partial, 10), Error);
  CHECK_THROWS_AS(Schedule(c, random_scores(10, 1), 0), Error);
}

TEST_CASE("late phase start") {
  const auto c = scaled_config(30000);
  CHECK(c.lambda.half_life == 4000);
  CHECK(c.beta.half_life == 4000);
  CHECK(c.gamma.half_life == 9000);
  CHECK(c.lambda.floor == 0.1);
  CHECK(c.beta.floor == 0.2);
  CHECK(c.gamma.floor == 0.5);
  const auto late = late_phase_start(c);
  CHECK(pace(c.beta, late) == c.beta.floor);
  CHECK(pace(c.gamma, late) == c.gamma.floor);
  CHECK((pace(c.beta, late - 1) > c.beta.floor || pace(c.gamma, late - 1) > c.gamma.floor));
  auto single = c;
  single.kind = CurriculumKind::mix;
  CHECK(late_phase_start(single) == floor_step(c.lambda));
  single.kind = CurriculumKind::random;
  CHECK(late_phase_start(single) == 0);
}

TEST_CASE("config validation and kind names") {
  CurriculumConfig c;
  CHECK_NOTHROW(validate(c));
  c.beta.floor = 0.0;
  CHECK_THROWS_AS(validate(c), Error);
  c = CurriculumConfig{};
  c.buffer_size = 0;
  CHECK_THROWS_AS(validate(c), Error);
  c = CurriculumConfig{};
  c.refill_fraction = 0.0;
  CHECK_THROWS_AS(validate(c), Error);
  CHECK_THROWS_AS((void)scaled_config(0), Error);
  for (auto k : {CurriculumKind::random, CurriculumKind::domain, CurriculumKind::denoise, CurriculumKind::mix,
                 CurriculumKind::cascade})
    CHECK(parse_kind(kind_name(k)) == k);
  CHECK_THROWS_AS((void)parse_kind("greedy"), Error);
}

TEST_CASE("batch log formatting") {
  StepRecord r;
  r.step = 12;
  r.lambda = std::nan("");
  r.beta = 0.5;
  r.gamma = 0.25;
  r.selected = 3;
  r.batch = {4, 1, 4};
  CHECK(batch_log_header() == "step,lambda,beta,gamma,selected,batch_ids");
  CHECK(format_step(r) == "12,,0.5,0.25,3,4 1 4");
}
