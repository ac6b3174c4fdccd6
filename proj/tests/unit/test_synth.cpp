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
#include <map>
#include <set>

#include "cocur/error.hpp"
#include "cocur/synth.hpp"
#include "support/test_util.hpp"

using namespace cocur;
using namespace cocur::synth;

namespace {

SynthConfig small_config() {
  SynthConfig c;
  c.n_pairs = 1000;
  c.indomain_vocab = 60;
  c.outdomain_vocab = 60;
  c.mono_size = 200;
  c.trusted_size = 100;
  c.heldout_size = 50;
  return c;
}

std::string dump(const Corpus& c) {
  std::string out;
  for (const auto& p : c) {
    out += std::to_string(p.id) + '|' + join_tokens(p.source) + '|' + join_tokens(p.target);
    if (p.labels) out += '|' + std::to_string(p.labels->in_domain) + std::to_string(p.labels->clean);
    out += '\n';
  }
  return out;
}

SentencePair pair_of(std::uint32_t id, const char* src, const char* tgt) {
  return SentencePair{id, tokenize(src), tokenize(tgt), PairLabels{true, true}};
}

}  // namespace

TEST_CASE("label counts are exact") {
  const auto d = gen_synthetic(small_config());
  REQUIRE(d.background.size() == 1000);
  REQUIRE(d.background.labeled());
  std::size_t noisy = 0, indomain = 0;
  for (const auto& p : d.background) {
    noisy += !p.labels->clean;
    indomain += p.labels->in_domain;
  }
  CHECK(noisy == 300);
  CHECK(indomain == 500);
  CHECK(d.indomain_mono.size() == 200);
  CHECK(d.indomain_mono.monolingual());
  CHECK(d.trusted.size() == 100);
  CHECK(d.heldout.size() == 50);
}

TEST_CASE("odd fractions round down") {
  auto c = small_config();
  c.n_pairs = 7;
  c.noise_fraction = 0.5;
  c.indomain_fraction = 0.3;
  const auto d = gen_synthetic(c);
  std::size_t noisy = 0, indomain = 0;
  for (const auto& p : d.background) {
    noisy += !p.labels->clean;
    indomain += p.labels->in_domain;
  }
  CHECK(noisy == 3);
  CHECK(indomain == 2);
}

TEST_CASE("generation is deterministic per seed") {
  const auto a = gen_synthetic(small_config());
  const auto b = gen_synthetic(small_config());
  CHECK(dump(a.background) == dump(b.background));
  CHECK(dump(a.indomain_mono) == dump(b.indomain_mono));
  CHECK(dump(a.trusted) == dump(b.trusted));
  CHECK(dump(a.heldout) == dump(b.heldout));
  auto other = small_config();
  other.seed = 2;
  CHECK(dump(gen_synthetic(other).background) != dump(a.background));

  testing::TempDir dir;
  write_parallel(a.background, dir / "a.src", dir / "a.tgt");
  write_parallel(b.background, dir / "b.src", dir / "b.tgt");
  CHECK(text::read_file(dir / "a.src") == text::read_file(dir / "b.src"));
  CHECK(text::read_file(dir / "a.tgt") == text::read_file(dir / "b.tgt"));
}

TEST_CASE("clean pairs translate word for word") {
  const auto c = small_config();
  const auto d = gen_synthetic(c);
  std::map<std::string, std::string> lexicon;
  auto check_pair = [&](const SentencePair& p) {
    REQUIRE(p.source.size() == p.target.size());
    for (std::size_t i = 0; i < p.source.size(); ++i) {
      auto [it, fresh] = lexicon.emplace(p.source[i], p.target[i]);
      CHECK(it->second == p.target[i]);
    }
  };
  for (const auto& p : d.background) {
    CHECK(p.source.size() >= c.min_length);
    CHECK(p.source.size() <= c.max_length);
    if (p.labels->clean) check_pair(p);
  }
  for (const auto& p : d.trusted) check_pair(p);
  for (const auto& p : d.heldout) check_pair(p);
}

TEST_CASE("trusted and held-out data are clean out-of-domain pairs") {
  const auto c = small_config();
  const auto [in_vocab, out_vocab] = domain_vocabularies(c);
  const std::set<std::string> in_only = [&] {
    std::set<std::string> s(in_vocab.words.begin(), in_vocab.words.end());
    for (const auto& w : out_vocab.words) s.erase(w);
    return s;
  }();
  REQUIRE(!in_only.empty());
  const auto d = gen_synthetic(c);
  for (const auto* corpus : {&d.trusted, &d.heldout})
    for (const auto& p : *corpus)
      for (const auto& w : p.source) CHECK(in_only.count(w) == 0);
}

TEST_CASE("domain heads are disjoint") {
  const auto c = SynthConfig{};
  const auto [in_vocab, out_vocab] = domain_vocabularies(c);
  REQUIRE(in_vocab.words.size() == c.indomain_vocab);
  REQUIRE(out_vocab.words.size() == c.outdomain_vocab);
  const std::set<std::string> in_head(in_vocab.words.begin(), in_vocab.words.begin() + 10);
  for (std::size_t r = 0; r < c.head_size; ++r) CHECK(in_head.count(out_vocab.words[r]) == 0);
  double total = 0.0;
  for (double p : in_vocab.probs) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::is_sorted(in_vocab.probs.rbegin(), in_vocab.probs.rend()));
}

TEST_CASE("corrupt_pair examples") {
  Corpus pool(false);
  pool.add(tokenize("a b c d"), tokenize("w x y z"), PairLabels{true, true});
  pool.add(tokenize("e f"), tokenize("q r"), PairLabels{false, true});
  std::mt19937_64 rng(3);

  const auto shuffled = corrupt_pair(pool[0], NoiseKind::shuffle, pool, rng);
  auto a = shuffled.target, b = pool[0].target;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
  CHECK(shuffled.source == pool[0].source);
  CHECK(shuffled.labels->clean == false);
  CHECK(shuffled.labels->in_domain == true);

  const auto cut = corrupt_pair(pool[0], NoiseKind::truncate, pool, rng);
  CHECK(cut.target == TokenSeq{"w", "x"});
  const auto cut3 = corrupt_pair(pair_of(0, "a b c", "x y z"), NoiseKind::truncate, pool, rng);
  CHECK(cut3.target == TokenSeq{"x", "y"});

  CHECK(corrupt_pair(pool[0], NoiseKind::misalign, pool, rng).target == pool[1].target);
  CHECK(corrupt_pair(pool[1], NoiseKind::misalign, pool, rng).target == pool[0].target);

  // A one-token target cannot be truncated; it is misaligned instead.
  const auto one = pair_of(1, "e", "q");
  CHECK(corrupt_pair(one, NoiseKind::truncate, pool, rng).target == pool[0].target);

  Corpus lonely(false);
  lonely.add(tokenize("a"), tokenize("u"));
  CHECK_THROWS_AS((void)corrupt_pair(lonely[0], NoiseKind::misalign, lonely, rng), Error);
}

TEST_CASE("degenerate configs are rejected") {
  auto c = small_config();
  c.indomain_vocab = 0;
  CHECK_THROWS_AS((void)gen_synthetic(c), Error);
  c = small_config();
  c.noise_fraction = 1.5;
  CHECK_THROWS_AS(validate(c), Error);
  c = small_config();
  c.min_length = 5;
  c.max_length = 4;
  CHECK_THROWS_AS(validate(c), Error);
  c = small_config();
  c.noise_mix = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(validate(c), Error);
}

TEST_CASE("every noise kind yields labeled noise") {
  auto c = small_config();
  c.noise_mix = {1.0, 1.0, 1.0};
  const auto d = gen_synthetic(c);
  std::size_t noisy = 0;
  for (const auto& p : d.background) noisy += !p.labels->clean;
  CHECK(noisy == 300);
}
