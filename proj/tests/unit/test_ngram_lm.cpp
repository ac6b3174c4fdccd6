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

#include <cmath>
#include <random>
#include <sstream>

#include "cocur/error.hpp"
#include "cocur/ngram_lm.hpp"
#include "oracles/ngram_oracle.hpp"
#include "support/test_util.hpp"

using namespace cocur;
using lm::NgramOptions;

namespace {

NgramOptions unigram(double alpha) { return NgramOptions{1, {1.0}, alpha}; }

std::vector<std::vector<std::uint32_t>> id_sentences(const Corpus& c, const Vocab& v) {
  std::vector<std::vector<std::uint32_t>> out;
  for (const auto& p : c) out.push_back(v.map(p.source));
  return out;
}

}  // namespace

TEST_CASE("unigram maximum likelihood and add-alpha") {
  const auto c = testing::mono({"a a b"});
  const auto v = testing::vocab_of(c, Side::source);
  REQUIRE(v->size() == 3);
  const auto ml = lm::train_ngram(c, v, unigram(0.0));
  CHECK(ml.prob({}, v->index("a")) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  const auto smooth = lm::train_ngram(c, v, unigram(1.0));
  CHECK(smooth.prob({}, v->index("a")) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("lm_logprob of sequences") {
  const auto c = testing::mono({"a b"});
  const auto v = testing::vocab_of(c, Side::source);
  const auto m = lm::train_ngram(c, v, unigram(0.0));
  CHECK(lm::lm_logprob(m, TokenSeq{}) == 0.0);
  CHECK(lm::lm_logprob(m, TokenSeq{"a", "a"}) == doctest::Approx(-1.386294361).epsilon(1e-9));
  const auto smooth = lm::train_ngram(c, v, NgramOptions{});
  CHECK(std::isfinite(lm::lm_logprob(smooth, TokenSeq{"never", "seen"})));
}

TEST_CASE("zero-token corpus with alpha 0 is rejected") {
  const auto v = std::make_shared<const Vocab>();
  CHECK_THROWS_AS((void)lm::train_ngram(Corpus(true), v, unigram(0.0)), Error);
  CHECK_NOTHROW((void)lm::train_ngram(Corpus(true), v, unigram(0.5)));
}

TEST_CASE("options are validated") {
  CHECK_THROWS_AS(lm::validate(NgramOptions{2, {1.0}, 0.1}), Error);
  CHECK_THROWS_AS(lm::validate(NgramOptions{2, {0.7, 0.7}, 0.1}), Error);
  CHECK_THROWS_AS(lm::validate(NgramOptions{0, {}, 0.1}), Error);
  CHECK_THROWS_AS(lm::validate(NgramOptions{1, {1.0}, -1.0}), Error);
  CHECK_NOTHROW(lm::validate(NgramOptions{}));
}

TEST_CASE("trigram probabilities match the rescanning oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    Corpus c(true);
    std::uniform_int_distribution<int> len(1, 7), w(0, 5);
    for (int i = 0; i < 40; ++i) {
      TokenSeq s(static_cast<std::size_t>(len(rng)));
      for (auto& t : s) t = "w" + std::to_string(w(rng));
      c.add(std::move(s));
    }
    const auto v = testing::vocab_of(c, Side::source);
    const NgramOptions o{3, {0.6, 0.25, 0.15}, 0.3};
    const auto m = lm::train_ngram(c, v, o);
    const auto sents = id_sentences(c, *v);
    const oracle::NgramSetup setup{3, o.weights, o.unigram_alpha, v->size()};
    for (int q = 0; q < 60; ++q) {
      std::vector<TokenId> h(static_cast<std::size_t>(q % 4));
      for (auto& t : h) t = static_cast<TokenId>(w(rng)) % static_cast<TokenId>(v->size());
      const auto target = static_cast<TokenId>(q) % static_cast<TokenId>(v->size());
      CHECK(m.prob(h, target) == doctest::Approx(oracle::ngram_prob(sents, setup, h, target)).epsilon(1e-12));
    }
  }
}

TEST_CASE("conditional distributions sum to one") {
  const auto c = testing::mono({"a b c a", "b b a", "c"});
  const auto v = testing::vocab_of(c, Side::source);
  const auto m = lm::train_ngram(c, v, NgramOptions{});
  const std::vector<std::vector<TokenId>> contexts = {{}, {1}, {2, 1}, {3, 3}, {0, 0}};
  for (const auto& h : contexts) {
    double s = 0.0;
    for (TokenId w = 0; w < v->size(); ++w) s += m.prob(h, w);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("adapted model mixes unigram distributions and keeps in-domain higher orders") {
  const auto general_c = testing::mono({"a b b b"});
  const auto in_c = testing::mono({"a a a b"});
  const Corpus* both[] = {&general_c, &in_c};
  const auto v = std::make_shared<const Vocab>(build_vocab(both, Side::source, 1));
  const NgramOptions o{2, {0.5, 0.5}, 0.0};
  const auto general = lm::train_ngram(general_c, v, o);
  const auto fresh = lm::train_ngram(in_c, v, o);
  const auto adapted = lm::adapt_ngram(general, in_c, 0.9, o);
  const TokenId a = v->index("a");
  CHECK(adapted.unigram()[a] == doctest::Approx(0.9 * 0.75 + 0.1 * 0.25).epsilon(1e-15));
  const std::vector<TokenId> h{a};
  // Higher-order part comes from in-domain counts only.
  CHECK(adapted.prob(h, a) - 0.5 * adapted.unigram()[a] ==
        doctest::Approx(fresh.prob(h, a) - 0.5 * fresh.unigram()[a]).epsilon(1e-15));
  CHECK_THROWS_AS((void)lm::adapt_ngram(general, in_c, 1.5, o), Error);
}

TEST_CASE("save and load round-trip") {
  const auto c = testing::mono({"a b c a", "b b a", "c"});
  const auto m = lm::train_ngram(c, testing::vocab_of(c, Side::source), NgramOptions{});
  std::stringstream ss;
  m.save(ss);
  const auto back = lm::NgramLm::load(ss);
  CHECK(back == m);
  std::stringstream again;
  back.save(again);
  std::stringstream first;
  m.save(first);
  CHECK(again.str() == first.str());

  std::stringstream bad("cocur-ngram v9\n");
  CHECK_THROWS_AS((void)lm::NgramLm::load(bad), Error);
}

TEST_CASE("domain score examples") {
  const auto general_c = testing::mono({"a b"});
  Corpus in_c(true);
  for (int i = 0; i < 9; ++i) in_c.add({"a"});
  in_c.add({"b"});
  const Corpus* both[] = {&general_c, &in_c};
  const auto v = std::make_shared<const Vocab>(build_vocab(both, Side::source, 1));
  lm::DomainScorer s{lm::train_ngram(general_c, v, unigram(0.0)), lm::train_ngram(in_c, v, unigram(0.0))};
  const double expected = std::log(0.9 / 0.5);
  CHECK(lm::domain_score(s, TokenSeq{"a", "a"}) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(lm::domain_score(s, TokenSeq{"a"}) == doctest::Approx(0.587787).epsilon(1e-6));
  CHECK_THROWS_AS((void)lm::domain_score(s, TokenSeq{}), Error);

  lm::DomainScorer same{s.general, s.general};
  CHECK(lm::domain_score(same, TokenSeq{"a", "b"}) == 0.0);

  lm::DomainScorer swapped{s.indomain, s.general};
  const TokenSeq x{"a", "b", "a"};
  CHECK(lm::domain_score(swapped, x) == -lm::domain_score(s, x));

  TokenSeq xx = x;
  xx.insert(xx.end(), x.begin(), x.end());
  CHECK(lm::domain_score(s, xx) == doctest::Approx(lm::domain_score(s, x)).epsilon(1e-14));
}

TEST_CASE("domain scorer requires one vocabulary") {
  const auto a = testing::mono({"a"});
  const auto b = testing::mono({"b"});
  lm::DomainScorer s{lm::train_ngram(a, testing::vocab_of(a, Side::source), NgramOptions{}),
                     lm::train_ngram(b, testing::vocab_of(b, Side::source), NgramOptions{})};
  CHECK_THROWS_AS(lm::validate(s), Error);
}

TEST_CASE("domain_scores are identical across thread counts") {
  std::mt19937_64 rng(3);
  const auto c = testing::random_parallel(rng, 300, 20, 20, 8);
  const auto v = testing::vocab_of(c, Side::source);
  Corpus half(true);
  for (std::size_t i = 0; i < 100; ++i) half.add(c[i].source);
  const auto general = lm::train_ngram(c, v, NgramOptions{});
  lm::DomainScorer s{general, lm::adapt_ngram(general, half, 0.9, NgramOptions{})};
  const auto seq = lm::domain_scores(s, c, 0);
  CHECK(lm::domain_scores(s, c, 3) == seq);
  CHECK(seq[5] == lm::domain_score(s, c[5].source));
}
