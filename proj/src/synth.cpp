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

#include "cocur/synth.hpp"

#include <algorithm>
#include <initializer_list>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "cocur/error.hpp"

namespace cocur::synth {

namespace {

using Rng = std::mt19937_64;

struct Domain {
  DomainVocabulary vocab;
  std::discrete_distribution<std::size_t> draw;
};

struct World {
  Domain in, out;
  std::unordered_map<std::string, std::string> lexicon;
};

// Words: "i<k>" in-domain only, "o<k>" out-of-domain only, "s<k>" shared.
// Each domain's top `head_size` ranks come from its own slice of the shared
// pool (exclusive words only once the pool runs out), so the heads are
// disjoint while trusted out-of-domain text still covers the in-domain head.
// The remaining words are shuffled into the tail.
World make_world(const SynthConfig& c, Rng& rng) {
  const std::size_t shared =
      static_cast<std::size_t>(std::llround(c.overlap * static_cast<double>(std::min(c.indomain_vocab, c.outdomain_vocab))));
  std::size_t pool_cursor = 0;
  auto build = [&](char tag, std::size_t size) {
    std::vector<std::string> words, rest;
    const std::size_t head = std::min(c.head_size, size);
    for (std::size_t k = 0; k < shared; ++k) {
      const bool take = words.size() < head && k >= pool_cursor;
      if (take) pool_cursor = k + 1;
      (take ? words : rest).push_back("s" + std::to_string(k));
    }
    for (std::size_t k = 0; k < size - shared; ++k)
      (words.size() < head ? words : rest).push_back(tag + std::to_string(k));
    std::shuffle(rest.begin(), rest.end(), rng);
    words.insert(words.end(), rest.begin(), rest.end());
    Domain d;
    d.vocab.words = std::move(words);
    for (std::size_t r = 0; r < d.vocab.words.size(); ++r)
      d.vocab.probs.push_back(1.0 / std::pow(static_cast<double>(r + 1), c.zipf_exponent));
    const double z = std::accumulate(d.vocab.probs.begin(), d.vocab.probs.end(), 0.0);
    for (double& p : d.vocab.probs) p /= z;
    d.draw = std::discrete_distribution<std::size_t>(d.vocab.probs.begin(), d.vocab.probs.end());
    return d;
  };
  World w{build('i', c.indomain_vocab), build('o', c.outdomain_vocab), {}};

  // One lexicon over the union; shared words translate the same way in both
  // domains. Target forms are a seeded permutation so they carry no hint of
  // the source spelling.
  std::vector<std::string> all;
  for (const auto* d : {&w.in, &w.out})
    for (const auto& s : d->vocab.words)
      if (std::find(all.begin(), all.end(), s) == all.end()) all.push_back(s);
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> perm(all.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  for (std::size_t k = 0; k < all.size(); ++k) w.lexicon.emplace(all[k], "w" + std::to_string(perm[k]));
  if (c.shared_target_head) {
    const std::size_t head = std::min({c.head_size, w.in.vocab.words.size(), w.out.vocab.words.size()});
    for (std::size_t r = 0; r < head; ++r) w.lexicon[w.out.vocab.words[r]] = w.lexicon.at(w.in.vocab.words[r]);
  }
  return w;
}

TokenSeq sentence(Domain& d, const SynthConfig& c, Rng& rng) {
  std::uniform_int_distribution<std::size_t> len(c.min_length, c.max_length);
  TokenSeq s(len(rng));
  for (auto& t : s) t = d.vocab.words[d.draw(rng)];
  return s;
}

TokenSeq translate(const TokenSeq& src, const World& w) {
  TokenSeq out;
  out.reserve(src.size());
  for (const auto& t : src) out.push_back(w.lexicon.at(t));
  return out;
}

std::vector<bool> exact_subset(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<bool> mark(n, false);
  for (std::size_t i = 0; i < k; ++i) mark[idx[i]] = true;
  return mark;
}

}  // namespace

void validate(const SynthConfig& c) {
  if (c.indomain_vocab == 0 || c.outdomain_vocab == 0) throw Error("synth: vocabulary sizes must be positive");
  if (!(c.indomain_fraction >= 0.0 && c.indomain_fraction <= 1.0)) throw Error("synth: indomain_fraction outside [0, 1]");
  if (!(c.noise_fraction >= 0.0 && c.noise_fraction <= 1.0)) throw Error("synth: noise_fraction outside [0, 1]");
  if (!(c.overlap >= 0.0 && c.overlap <= 1.0)) throw Error("synth: overlap outside [0, 1]");
  if (c.min_length == 0 || c.max_length < c.min_length) throw Error("synth: invalid sentence length range");
  if (!(c.zipf_exponent >= 0.0)) throw Error("synth: zipf exponent must be >= 0");
  double mix = 0.0;
  for (double m : c.noise_mix) {
    if (!(m >= 0.0)) throw Error("synth: noise_mix weights must be >= 0");
    mix += m;
  }
  if (!(mix > 0.0)) throw Error("synth: noise_mix needs a positive weight");
}

std::pair<DomainVocabulary, DomainVocabulary> domain_vocabularies(const SynthConfig& config) {
  validate(config);
  Rng rng(config.seed);
  auto w = make_world(config, rng);
  return {w.in.vocab, w.out.vocab};
}

SentencePair corrupt_pair(const SentencePair& pair, NoiseKind kind, const Corpus& pool, Rng& rng) {
  SentencePair out = pair;
  if (kind == NoiseKind::truncate && pair.target.size() <= 1) kind = NoiseKind::misalign;
  switch (kind) {
    case NoiseKind::misalign: {
      if (pool.size() < 2) throw Error("corrupt_pair: misalign needs another pair in the pool");
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 2);
      std::size_t j = pick(rng);
      if (j >= pair.id) ++j;  // skip the pair itself
      out.target = pool[j].target;
      break;
    }
    case NoiseKind::shuffle:
      std::shuffle(out.target.begin(), out.target.end(), rng);
      break;
    case NoiseKind::truncate:
      out.target.resize((pair.target.size() + 1) / 2);
      break;
  }
  PairLabels labels = pair.labels.value_or(PairLabels{});
  labels.clean = false;
  out.labels = labels;
  return out;
}

SynthData gen_synthetic(const SynthConfig& c) {
  validate(c);
  Rng rng(c.seed);
  World w = make_world(c, rng);

  const std::size_t n_in = static_cast<std::size_t>(std::floor(c.indomain_fraction * static_cast<double>(c.n_pairs)));
  const std::size_t n_noisy = static_cast<std::size_t>(std::floor(c.noise_fraction * static_cast<double>(c.n_pairs)));
  const auto in_domain = exact_subset(c.n_pairs, n_in, rng);
  const auto noisy = exact_subset(c.n_pairs, n_noisy, rng);

  SynthData data;
  Corpus clean(false);
  for (std::size_t i = 0; i < c.n_pairs; ++i) {
    auto src = sentence(in_domain[i] ? w.in : w.out, c, rng);
    auto tgt = translate(src, w);
    clean.add(std::move(src), std::move(tgt), PairLabels{in_domain[i], true});
  }
  std::discrete_distribution<int> noise_kind(c.noise_mix.begin(), c.noise_mix.end());
  data.background = Corpus(false);
  for (std::size_t i = 0; i < c.n_pairs; ++i) {
    if (!noisy[i]) {
      data.background.add(clean[i].source, clean[i].target, clean[i].labels);
      continue;
    }
    auto bad = corrupt_pair(clean[i], static_cast<NoiseKind>(noise_kind(rng)), clean, rng);
    data.background.add(std::move(bad.source), std::move(bad.target), bad.labels);
  }

  data.indomain_mono = Corpus(true);
  for (std::size_t i = 0; i < c.mono_size; ++i) data.indomain_mono.add(sentence(w.in, c, rng));

  auto ood_clean = [&](std::size_t n) {
    Corpus out(false);
    for (std::size_t i = 0; i < n; ++i) {
      auto src = sentence(w.out, c, rng);
      auto tgt = translate(src, w);
      out.add(std::move(src), std::move(tgt), PairLabels{false, true});
    }
    return out;
  };
  data.trusted = ood_clean(c.trusted_size);
  data.heldout = ood_clean(c.heldout_size);
  return data;
}

}  // namespace cocur::synth
