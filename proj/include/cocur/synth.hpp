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

// Labeled synthetic corpora with a controlled domain mixture and noise rate.
//
// Two source-language domains draw words from Zipf distributions over
// partially overlapping vocabularies; the most frequent words of each
// domain are domain-specific. A clean pair's target is the word-for-word
// image of its source under the domain's bilingual lexicon, so IBM Model 1
// is the right model family and cleanliness is learnable.

#include <array>
#include <cstdint>
#include <random>
#include <span>

#include "cocur/corpus.hpp"

namespace cocur::synth {

enum class NoiseKind { misalign, shuffle, truncate };

struct SynthConfig {
  std::size_t n_pairs = 20000;
  double indomain_fraction = 0.5;
  double noise_fraction = 0.3;
  std::size_t indomain_vocab = 400;   // source words used by the in-domain distribution
  std::size_t outdomain_vocab = 400;  // source words used by the out-of-domain distribution
  double overlap = 0.95;              // fraction of the smaller vocabulary shared by both domains
  std::size_t head_size = 10;         // top ranks, disjoint between the domains
  // The r-th head word of each domain translates to the same target word, so
  // both domains share a target-side frequency profile at the head.
  bool shared_target_head = true;
  double zipf_exponent = 1.0;
  std::size_t min_length = 6;
  std::size_t max_length = 14;
  std::array<double, 3> noise_mix{1.0, 0.0, 0.0};  // misalign, shuffle, truncate
  std::size_t mono_size = 5000;
  std::size_t trusted_size = 2000;
  std::size_t heldout_size = 1000;
  std::uint64_t seed = 1;
};

void validate(const SynthConfig& config);

struct SynthData {
  Corpus background;     // labeled
  Corpus indomain_mono;  // in-domain source sentences
  Corpus trusted;        // clean out-of-domain pairs
  Corpus heldout;        // clean out-of-domain pairs, disjoint draw
};

SynthData gen_synthetic(const SynthConfig& config);

// Corrupts the target side; the source side is never touched and labels
// become clean = false. `pool` supplies replacement targets for misalign
// (any pair other than `pair.id`). truncate on a one-token target falls
// back to misalign.
SentencePair corrupt_pair(const SentencePair& pair, NoiseKind kind, const Corpus& pool, std::mt19937_64& rng);

// Mass-ordered source words of one domain, for separability checks.
struct DomainVocabulary {
  std::vector<std::string> words;  // rank order
  std::vector<double> probs;
};
std::pair<DomainVocabulary, DomainVocabulary> domain_vocabularies(const SynthConfig& config);

}  // namespace cocur::synth
