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

// Interpolated n-gram language models and the cross-entropy-difference
// domain score.
//
//   P(w | h) = sum_k weight_k * P_k(w | h_{k-1})
//
// P_1 is add-alpha smoothed over the whole vocabulary (UNK included); P_k
// for k >= 2 is the maximum-likelihood estimate of the (k-1)-token context,
// falling back to P_{k-1} when the context was never observed. Each P_k is
// a proper distribution, so the interpolation is too. Sentence starts are
// padded with a BOS context symbol; no end-of-sentence event is scored.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "cocur/corpus.hpp"

namespace cocur::lm {

struct NgramOptions {
  int order = 3;
  // One weight per order, highest order first; must sum to 1.
  std::vector<double> weights{0.5, 0.3, 0.2};
  double unigram_alpha = 0.1;
};

void validate(const NgramOptions& options);

class NgramLm {
 public:
  static constexpr TokenId kBos = 0xFFFFFFFFu;

  int order() const { return order_; }
  std::span<const double> weights() const { return weights_; }
  double unigram_alpha() const { return alpha_; }
  const Vocab& vocab() const { return *vocab_; }
  const std::shared_ptr<const Vocab>& vocab_ptr() const { return vocab_; }
  std::span<const double> unigram() const { return unigram_; }

  // `history` holds the preceding tokens, most recent last. Shorter
  // histories are BOS-padded on the left.
  double prob(std::span<const TokenId> history, TokenId w) const;

  // Natural-log probability of an id sequence (sentence-initial).
  double logprob_ids(std::span<const TokenId> ids) const;

  void save(std::ostream& out) const;
  static NgramLm load(std::istream& in);

  friend bool operator==(const NgramLm&, const NgramLm&);

 private:
  friend NgramLm train_ngram(const Corpus&, std::shared_ptr<const Vocab>, const NgramOptions&);
  friend NgramLm adapt_ngram(const NgramLm&, const Corpus&, double, const NgramOptions&);

  struct ContextCounts {
    std::uint64_t total = 0;
    std::vector<std::pair<TokenId, std::uint64_t>> next;  // sorted by token

    friend bool operator==(const ContextCounts&, const ContextCounts&) = default;
  };
  using Table = std::map<std::vector<TokenId>, ContextCounts>;

  void count_higher_orders(const Corpus& corpus);

  int order_ = 1;
  std::vector<double> weights_{1.0};
  double alpha_ = 0.0;
  std::shared_ptr<const Vocab> vocab_;
  std::vector<double> unigram_;
  std::vector<Table> tables_;  // tables_[k - 2] holds contexts of length k - 1
};

// Counts over the source side of `corpus` (monolingual corpora keep their
// sentences there).
NgramLm train_ngram(const Corpus& corpus, std::shared_ptr<const Vocab> vocab,
                    const NgramOptions& options = {});

// In-domain model warm-started from a general one: higher orders come from
// `indomain` alone, the unigram distribution is
// mu * P_1(indomain) + (1 - mu) * P_1(general).
NgramLm adapt_ngram(const NgramLm& general, const Corpus& indomain, double mu,
                    const NgramOptions& options = {});

double lm_logprob(const NgramLm& lm, std::span<const std::string> tokens);

struct DomainScorer {
  NgramLm general;
  NgramLm indomain;
};

// Throws when the two models do not share a vocabulary.
void validate(const DomainScorer& scorer);

// (log P_indomain(x) - log P_general(x)) / |x|; higher is more in-domain.
double domain_score(const DomainScorer& scorer, std::span<const std::string> source);

// Domain scores for the source side of every pair, indexed by id.
std::vector<double> domain_scores(const DomainScorer& scorer, const Corpus& corpus, int threads = 0);

}  // namespace cocur::lm
