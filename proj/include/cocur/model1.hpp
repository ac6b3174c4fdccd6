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

// IBM Model 1 lexical translation tables and the denoising score.
//
// t(f | e) is stored row-wise: row 0 is the NULL source word and row
// `source_id + 1` belongs to source token `source_id`. Each row keeps the
// target tokens it co-occurred with explicitly; every other target token
// shares the row's default value. The row sum over the full target
// vocabulary is 1.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "cocur/corpus.hpp"

namespace cocur::tm {

struct Model1Options {
  int em_iterations = 5;
  double epsilon_floor = 1e-9;
  int threads = 0;  // E-step workers; 0 = sequential reference
};

struct FinetuneOptions {
  int em_iterations = 3;
  double blend = 0.5;  // weight of the new estimate against the base table
  double epsilon_floor = 1e-9;
  int threads = 0;
};

class Model1 {
 public:
  using Row = std::uint32_t;
  static constexpr Row kNullRow = 0;
  static constexpr Row row_of(TokenId source) { return source + 1; }

  std::size_t rows() const { return defaults_.size(); }
  std::size_t target_size() const { return target_vocab_->size(); }

  double prob(Row row, TokenId target) const;
  double row_sum(Row row) const;
  std::span<const TokenId> row_targets(Row row) const;
  std::span<const double> row_values(Row row) const;
  double row_default(Row row) const { return defaults_[row]; }
  std::size_t explicit_entries() const { return vals_.size(); }

  int em_iterations_run() const { return em_iterations_run_; }
  const Vocab& source_vocab() const { return *source_vocab_; }
  const Vocab& target_vocab() const { return *target_vocab_; }
  const std::shared_ptr<const Vocab>& source_vocab_ptr() const { return source_vocab_; }
  const std::shared_ptr<const Vocab>& target_vocab_ptr() const { return target_vocab_; }

  void save(std::ostream& out) const;
  static Model1 load(std::istream& in);

  friend bool operator==(const Model1&, const Model1&);

 private:
  friend class Trainer;

  std::shared_ptr<const Vocab> source_vocab_;
  std::shared_ptr<const Vocab> target_vocab_;
  std::vector<std::size_t> offsets_;  // rows() + 1
  std::vector<TokenId> cols_;
  std::vector<double> vals_;
  std::vector<double> defaults_;
  int em_iterations_run_ = 0;
};

// Called after each M-step, before flooring. `loglik` is the (weighted)
// training log-likelihood under the parameters the E-step used.
using EmObserver = std::function<void(int iteration, const Model1& model, double loglik)>;

// EM from the uniform table t(f|e) = 1/|V_target|. After the final M-step
// every probability is floored at epsilon_floor and its row renormalized.
Model1 train_model1(const Corpus& corpus, std::shared_ptr<const Vocab> source_vocab,
                    std::shared_ptr<const Vocab> target_vocab, const Model1Options& options = {},
                    const EmObserver& observer = {});

// EM on `trusted` starting from `base`. After each M-step the rows that
// received counts become blend * estimate + (1 - blend) * base, renormalized.
// `pair_weights` (optional, one per pair) scales each pair's fractional
// counts, so a multiset can be passed as distinct pairs with frequencies.
Model1 finetune_model1(const Model1& base, const Corpus& trusted, const FinetuneOptions& options = {},
                       std::span<const double> pair_weights = {}, const EmObserver& observer = {});

// ln prod_j 1/(|x|+1) sum_{i=0..|x|} t(y_j | x_i), with x_0 = NULL.
double tm_logprob(const Model1& model, std::span<const std::string> source,
                  std::span<const std::string> target);

// Sum of tm_logprob over all pairs.
double corpus_loglik(const Model1& model, const Corpus& corpus);

// corpus_loglik divided by the number of target tokens.
double per_token_loglik(const Model1& model, const Corpus& corpus);

struct DenoiseScorer {
  std::shared_ptr<const Model1> noisy;
  std::shared_ptr<const Model1> clean;
};

void validate(const DenoiseScorer& scorer);

// (ln P_clean(y|x) - ln P_noisy(y|x)) / |y|; higher is cleaner.
double denoise_score(const DenoiseScorer& scorer, const SentencePair& pair);

std::vector<double> denoise_scores(const DenoiseScorer& scorer, const Corpus& corpus, int threads = 0);

}  // namespace cocur::tm
