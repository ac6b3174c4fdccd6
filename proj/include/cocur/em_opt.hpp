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

// The EM-style bootstrap of the denoising scorer.
//
// Iteration 0 trains the frozen pieces (general and in-domain LMs, the noisy
// translation model) and fine-tunes the noisy model on trusted data. Each
// later iteration builds the co-curriculum from the current scorers, runs
// its late phase, and fine-tunes the noisy model again on the pairs it
// sampled. Only the clean model changes between iterations.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cocur/corpus.hpp"
#include "cocur/diagnostics.hpp"
#include "cocur/model1.hpp"
#include "cocur/ngram_lm.hpp"
#include "cocur/schedule.hpp"

namespace cocur::em {

struct EmConfig {
  sched::CurriculumConfig curriculum;
  int iterations = 3;
  std::int64_t em_steps = 2000;  // late-phase batches collected per iteration
  lm::NgramOptions lm;
  double mu = 0.9;
  int vocab_min_count = 1;
  tm::Model1Options tm;
  tm::FinetuneOptions finetune;
  int threads = 0;
};

void validate(const EmConfig& config);

// Non-owning; the corpora must outlive every state built from them.
struct EmInputs {
  const Corpus* background = nullptr;
  const Corpus* indomain_mono = nullptr;
  const Corpus* trusted = nullptr;
  const Corpus* heldout = nullptr;  // optional
};

struct IterationRecord {
  int iteration = 0;
  double heldout_loglik = 0.0;                   // per target token; NaN without held-out data
  std::optional<diag::SelectionQuality> quality;  // background carries labels
};

struct EmState {
  int iteration = 0;
  EmInputs inputs;
  std::shared_ptr<const tm::Model1> noisy_tm;
  std::shared_ptr<const tm::Model1> clean_tm;
  std::shared_ptr<const lm::DomainScorer> domain_scorer;
  std::shared_ptr<const std::vector<double>> domain_scores;  // per background pair
  std::vector<IterationRecord> history;
};

// General LM on the background source side, in-domain LM adapted from it.
lm::DomainScorer train_domain_scorer(const Corpus& background, const Corpus& indomain_mono,
                                     const EmConfig& config);

struct TranslationModels {
  tm::Model1 noisy;  // trained on the background
  tm::Model1 clean;  // noisy fine-tuned on trusted data
};
TranslationModels train_translation_models(const Corpus& background, const Corpus& trusted,
                                           const EmConfig& config);

EmState init_em(const EmInputs& inputs, const EmConfig& config);

// Same as init_em with already trained scorers (shapes are checked).
EmState init_em(const EmInputs& inputs, const EmConfig& config, lm::DomainScorer domain_scorer,
                TranslationModels models);

// Scores of the current scorers over the background corpus.
std::shared_ptr<const sched::PairScores> current_scores(const EmState& state, const EmConfig& config);

sched::Schedule gen_curriculum(const EmState& state, const EmConfig& config);

// Full-dataset selection at the first late-phase step.
std::vector<std::uint32_t> late_selection(const EmState& state, const EmConfig& config);

EmState em_iterate(const EmState& state, const EmConfig& config);

struct EmResult {
  EmState state;
  sched::Schedule schedule;
};

EmResult run_em(const EmInputs& inputs, const EmConfig& config);

// iteration,heldout_loglik,clean_precision,indomain_precision,joint_precision
std::string metrics_csv(const std::vector<IterationRecord>& history);

}  // namespace cocur::em
