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

#include "cocur/em_opt.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "cocur/error.hpp"
#include "cocur/text_io.hpp"

namespace cocur::em {

namespace {

void require(const Corpus* c, const char* what) {
  if (c == nullptr || c->empty()) throw Error(std::string("em: ") + what + " corpus is empty");
}

IterationRecord evaluate(const EmState& s, const EmConfig& config) {
  IterationRecord r;
  r.iteration = s.iteration;
  r.heldout_loglik = std::numeric_limits<double>::quiet_NaN();
  if (s.inputs.heldout != nullptr && !s.inputs.heldout->empty())
    r.heldout_loglik = tm::per_token_loglik(*s.clean_tm, *s.inputs.heldout);
  if (s.inputs.background->labeled())
    r.quality = diag::selection_quality(late_selection(s, config), *s.inputs.background);
  return r;
}

}  // namespace

void validate(const EmConfig& c) {
  sched::validate(c.curriculum);
  lm::validate(c.lm);
  if (c.iterations < 0) throw Error("em: iterations must be >= 0");
  if (c.em_steps < 0) throw Error("em: em_steps must be >= 0");
  if (!(c.mu >= 0.0 && c.mu <= 1.0)) throw Error("em: mu must lie in [0, 1]");
  if (c.vocab_min_count < 1) throw Error("em: vocab min_count must be >= 1");
}

lm::DomainScorer train_domain_scorer(const Corpus& background, const Corpus& indomain_mono,
                                     const EmConfig& config) {
  require(&background, "background");
  require(&indomain_mono, "in-domain");
  const Corpus* corpora[] = {&background, &indomain_mono};
  auto vocab = std::make_shared<const Vocab>(build_vocab(corpora, Side::source, config.vocab_min_count));
  auto general = lm::train_ngram(background, vocab, config.lm);
  auto indomain = lm::adapt_ngram(general, indomain_mono, config.mu, config.lm);
  return lm::DomainScorer{std::move(general), std::move(indomain)};
}

TranslationModels train_translation_models(const Corpus& background, const Corpus& trusted,
                                           const EmConfig& config) {
  require(&background, "background");
  require(&trusted, "trusted");
  const Corpus* corpora[] = {&background, &trusted};
  auto src = std::make_shared<const Vocab>(build_vocab(corpora, Side::source, config.vocab_min_count));
  auto tgt = std::make_shared<const Vocab>(build_vocab(corpora, Side::target, config.vocab_min_count));
  auto tm_opts = config.tm;
  tm_opts.threads = config.threads;
  auto noisy = tm::train_model1(background, src, tgt, tm_opts);
  auto ft = config.finetune;
  ft.threads = config.threads;
  auto clean = tm::finetune_model1(noisy, trusted, ft);
  return {std::move(noisy), std::move(clean)};
}

EmState init_em(const EmInputs& inputs, const EmConfig& config) {
  validate(config);
  require(inputs.background, "background");
  require(inputs.indomain_mono, "in-domain");
  require(inputs.trusted, "trusted");
  return init_em(inputs, config, train_domain_scorer(*inputs.background, *inputs.indomain_mono, config),
                 train_translation_models(*inputs.background, *inputs.trusted, config));
}

EmState init_em(const EmInputs& inputs, const EmConfig& config, lm::DomainScorer domain_scorer,
                TranslationModels models) {
  validate(config);
  require(inputs.background, "background");
  require(inputs.indomain_mono, "in-domain");
  require(inputs.trusted, "trusted");
  lm::validate(domain_scorer);
  if (!(models.noisy.source_vocab() == models.clean.source_vocab()) ||
      !(models.noisy.target_vocab() == models.clean.target_vocab()))
    throw Error("em: noisy and clean translation models use different vocabularies");

  EmState s;
  s.inputs = inputs;
  s.domain_scorer = std::make_shared<const lm::DomainScorer>(std::move(domain_scorer));
  s.domain_scores = std::make_shared<const std::vector<double>>(
      lm::domain_scores(*s.domain_scorer, *inputs.background, config.threads));
  s.noisy_tm = std::make_shared<const tm::Model1>(std::move(models.noisy));
  s.clean_tm = std::make_shared<const tm::Model1>(std::move(models.clean));
  s.history.push_back(evaluate(s, config));
  return s;
}

std::shared_ptr<const sched::PairScores> current_scores(const EmState& s, const EmConfig& config) {
  auto scores = std::make_shared<sched::PairScores>();
  scores->domain = *s.domain_scores;
  scores->denoise =
      tm::denoise_scores(tm::DenoiseScorer{s.noisy_tm, s.clean_tm}, *s.inputs.background, config.threads);
  return scores;
}

sched::Schedule gen_curriculum(const EmState& s, const EmConfig& config) {
  return sched::Schedule(config.curriculum, current_scores(s, config), s.inputs.background->size());
}

std::vector<std::uint32_t> late_selection(const EmState& s, const EmConfig& config) {
  const auto scores = current_scores(s, config);
  std::vector<std::uint32_t> ids(s.inputs.background->size());
  std::iota(ids.begin(), ids.end(), 0u);
  return sched::select_for_kind(config.curriculum, *scores, sched::late_phase_start(config.curriculum), ids);
}

EmState em_iterate(const EmState& s, const EmConfig& config) {
  if (config.em_steps <= 0) throw Error("empty curriculum sample");
  auto schedule = gen_curriculum(s, config);
  std::map<std::uint32_t, double> freq;
  const auto start = sched::late_phase_start(config.curriculum);
  for (std::int64_t i = 0; i < config.em_steps; ++i)
    for (auto id : schedule.step(start + i).batch) freq[id] += 1.0;
  if (freq.empty()) throw Error("empty curriculum sample");

  Corpus sample(false);
  std::vector<double> weights;
  weights.reserve(freq.size());
  for (const auto& [id, n] : freq) {
    const auto& p = (*s.inputs.background)[id];
    sample.add(p.source, p.target);
    weights.push_back(n);
  }
  auto ft = config.finetune;
  ft.threads = config.threads;

  EmState next = s;
  next.clean_tm = std::make_shared<const tm::Model1>(tm::finetune_model1(*s.noisy_tm, sample, ft, weights));
  next.iteration = s.iteration + 1;
  next.history.push_back(evaluate(next, config));
  return next;
}

EmResult run_em(const EmInputs& inputs, const EmConfig& config) {
  auto state = init_em(inputs, config);
  for (int i = 0; i < config.iterations; ++i) state = em_iterate(state, config);
  auto schedule = gen_curriculum(state, config);
  return {std::move(state), std::move(schedule)};
}

std::string metrics_csv(const std::vector<IterationRecord>& history) {
  std::string out = "iteration,heldout_loglik,clean_precision,indomain_precision,joint_precision\n";
  for (const auto& r : history) {
    out += std::to_string(r.iteration) + ',';
    out += std::isnan(r.heldout_loglik) ? std::string() : text::format_double(r.heldout_loglik);
    if (r.quality) {
      out += ',' + text::format_double(r.quality->clean_precision) + ',' +
             text::format_double(r.quality->indomain_precision) + ',' +
             text::format_double(r.quality->joint_precision);
    } else {
      out += ",,,";
    }
    out += '\n';
  }
  return out;
}

}  // namespace cocur::em
