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

#include "cocur/ngram_lm.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "cocur/error.hpp"
#include "cocur/parallel.hpp"
#include "cocur/simd/kernels.hpp"
#include "cocur/text_io.hpp"

namespace cocur::lm {

namespace {

constexpr std::string_view kMagic = "cocur-ngram v1";

std::vector<double> unigram_estimate(const Corpus& corpus, const Vocab& vocab, double alpha) {
  std::vector<double> counts(vocab.size(), 0.0);
  double n = 0.0;
  for (const auto& p : corpus)
    for (const auto& t : p.source) {
      counts[vocab.index(t)] += 1.0;
      n += 1.0;
    }
  const double denom = n + alpha * static_cast<double>(vocab.size());
  if (!(denom > 0.0)) throw Error("unigram distribution undefined: no tokens and unigram_alpha = 0");
  for (double& c : counts) c = (c + alpha) / denom;
  return counts;
}

}  // namespace

void validate(const NgramOptions& options) {
  if (options.order < 1) throw Error("ngram order must be >= 1");
  if (options.weights.size() != static_cast<std::size_t>(options.order))
    throw Error("ngram needs one interpolation weight per order");
  double s = 0.0;
  for (double w : options.weights) {
    if (!(w >= 0.0)) throw Error("interpolation weights must be non-negative");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-9) throw Error("interpolation weights must sum to 1");
  if (!(options.unigram_alpha >= 0.0)) throw Error("unigram_alpha must be >= 0");
}

void NgramLm::count_higher_orders(const Corpus& corpus) {
  tables_.assign(static_cast<std::size_t>(std::max(order_ - 1, 0)), {});
  if (order_ < 2) return;
  // Accumulate in hash maps, then freeze into sorted tables.
  std::vector<std::map<std::vector<TokenId>, std::unordered_map<TokenId, std::uint64_t>>> raw(tables_.size());
  std::vector<TokenId> padded;
  for (const auto& p : corpus) {
    padded.assign(static_cast<std::size_t>(order_ - 1), kBos);
    for (const auto& t : p.source) padded.push_back(vocab_->index(t));
    for (std::size_t j = static_cast<std::size_t>(order_ - 1); j < padded.size(); ++j) {
      for (int k = 2; k <= order_; ++k) {
        std::vector<TokenId> ctx(padded.begin() + static_cast<std::ptrdiff_t>(j) - (k - 1),
                                 padded.begin() + static_cast<std::ptrdiff_t>(j));
        ++raw[static_cast<std::size_t>(k - 2)][std::move(ctx)][padded[j]];
      }
    }
  }
  for (std::size_t k = 0; k < raw.size(); ++k) {
    for (auto& [ctx, next] : raw[k]) {
      ContextCounts cc;
      cc.next.assign(next.begin(), next.end());
      std::sort(cc.next.begin(), cc.next.end());
      for (const auto& [w, c] : cc.next) cc.total += c;
      tables_[k].emplace(ctx, std::move(cc));
    }
  }
}

double NgramLm::prob(std::span<const TokenId> history, TokenId w) const {
  double p_lower = unigram_.at(w);
  double result = weights_[static_cast<std::size_t>(order_ - 1)] * p_lower;
  std::vector<TokenId> ctx;
  for (int k = 2; k <= order_; ++k) {
    const std::size_t len = static_cast<std::size_t>(k - 1);
    ctx.assign(len, kBos);
    const std::size_t take = std::min(len, history.size());
    std::copy(history.end() - static_cast<std::ptrdiff_t>(take), history.end(),
              ctx.end() - static_cast<std::ptrdiff_t>(take));
    double p_k = p_lower;
    const auto& table = tables_[static_cast<std::size_t>(k - 2)];
    if (auto it = table.find(ctx); it != table.end()) {
      const auto& next = it->second.next;
      auto pos = std::lower_bound(next.begin(), next.end(), std::pair<TokenId, std::uint64_t>{w, 0});
      const double c = (pos != next.end() && pos->first == w) ? static_cast<double>(pos->second) : 0.0;
      p_k = c / static_cast<double>(it->second.total);
    }
    result += weights_[static_cast<std::size_t>(order_ - k)] * p_k;
    p_lower = p_k;
  }
  return result;
}

double NgramLm::logprob_ids(std::span<const TokenId> ids) const {
  double lp = 0.0;
  for (std::size_t j = 0; j < ids.size(); ++j) lp += std::log(prob(ids.first(j), ids[j]));
  return lp;
}

NgramLm train_ngram(const Corpus& corpus, std::shared_ptr<const Vocab> vocab, const NgramOptions& options) {
  validate(options);
  if (!vocab) throw Error("train_ngram: missing vocabulary");
  NgramLm lm;
  lm.order_ = options.order;
  lm.weights_ = options.weights;
  lm.alpha_ = options.unigram_alpha;
  lm.vocab_ = std::move(vocab);
  lm.unigram_ = unigram_estimate(corpus, *lm.vocab_, lm.alpha_);
  lm.count_higher_orders(corpus);
  return lm;
}

NgramLm adapt_ngram(const NgramLm& general, const Corpus& indomain, double mu, const NgramOptions& options) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw Error("adapt_ngram: mu must lie in [0, 1]");
  NgramLm lm = train_ngram(indomain, general.vocab_ptr(), options);
  simd::lerp(lm.unigram_, general.unigram_, mu);
  return lm;
}

double lm_logprob(const NgramLm& lm, std::span<const std::string> tokens) {
  const auto ids = lm.vocab().map(tokens);
  return lm.logprob_ids(ids);
}

void validate(const DomainScorer& scorer) {
  if (!scorer.general.vocab_ptr() || !scorer.indomain.vocab_ptr())
    throw Error("domain scorer: untrained model");
  if (scorer.general.vocab_ptr() != scorer.indomain.vocab_ptr() &&
      !(scorer.general.vocab() == scorer.indomain.vocab()))
    throw Error("domain scorer: general and in-domain models must share one vocabulary");
}

double domain_score(const DomainScorer& scorer, std::span<const std::string> source) {
  if (source.empty()) throw Error("domain_score: empty source sentence");
  const auto ids = scorer.general.vocab().map(source);
  return (scorer.indomain.logprob_ids(ids) - scorer.general.logprob_ids(ids)) /
         static_cast<double>(ids.size());
}

std::vector<double> domain_scores(const DomainScorer& scorer, const Corpus& corpus, int threads) {
  validate(scorer);
  std::vector<double> out(corpus.size());
  parallel_chunks(corpus.size(), threads, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = domain_score(scorer, corpus[i].source);
  });
  return out;
}

// Text format:
//   cocur-ngram v1
//   order <n>
//   weights <w_n> ... <w_1>
//   alpha <a>
//   min_count <m>
//   vocab <V>            then V lines, one token each, by index
//   unigram              then V lines, one probability each
//   table <k> <contexts> then per context:
//     <ctx ids...> | <total> <w>:<count> ...
//   end
void NgramLm::save(std::ostream& out) const {
  out << kMagic << '\n';
  out << "order " << order_ << '\n';
  out << "weights";
  for (double w : weights_) out << ' ' << text::format_double(w);
  out << '\n';
  out << "alpha " << text::format_double(alpha_) << '\n';
  out << "min_count " << vocab_->min_count() << '\n';
  out << "vocab " << vocab_->size() << '\n';
  for (const auto& t : vocab_->tokens()) out << t << '\n';
  out << "unigram\n";
  for (double p : unigram_) out << text::format_double(p) << '\n';
  for (std::size_t k = 0; k < tables_.size(); ++k) {
    out << "table " << (k + 2) << ' ' << tables_[k].size() << '\n';
    for (const auto& [ctx, cc] : tables_[k]) {
      for (TokenId id : ctx) out << (id == kBos ? std::string("<s>") : std::to_string(id)) << ' ';
      out << "| " << cc.total;
      for (const auto& [w, c] : cc.next) out << ' ' << w << ':' << c;
      out << '\n';
    }
  }
  out << "end\n";
}

NgramLm NgramLm::load(std::istream& in) {
  if (text::next_line(in, "header") != kMagic) throw Error("not a cocur n-gram model (bad header)");
  NgramLm lm;
  lm.order_ = static_cast<int>(text::parse_int(text::expect_line(in, "order")));
  lm.weights_.clear();
  for (auto w : text::split(text::expect_line(in, "weights"), ' ')) lm.weights_.push_back(text::parse_double(w));
  lm.alpha_ = text::parse_double(text::expect_line(in, "alpha"));
  validate(NgramOptions{lm.order_, lm.weights_, lm.alpha_});
  const int min_count = static_cast<int>(text::parse_int(text::expect_line(in, "min_count")));
  const auto v = static_cast<std::size_t>(text::parse_int(text::expect_line(in, "vocab")));
  std::vector<std::string> tokens;
  tokens.reserve(v);
  for (std::size_t i = 0; i < v; ++i) tokens.push_back(text::next_line(in, "vocab token"));
  lm.vocab_ = std::make_shared<const Vocab>(std::move(tokens), min_count);
  text::expect_line(in, "unigram");
  lm.unigram_.resize(v);
  for (auto& p : lm.unigram_) p = text::parse_double(text::next_line(in, "unigram probability"));
  lm.tables_.assign(static_cast<std::size_t>(lm.order_ - 1), {});
  for (int k = 2; k <= lm.order_; ++k) {
    const auto header = text::split(text::expect_line(in, "table"), ' ');
    if (header.size() != 2 || text::parse_int(header[0]) != k) throw Error("malformed n-gram table header");
    const auto n = static_cast<std::size_t>(text::parse_int(header[1]));
    auto& table = lm.tables_[static_cast<std::size_t>(k - 2)];
    for (std::size_t i = 0; i < n; ++i) {
      const std::string line = text::next_line(in, "n-gram context");
      const auto bar = line.find('|');
      if (bar == std::string::npos) throw Error("malformed n-gram context line");
      std::vector<TokenId> ctx;
      for (auto f : text::split(text::trim(std::string_view(line).substr(0, bar)), ' '))
        ctx.push_back(f == "<s>" ? kBos : static_cast<TokenId>(text::parse_int(f)));
      if (ctx.size() != static_cast<std::size_t>(k - 1)) throw Error("n-gram context has wrong length");
      const auto fields = text::split(text::trim(std::string_view(line).substr(bar + 1)), ' ');
      ContextCounts cc;
      cc.total = static_cast<std::uint64_t>(text::parse_int(fields.at(0)));
      for (std::size_t f = 1; f < fields.size(); ++f) {
        const auto colon = fields[f].find(':');
        if (colon == std::string_view::npos) throw Error("malformed n-gram count");
        const auto w = static_cast<TokenId>(text::parse_int(fields[f].substr(0, colon)));
        if (w >= v) throw Error("n-gram token index out of range");
        cc.next.emplace_back(w, static_cast<std::uint64_t>(text::parse_int(fields[f].substr(colon + 1))));
      }
      table.emplace(std::move(ctx), std::move(cc));
    }
  }
  text::expect_line(in, "end");
  return lm;
}

bool operator==(const NgramLm& a, const NgramLm& b) {
  return a.order_ == b.order_ && a.weights_ == b.weights_ && a.alpha_ == b.alpha_ &&
         a.vocab_ && b.vocab_ && *a.vocab_ == *b.vocab_ && a.unigram_ == b.unigram_ && a.tables_ == b.tables_;
}

}  // namespace cocur::lm
