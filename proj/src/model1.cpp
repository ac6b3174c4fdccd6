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

#include "cocur/model1.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "cocur/error.hpp"
#include "cocur/parallel.hpp"
#include "cocur/simd/kernels.hpp"
#include "cocur/text_io.hpp"

namespace cocur::tm {

namespace {

constexpr std::string_view kMagic = "cocur-model1 v1";

void check_weights(const Corpus& corpus, std::span<const double> weights) {
  if (weights.empty()) return;
  if (weights.size() != corpus.size()) throw Error("pair weights must match the corpus size");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error("pair weights must be finite and non-negative");
}

}  // namespace

// Owns the EM bookkeeping for one model and one training corpus: the
// co-occurrence structure, and for every pair the flat list of table slots
// t(y_j | x_i) laid out target-major (NULL first within each target).
class Trainer {
 public:
  static std::vector<double>& vals(Model1& m) { return m.vals_; }
  static std::vector<double>& defaults(Model1& m) { return m.defaults_; }
  static void set_iterations(Model1& m, int n) { m.em_iterations_run_ = n; }

  Trainer(Model1& model, const Corpus& corpus, std::span<const double> weights, int threads)
      : model_(model), weights_(weights), threads_(threads) {
    pair_offsets_.reserve(corpus.size() + 1);
    pair_offsets_.push_back(0);
    for (const auto& p : corpus) {
      const auto src = model.source_vocab_->map(p.source);
      const auto tgt = model.target_vocab_->map(p.target);
      src_len_.push_back(static_cast<std::uint32_t>(src.size() + 1));
      tgt_len_.push_back(static_cast<std::uint32_t>(tgt.size()));
      for (TokenId f : tgt) {
        slots_.push_back(slot(Model1::kNullRow, f));
        for (TokenId e : src) slots_.push_back(slot(Model1::row_of(e), f));
      }
      pair_offsets_.push_back(slots_.size());
    }
  }

  // Explicit entries: corpus co-occurrences (NULL with every target token),
  // plus the explicit entries of `base` when given. Values start from
  // `base`, or uniform 1/|V_target| without one.
  static Model1 make_structure(std::shared_ptr<const Vocab> source_vocab,
                               std::shared_ptr<const Vocab> target_vocab, const Corpus& corpus,
                               const Model1* base) {
    Model1 m;
    m.source_vocab_ = std::move(source_vocab);
    m.target_vocab_ = std::move(target_vocab);
    const std::size_t rows = m.source_vocab_->size() + 1;
    std::vector<std::vector<TokenId>> cols(rows);
    for (const auto& p : corpus) {
      const auto src = m.source_vocab_->map(p.source);
      const auto tgt = m.target_vocab_->map(p.target);
      for (TokenId f : tgt) {
        cols[Model1::kNullRow].push_back(f);
        for (TokenId e : src) cols[Model1::row_of(e)].push_back(f);
      }
    }
    if (base != nullptr)
      for (Model1::Row r = 0; r < rows; ++r)
        for (TokenId f : base->row_targets(r)) cols[r].push_back(f);

    const double uniform = 1.0 / static_cast<double>(m.target_vocab_->size());
    m.offsets_.assign(1, 0);
    m.defaults_.resize(rows);
    for (Model1::Row r = 0; r < rows; ++r) {
      auto& c = cols[r];
      std::sort(c.begin(), c.end());
      c.erase(std::unique(c.begin(), c.end()), c.end());
      for (TokenId f : c) {
        m.cols_.push_back(f);
        m.vals_.push_back(base ? base->prob(r, f) : uniform);
      }
      m.offsets_.push_back(m.cols_.size());
      m.defaults_[r] = base ? base->row_default(r) : uniform;
      std::vector<TokenId>().swap(c);
    }
    if (m.vals_.size() >= (std::size_t{1} << 31)) throw Error("translation table too large");
    return m;
  }

  // Fractional counts aligned with model.vals_; returns the weighted
  // log-likelihood of the corpus under the current table.
  double e_step(std::vector<double>& counts) const {
    const std::size_t n_pairs = src_len_.size();
    const std::size_t chunks = chunk_count(n_pairs, threads_);
    std::vector<std::vector<double>> partial(chunks > 1 ? chunks : 0);
    std::vector<double> logliks(chunks, 0.0);
    counts.assign(model_.vals_.size(), 0.0);
    parallel_chunks(n_pairs, threads_, [&](std::size_t c, std::size_t begin, std::size_t end) {
      std::vector<double>& acc = chunks > 1 ? partial[c] : counts;
      if (chunks > 1) acc.assign(model_.vals_.size(), 0.0);
      const double* vals = model_.vals_.data();
      const auto gather_sum = simd::active_kernels().gather_sum;
      double ll = 0.0;
      for (std::size_t p = begin; p < end; ++p) {
        const double w = weights_.empty() ? 1.0 : weights_[p];
        if (w == 0.0) continue;
        const std::uint32_t m1 = src_len_[p];
        const double log_norm = std::log(static_cast<double>(m1));
        const std::uint32_t* s = slots_.data() + pair_offsets_[p];
        for (std::uint32_t j = 0; j < tgt_len_[p]; ++j, s += m1) {
          const double denom = gather_sum(vals, s, m1);
          ll += w * (std::log(denom) - log_norm);
          const double scale = w / denom;
          for (std::uint32_t i = 0; i < m1; ++i) acc[s[i]] += vals[s[i]] * scale;
        }
      }
      logliks[c] = ll;
    });
    for (std::size_t c = 0; c < partial.size(); ++c) simd::add(counts, partial[c]);
    double ll = 0.0;
    for (double v : logliks) ll += v;
    return ll;
  }

  // Plain M-step: rows with counts become counts / row total.
  static void m_step(Model1& m, std::vector<double>& counts) {
    for (Model1::Row r = 0; r < m.rows(); ++r) {
      const std::size_t a = m.offsets_[r], b = m.offsets_[r + 1];
      std::span<double> row_counts(counts.data() + a, b - a);
      const double total = simd::sum(row_counts);
      if (!(total > 0.0)) continue;
      simd::scale(row_counts, 1.0 / total);
      std::copy(row_counts.begin(), row_counts.end(), m.vals_.begin() + static_cast<std::ptrdiff_t>(a));
      m.defaults_[r] = 0.0;
    }
  }

  // Fine-tune M-step: rows with counts become blend * estimate +
  // (1 - blend) * base, renormalized over the full target vocabulary.
  static void blended_m_step(Model1& m, std::vector<double>& counts, const std::vector<double>& base_vals,
                             const std::vector<double>& base_defaults, double blend) {
    const double vocab = static_cast<double>(m.target_size());
    for (Model1::Row r = 0; r < m.rows(); ++r) {
      const std::size_t a = m.offsets_[r], b = m.offsets_[r + 1];
      std::span<double> row(counts.data() + a, b - a);
      const double total = simd::sum(row);
      if (!(total > 0.0)) continue;
      simd::scale(row, 1.0 / total);
      simd::lerp(row, std::span<const double>(base_vals.data() + a, b - a), blend);
      double def = (1.0 - blend) * base_defaults[r];
      const double z = simd::sum(row) + (vocab - static_cast<double>(b - a)) * def;
      simd::scale(row, 1.0 / z);
      def /= z;
      std::copy(row.begin(), row.end(), m.vals_.begin() + static_cast<std::ptrdiff_t>(a));
      m.defaults_[r] = def;
    }
  }

  static void floor_and_renormalize(Model1& m, double epsilon) {
    if (!(epsilon > 0.0)) return;
    const double vocab = static_cast<double>(m.target_size());
    for (Model1::Row r = 0; r < m.rows(); ++r) {
      const std::size_t a = m.offsets_[r], b = m.offsets_[r + 1];
      std::span<double> row(m.vals_.data() + a, b - a);
      simd::clamp_min(row, epsilon);
      const double n_default = vocab - static_cast<double>(b - a);
      double& def = m.defaults_[r];
      if (n_default > 0.0) def = std::max(def, epsilon);
      const double z = simd::sum(row) + n_default * def;
      simd::scale(row, 1.0 / z);
      def /= z;
    }
  }

 private:
  TokenId slot(Model1::Row r, TokenId f) const {
    const auto first = model_.cols_.begin() + static_cast<std::ptrdiff_t>(model_.offsets_[r]);
    const auto last = model_.cols_.begin() + static_cast<std::ptrdiff_t>(model_.offsets_[r + 1]);
    const auto it = std::lower_bound(first, last, f);
    return static_cast<TokenId>(it - model_.cols_.begin());
  }

  Model1& model_;
  std::span<const double> weights_;
  int threads_;
  std::vector<std::size_t> pair_offsets_;
  std::vector<std::uint32_t> slots_;
  std::vector<std::uint32_t> src_len_;
  std::vector<std::uint32_t> tgt_len_;

};

Model1 train_model1(const Corpus& corpus, std::shared_ptr<const Vocab> source_vocab,
                    std::shared_ptr<const Vocab> target_vocab, const Model1Options& options,
                    const EmObserver& observer) {
  if (corpus.empty()) throw Error("train_model1: empty corpus");
  if (corpus.monolingual()) throw Error("train_model1: corpus has no target side");
  if (options.em_iterations < 0) throw Error("train_model1: em_iterations must be >= 0");
  if (!source_vocab || !target_vocab) throw Error("train_model1: missing vocabulary");
  Model1 model = Trainer::make_structure(std::move(source_vocab), std::move(target_vocab), corpus, nullptr);
  if (options.em_iterations == 0) return model;
  Trainer trainer(model, corpus, {}, options.threads);
  std::vector<double> counts;
  for (int it = 1; it <= options.em_iterations; ++it) {
    const double ll = trainer.e_step(counts);
    Trainer::m_step(model, counts);
    Trainer::set_iterations(model, it);
    if (observer) observer(it, model, ll);
  }
  Trainer::floor_and_renormalize(model, options.epsilon_floor);
  return model;
}

Model1 finetune_model1(const Model1& base, const Corpus& trusted, const FinetuneOptions& options,
                       std::span<const double> pair_weights, const EmObserver& observer) {
  if (trusted.empty()) throw Error("finetune_model1: empty trusted corpus");
  if (trusted.monolingual()) throw Error("finetune_model1: corpus has no target side");
  if (options.em_iterations < 0) throw Error("finetune_model1: em_iterations must be >= 0");
  if (!(options.blend > 0.0 && options.blend <= 1.0)) throw Error("finetune_model1: blend must lie in (0, 1]");
  check_weights(trusted, pair_weights);
  if (options.em_iterations == 0) return base;

  Model1 model = Trainer::make_structure(base.source_vocab_ptr(), base.target_vocab_ptr(), trusted, &base);
  const std::vector<double> base_vals = Trainer::vals(model);
  const std::vector<double> base_defaults = Trainer::defaults(model);
  Trainer trainer(model, trusted, pair_weights, options.threads);
  std::vector<double> counts;
  for (int it = 1; it <= options.em_iterations; ++it) {
    const double ll = trainer.e_step(counts);
    Trainer::blended_m_step(model, counts, base_vals, base_defaults, options.blend);
    Trainer::set_iterations(model, base.em_iterations_run() + it);
    if (observer) observer(it, model, ll);
  }
  Trainer::floor_and_renormalize(model, options.epsilon_floor);
  return model;
}

double Model1::prob(Row row, TokenId target) const {
  const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[row]);
  const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[row + 1]);
  const auto it = std::lower_bound(first, last, target);
  if (it != last && *it == target) return vals_[static_cast<std::size_t>(it - cols_.begin())];
  return defaults_[row];
}

double Model1::row_sum(Row row) const {
  const auto vals = row_values(row);
  return simd::sum(vals) +
         (static_cast<double>(target_size()) - static_cast<double>(vals.size())) * defaults_[row];
}

std::span<const TokenId> Model1::row_targets(Row row) const {
  return {cols_.data() + offsets_[row], offsets_[row + 1] - offsets_[row]};
}

std::span<const double> Model1::row_values(Row row) const {
  return {vals_.data() + offsets_[row], offsets_[row + 1] - offsets_[row]};
}

bool operator==(const Model1& a, const Model1& b) {
  return a.source_vocab_ && b.source_vocab_ && *a.source_vocab_ == *b.source_vocab_ &&
         *a.target_vocab_ == *b.target_vocab_ && a.offsets_ == b.offsets_ && a.cols_ == b.cols_ &&
         a.vals_ == b.vals_ && a.defaults_ == b.defaults_ && a.em_iterations_run_ == b.em_iterations_run_;
}

double tm_logprob(const Model1& model, std::span<const std::string> source, std::span<const std::string> target) {
  if (source.empty()) throw Error("tm_logprob: empty source sentence");
  std::vector<Model1::Row> rows;
  rows.reserve(source.size() + 1);
  rows.push_back(Model1::kNullRow);
  for (const auto& t : source) rows.push_back(Model1::row_of(model.source_vocab().index(t)));
  const double log_norm = std::log(static_cast<double>(rows.size()));
  double lp = 0.0;
  for (const auto& t : target) {
    const TokenId f = model.target_vocab().index(t);
    double s = 0.0;
    for (Model1::Row r : rows) s += model.prob(r, f);
    lp += std::log(s) - log_norm;
  }
  return lp;
}

double corpus_loglik(const Model1& model, const Corpus& corpus) {
  double ll = 0.0;
  for (const auto& p : corpus) ll += tm_logprob(model, p.source, p.target);
  return ll;
}

double per_token_loglik(const Model1& model, const Corpus& corpus) {
  std::size_t tokens = 0;
  for (const auto& p : corpus) tokens += p.target.size();
  if (tokens == 0) throw Error("per_token_loglik: corpus has no target tokens");
  return corpus_loglik(model, corpus) / static_cast<double>(tokens);
}

void validate(const DenoiseScorer& scorer) {
  if (!scorer.noisy || !scorer.clean) throw Error("denoise scorer: missing model");
  if (!(scorer.noisy->source_vocab() == scorer.clean->source_vocab()) ||
      !(scorer.noisy->target_vocab() == scorer.clean->target_vocab()))
    throw Error("denoise scorer: noisy and clean models must share vocabularies");
}

double denoise_score(const DenoiseScorer& scorer, const SentencePair& pair) {
  if (pair.source.empty() || pair.target.empty()) throw Error("denoise_score: empty sentence side");
  return (tm_logprob(*scorer.clean, pair.source, pair.target) -
          tm_logprob(*scorer.noisy, pair.source, pair.target)) /
         static_cast<double>(pair.target.size());
}

std::vector<double> denoise_scores(const DenoiseScorer& scorer, const Corpus& corpus, int threads) {
  validate(scorer);
  std::vector<double> out(corpus.size());
  parallel_chunks(corpus.size(), threads, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = denoise_score(scorer, corpus[i]);
  });
  return out;
}

// Text format:
//   cocur-model1 v1
//   iterations <n>
//   source_min_count <m>
//   source_vocab <V>   then V token lines
//   target_min_count <m>
//   target_vocab <V>   then V token lines
//   rows <R>
//   then per row:  <default> <n> [<target>:<prob> ...]
//   end
void Model1::save(std::ostream& out) const {
  out << kMagic << '\n';
  out << "iterations " << em_iterations_run_ << '\n';
  out << "source_min_count " << source_vocab_->min_count() << '\n';
  out << "source_vocab " << source_vocab_->size() << '\n';
  for (const auto& t : source_vocab_->tokens()) out << t << '\n';
  out << "target_min_count " << target_vocab_->min_count() << '\n';
  out << "target_vocab " << target_vocab_->size() << '\n';
  for (const auto& t : target_vocab_->tokens()) out << t << '\n';
  out << "rows " << rows() << '\n';
  for (Row r = 0; r < rows(); ++r) {
    out << text::format_double(defaults_[r]) << ' ' << (offsets_[r + 1] - offsets_[r]);
    for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k)
      out << ' ' << cols_[k] << ':' << text::format_double(vals_[k]);
    out << '\n';
  }
  out << "end\n";
}

Model1 Model1::load(std::istream& in) {
  if (text::next_line(in, "header") != kMagic) throw Error("not a cocur Model 1 file (bad header)");
  Model1 m;
  m.em_iterations_run_ = static_cast<int>(text::parse_int(text::expect_line(in, "iterations")));
  auto read_vocab = [&](std::string_view min_key, std::string_view key) {
    const int min_count = static_cast<int>(text::parse_int(text::expect_line(in, min_key)));
    const auto n = static_cast<std::size_t>(text::parse_int(text::expect_line(in, key)));
    std::vector<std::string> tokens;
    tokens.reserve(n);
    for (std::size_t i = 0; i < n; ++i) tokens.push_back(text::next_line(in, "vocab token"));
    return std::make_shared<const Vocab>(std::move(tokens), min_count);
  };
  m.source_vocab_ = read_vocab("source_min_count", "source_vocab");
  m.target_vocab_ = read_vocab("target_min_count", "target_vocab");
  const auto rows = static_cast<std::size_t>(text::parse_int(text::expect_line(in, "rows")));
  if (rows != m.source_vocab_->size() + 1) throw Error("Model 1 row count does not match the source vocabulary");
  m.offsets_.assign(1, 0);
  m.defaults_.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string line = text::next_line(in, "table row");
    const auto fields = text::split(line, ' ');
    if (fields.size() < 2) throw Error("malformed Model 1 row");
    m.defaults_[r] = text::parse_double(fields[0]);
    const auto n = static_cast<std::size_t>(text::parse_int(fields[1]));
    if (fields.size() != n + 2) throw Error("Model 1 row has wrong entry count");
    for (std::size_t k = 0; k < n; ++k) {
      const auto f = fields[k + 2];
      const auto colon = f.find(':');
      if (colon == std::string_view::npos) throw Error("malformed Model 1 entry");
      const auto col = static_cast<TokenId>(text::parse_int(f.substr(0, colon)));
      if (col >= m.target_vocab_->size() || (!m.cols_.empty() && k > 0 && col <= m.cols_.back()))
        throw Error("Model 1 row targets must be in range and strictly increasing");
      m.cols_.push_back(col);
      m.vals_.push_back(text::parse_double(f.substr(colon + 1)));
    }
    m.offsets_.push_back(m.cols_.size());
  }
  text::expect_line(in, "end");
  return m;
}

}  // namespace cocur::tm
