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

// Parallel and monolingual corpora, tokenization and vocabularies.
//
// Corpora are whitespace-tokenized. A parallel pair with an empty side is
// dropped at load and the survivors are renumbered densely, so every pair
// has |source| >= 1 and |target| >= 1 and ids run 0..N-1 in file order.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cocur {

using TokenSeq = std::vector<std::string>;
using TokenId = std::uint32_t;

// Ground truth carried by synthetic corpora.
struct PairLabels {
  bool in_domain = false;
  bool clean = false;

  friend bool operator==(const PairLabels&, const PairLabels&) = default;
};

struct SentencePair {
  std::uint32_t id = 0;
  TokenSeq source;
  TokenSeq target;  // empty for monolingual corpora
  std::optional<PairLabels> labels;
};

struct TokenizeOptions {
  bool lowercase = true;  // ASCII only
};

struct LoadOptions {
  TokenizeOptions tokenize;
  std::size_t max_length = 0;  // 0 = no cap; longer pairs are dropped
};

TokenSeq tokenize(std::string_view line, const TokenizeOptions& options = {});

class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(bool monolingual) : monolingual_(monolingual) {}

  // Appends a pair, assigning the next dense id.
  SentencePair& add(TokenSeq source, TokenSeq target = {},
                    std::optional<PairLabels> labels = std::nullopt);

  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  bool monolingual() const { return monolingual_; }
  // True when every pair carries labels (and the corpus is non-empty).
  bool labeled() const;

  const SentencePair& operator[](std::size_t i) const { return pairs_[i]; }
  SentencePair& operator[](std::size_t i) { return pairs_[i]; }
  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }
  const std::vector<SentencePair>& pairs() const { return pairs_; }

  std::string source_path;
  std::string target_path;

 private:
  std::vector<SentencePair> pairs_;
  bool monolingual_ = false;
};

Corpus load_parallel(const std::filesystem::path& source_path,
                     const std::filesystem::path& target_path, const LoadOptions& options = {});
Corpus load_monolingual(const std::filesystem::path& path, const LoadOptions& options = {});

// Labels TSV: "id \t in_domain \t clean" with 0/1 flags, ids refer to the
// loaded (dense) ids. Every pair must be covered.
void attach_labels(Corpus& corpus, const std::filesystem::path& labels_path);

void write_parallel(const Corpus& corpus, const std::filesystem::path& source_path,
                    const std::filesystem::path& target_path);
void write_monolingual(const Corpus& corpus, const std::filesystem::path& path);
void write_labels(const Corpus& corpus, const std::filesystem::path& path);

std::string join_tokens(std::span<const std::string> tokens);

enum class Side { source, target };

class Vocab {
 public:
  static constexpr TokenId kUnk = 0;
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocab();
  // First entry of `tokens` must be the UNK token.
  Vocab(std::vector<std::string> tokens, int min_count);

  TokenId index(std::string_view token) const;
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  std::size_t size() const { return tokens_.size(); }
  bool contains(std::string_view token) const;
  int min_count() const { return min_count_; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<TokenId> map(std::span<const std::string> tokens) const;

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.tokens_ == b.tokens_ && a.min_count_ == b.min_count_;
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId, Hash, std::equal_to<>> index_;
  int min_count_ = 1;
};

// Tokens with frequency >= min_count over the given side of all corpora,
// ordered by descending frequency, ties lexicographic; UNK is index 0.
Vocab build_vocab(std::span<const Corpus* const> corpora, Side side, int min_count);
Vocab build_vocab(const Corpus& corpus, Side side, int min_count);

}  // namespace cocur
