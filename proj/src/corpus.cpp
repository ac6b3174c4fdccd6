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

#include "cocur/corpus.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "cocur/error.hpp"
#include "cocur/text_io.hpp"

namespace cocur {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool too_long(const TokenSeq& s, std::size_t cap) { return cap != 0 && s.size() > cap; }

}  // namespace

TokenSeq tokenize(std::string_view line, const TokenizeOptions& options) {
  TokenSeq out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) {
      std::string tok(line.substr(start, i - start));
      if (options.lowercase)
        for (char& c : tok)
          if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      out.push_back(std::move(tok));
    }
  }
  return out;
}

SentencePair& Corpus::add(TokenSeq source, TokenSeq target, std::optional<PairLabels> labels) {
  SentencePair p;
  p.id = static_cast<std::uint32_t>(pairs_.size());
  p.source = std::move(source);
  p.target = std::move(target);
  p.labels = labels;
  pairs_.push_back(std::move(p));
  return pairs_.back();
}

bool Corpus::labeled() const {
  return !pairs_.empty() &&
         std::all_of(pairs_.begin(), pairs_.end(), [](const auto& p) { return p.labels.has_value(); });
}

Corpus load_parallel(const std::filesystem::path& source_path,
                     const std::filesystem::path& target_path, const LoadOptions& options) {
  const auto src = text::read_lines(source_path);
  const auto tgt = text::read_lines(target_path);
  if (src.size() != tgt.size())
    throw Error("line count mismatch " + std::to_string(src.size()) + " vs " +
                std::to_string(tgt.size()) + " (" + source_path.string() + ", " +
                target_path.string() + ")");
  Corpus corpus(false);
  corpus.source_path = source_path.string();
  corpus.target_path = target_path.string();
  for (std::size_t i = 0; i < src.size(); ++i) {
    auto s = tokenize(src[i], options.tokenize);
    auto t = tokenize(tgt[i], options.tokenize);
    if (s.empty() || t.empty()) continue;
    if (too_long(s, options.max_length) || too_long(t, options.max_length)) continue;
    corpus.add(std::move(s), std::move(t));
  }
  return corpus;
}

Corpus load_monolingual(const std::filesystem::path& path, const LoadOptions& options) {
  const auto lines = text::read_lines(path);
  Corpus corpus(true);
  corpus.source_path = path.string();
  for (const auto& line : lines) {
    auto s = tokenize(line, options.tokenize);
    if (s.empty() || too_long(s, options.max_length)) continue;
    corpus.add(std::move(s));
  }
  return corpus;
}

void attach_labels(Corpus& corpus, const std::filesystem::path& labels_path) {
  const auto lines = text::read_lines(labels_path);
  std::vector<bool> seen(corpus.size(), false);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto line = text::trim(lines[ln]);
    if (line.empty()) continue;
    const auto fields = text::split(line, '\t');
    if (fields.size() != 3)
      throw Error(labels_path.string() + ":" + std::to_string(ln + 1) + ": expected 3 fields");
    const auto id = text::parse_int(fields[0]);
    if (id < 0 || static_cast<std::size_t>(id) >= corpus.size())
      throw Error(labels_path.string() + ":" + std::to_string(ln + 1) + ": id out of range");
    corpus[static_cast<std::size_t>(id)].labels =
        PairLabels{text::parse_bool(fields[1]), text::parse_bool(fields[2])};
    seen[static_cast<std::size_t>(id)] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw Error(labels_path.string() + ": labels do not cover every pair");
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

void write_parallel(const Corpus& corpus, const std::filesystem::path& source_path,
                    const std::filesystem::path& target_path) {
  std::string src, tgt;
  for (const auto& p : corpus) {
    src += join_tokens(p.source) + '\n';
    tgt += join_tokens(p.target) + '\n';
  }
  text::write_file(source_path, src);
  text::write_file(target_path, tgt);
}

void write_monolingual(const Corpus& corpus, const std::filesystem::path& path) {
  std::string out;
  for (const auto& p : corpus) out += join_tokens(p.source) + '\n';
  text::write_file(path, out);
}

void write_labels(const Corpus& corpus, const std::filesystem::path& path) {
  std::string out;
  for (const auto& p : corpus) {
    if (!p.labels) throw Error("write_labels: pair " + std::to_string(p.id) + " has no labels");
    out += std::to_string(p.id) + '\t' + (p.labels->in_domain ? "1" : "0") + '\t' +
           (p.labels->clean ? "1" : "0") + '\n';
  }
  text::write_file(path, out);
}

Vocab::Vocab() : Vocab({std::string(kUnkToken)}, 1) {}

Vocab::Vocab(std::vector<std::string> tokens, int min_count)
    : tokens_(std::move(tokens)), min_count_(min_count) {
  if (tokens_.empty() || tokens_[0] != kUnkToken) throw Error("vocab must start with " + std::string(kUnkToken));
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second)
      throw Error("duplicate vocab token '" + tokens_[i] + "'");
  }
}

TokenId Vocab::index(std::string_view token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

bool Vocab::contains(std::string_view token) const { return index_.find(token) != index_.end(); }

std::vector<TokenId> Vocab::map(std::span<const std::string> tokens) const {
  std::vector<TokenId> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(index(t));
  return out;
}

Vocab build_vocab(std::span<const Corpus* const> corpora, Side side, int min_count) {
  if (min_count < 1) throw Error("min_count must be >= 1");
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const Corpus* c : corpora)
    for (const auto& p : *c)
      for (const auto& t : side == Side::source ? p.source : p.target) ++counts[t];

  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [tok, n] : counts)
    if (n >= static_cast<std::uint64_t>(min_count) && tok != Vocab::kUnkToken) kept.emplace_back(tok, n);
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> tokens{std::string(Vocab::kUnkToken)};
  tokens.reserve(kept.size() + 1);
  for (auto& [tok, n] : kept) tokens.push_back(std::move(tok));
  return Vocab(std::move(tokens), min_count);
}

Vocab build_vocab(const Corpus& corpus, Side side, int min_count) {
  const Corpus* one[] = {&corpus};
  return build_vocab(one, side, min_count);
}

}  // namespace cocur
