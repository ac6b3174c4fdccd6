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

#include "cocur/run_config.hpp"

#include <array>

#include "cocur/error.hpp"
#include "cocur/text_io.hpp"

namespace cocur::cli {

namespace {

constexpr std::array kKeys = {
    KeyInfo{"seed", "1", "seed for synthetic data and batch sampling"},
    KeyInfo{"data.background_source", "", "noisy mixed-domain parallel corpus, source side"},
    KeyInfo{"data.background_target", "", "noisy mixed-domain parallel corpus, target side"},
    KeyInfo{"data.background_labels", "", "optional labels TSV (id, in_domain, clean)"},
    KeyInfo{"data.indomain", "", "in-domain monolingual source sentences"},
    KeyInfo{"data.trusted_source", "", "small trusted parallel corpus, source side"},
    KeyInfo{"data.trusted_target", "", "small trusted parallel corpus, target side"},
    KeyInfo{"data.heldout_source", "", "held-out trusted corpus, source side (optional)"},
    KeyInfo{"data.heldout_target", "", "held-out trusted corpus, target side (optional)"},
    KeyInfo{"data.lowercase", "true", "ASCII lowercasing at load"},
    KeyInfo{"data.max_length", "0", "drop pairs with a side longer than this; 0 keeps all"},
    KeyInfo{"vocab.min_count", "1", "rarer tokens map to <unk>"},
    KeyInfo{"lm.order", "3", "n-gram order"},
    KeyInfo{"lm.weights", "0.5,0.3,0.2", "interpolation weights, highest order first"},
    KeyInfo{"lm.alpha", "0.1", "add-alpha constant of the unigram distribution"},
    KeyInfo{"lm.mu", "0.9", "in-domain share of the in-domain model's unigram distribution"},
    KeyInfo{"tm.iterations", "5", "EM iterations of the noisy translation model"},
    KeyInfo{"tm.epsilon", "1e-9", "probability floor applied after training"},
    KeyInfo{"finetune.iterations", "3", "EM iterations when fine-tuning"},
    KeyInfo{"finetune.blend", "0.5", "weight of the fine-tuned estimate against the base table"},
    KeyInfo{"curriculum.kind", "cascade", "random, domain, denoise, mix or cascade"},
    KeyInfo{"curriculum.max_steps", "3000000", "training steps of the schedule"},
    KeyInfo{"curriculum.batch_size", "128", "pairs sampled per step"},
    KeyInfo{"curriculum.buffer_size", "65536", "pairs scored per step (clamped to the corpus)"},
    KeyInfo{"curriculum.refill_fraction", "1.0", "share of the buffer replaced after each step"},
    KeyInfo{"curriculum.full_dataset", "false", "select over the whole corpus instead of a buffer"},
    KeyInfo{"curriculum.z_normalize", "false", "standardize both scores before mixing"},
    KeyInfo{"curriculum.nesting", "denoise_first", "cascade order: denoise_first or domain_first"},
    KeyInfo{"pace.lambda_half_life", "auto", "single-score and mix half-life; auto = 400000 * max_steps / 3M"},
    KeyInfo{"pace.lambda_floor", "0.1", "single-score and mix floor"},
    KeyInfo{"pace.beta_half_life", "auto", "cascade denoising half-life; auto = 400000 * max_steps / 3M"},
    KeyInfo{"pace.beta_floor", "0.2", "cascade denoising floor"},
    KeyInfo{"pace.gamma_half_life", "auto", "cascade domain half-life; auto = 900000 * max_steps / 3M"},
    KeyInfo{"pace.gamma_floor", "0.5", "cascade domain floor"},
    KeyInfo{"select.checkpoints", "0", "comma-separated steps written by `select`"},
    KeyInfo{"em.iterations", "3", "bootstrap iterations"},
    KeyInfo{"em.steps", "2000", "late-phase batches collected per iteration"},
    KeyInfo{"report.percentiles", "0,10,20,30,40,50,60,70,80,90", "filtering percentages of the curves"},
    KeyInfo{"synth.n_pairs", "20000", "background pairs"},
    KeyInfo{"synth.indomain_fraction", "0.5", "share of in-domain background pairs"},
    KeyInfo{"synth.noise_fraction", "0.3", "share of corrupted background pairs"},
    KeyInfo{"synth.indomain_vocab", "400", "source words of the in-domain distribution"},
    KeyInfo{"synth.outdomain_vocab", "400", "source words of the out-of-domain distribution"},
    KeyInfo{"synth.overlap", "0.95", "shared share of the smaller vocabulary"},
    KeyInfo{"synth.head_size", "10", "top ranks reserved for domain-specific words"},
    KeyInfo{"synth.zipf", "1.0", "Zipf exponent of both domains"},
    KeyInfo{"synth.min_length", "6", "shortest source sentence"},
    KeyInfo{"synth.max_length", "14", "longest source sentence"},
    KeyInfo{"synth.noise_mix", "1,0,0", "weights of misalign, shuffle, truncate"},
    KeyInfo{"synth.mono_size", "5000", "in-domain monolingual sentences"},
    KeyInfo{"synth.trusted_size", "2000", "trusted pairs"},
    KeyInfo{"synth.heldout_size", "1000", "held-out trusted pairs"},
};


std::int64_t half_life(const RunConfig& rc, std::string_view key, std::int64_t scaled) {
  const auto& v = rc.get(key);
  if (v == "auto") return scaled;
  return rc.get_int(key);
}

template <class T>
T checked_count(long long v, std::string_view key) {
  if (v < 0) throw Error(std::string(key) + " must be >= 0");
  return static_cast<T>(v);
}

}  // namespace

std::span<const KeyInfo> known_keys() { return kKeys; }

RunConfig::RunConfig() {
  for (const auto& k : kKeys) values_.emplace(std::string(k.key), std::string(k.default_value));
}

void RunConfig::set(std::string_view key, std::string_view value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error("unknown config key '" + std::string(key) + "'");
  it->second = std::string(text::trim(value));
}

void RunConfig::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw Error("expected key=value, got '" + std::string(assignment) + "'");
  set(text::trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void RunConfig::merge_file(const std::filesystem::path& path) {
  const auto lines = text::read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    try {
      set_assignment(line);
    } catch (const Error& e) {
      throw Error(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
}

const std::string& RunConfig::get(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error("unknown config key '" + std::string(key) + "'");
  return it->second;
}

long long RunConfig::get_int(std::string_view key) const {
  try {
    return text::parse_int(get(key));
  } catch (const Error& e) {
    throw Error(std::string(key) + ": " + e.what());
  }
}

double RunConfig::get_double(std::string_view key) const {
  try {
    return text::parse_double(get(key));
  } catch (const Error& e) {
    throw Error(std::string(key) + ": " + e.what());
  }
}

bool RunConfig::get_bool(std::string_view key) const {
  try {
    return text::parse_bool(get(key));
  } catch (const Error& e) {
    throw Error(std::string(key) + ": " + e.what());
  }
}

std::vector<double> RunConfig::get_doubles(std::string_view key) const {
  std::vector<double> out;
  for (auto part : text::split(get(key), ',')) {
    part = text::trim(part);
    if (part.empty()) continue;
    try {
      out.push_back(text::parse_double(part));
    } catch (const Error& e) {
      throw Error(std::string(key) + ": " + e.what());
    }
  }
  return out;
}

std::string RunConfig::resolved() const {
  std::string out;
  for (const auto& k : kKeys) out += std::string(k.key) + " = " + get(k.key) + '\n';
  return out;
}

LoadOptions load_options(const RunConfig& rc) {
  LoadOptions o;
  o.tokenize.lowercase = rc.get_bool("data.lowercase");
  o.max_length = checked_count<std::size_t>(rc.get_int("data.max_length"), "data.max_length");
  return o;
}

sched::CurriculumConfig curriculum_config(const RunConfig& rc) {
  const auto max_steps = rc.get_int("curriculum.max_steps");
  if (max_steps < 0) throw Error("curriculum.max_steps must be >= 0");
  auto c = sched::scaled_config(max_steps);
  c.kind = sched::parse_kind(rc.get("curriculum.kind"));
  c.lambda = {half_life(rc, "pace.lambda_half_life", c.lambda.half_life), rc.get_double("pace.lambda_floor")};
  c.beta = {half_life(rc, "pace.beta_half_life", c.beta.half_life), rc.get_double("pace.beta_floor")};
  c.gamma = {half_life(rc, "pace.gamma_half_life", c.gamma.half_life), rc.get_double("pace.gamma_floor")};
  c.batch_size = checked_count<std::size_t>(rc.get_int("curriculum.batch_size"), "curriculum.batch_size");
  c.buffer_size = checked_count<std::size_t>(rc.get_int("curriculum.buffer_size"), "curriculum.buffer_size");
  c.refill_fraction = rc.get_double("curriculum.refill_fraction");
  c.full_dataset = rc.get_bool("curriculum.full_dataset");
  c.z_normalize = rc.get_bool("curriculum.z_normalize");
  const auto& nesting = rc.get("curriculum.nesting");
  if (nesting == "denoise_first")
    c.nesting = sched::NestingOrder::denoise_first;
  else if (nesting == "domain_first")
    c.nesting = sched::NestingOrder::domain_first;
  else
    throw Error("curriculum.nesting must be denoise_first or domain_first");
  c.seed = static_cast<std::uint64_t>(rc.get_int("seed"));
  sched::validate(c);
  return c;
}

em::EmConfig em_config(const RunConfig& rc) {
  em::EmConfig c;
  c.curriculum = curriculum_config(rc);
  c.iterations = static_cast<int>(rc.get_int("em.iterations"));
  c.em_steps = rc.get_int("em.steps");
  c.lm.order = static_cast<int>(rc.get_int("lm.order"));
  c.lm.weights = rc.get_doubles("lm.weights");
  c.lm.unigram_alpha = rc.get_double("lm.alpha");
  c.mu = rc.get_double("lm.mu");
  c.vocab_min_count = static_cast<int>(rc.get_int("vocab.min_count"));
  c.tm.em_iterations = static_cast<int>(rc.get_int("tm.iterations"));
  c.tm.epsilon_floor = rc.get_double("tm.epsilon");
  c.finetune.em_iterations = static_cast<int>(rc.get_int("finetune.iterations"));
  c.finetune.blend = rc.get_double("finetune.blend");
  c.finetune.epsilon_floor = c.tm.epsilon_floor;
  em::validate(c);
  return c;
}

synth::SynthConfig synth_config(const RunConfig& rc) {
  synth::SynthConfig c;
  auto count = [&](std::string_view k) { return checked_count<std::size_t>(rc.get_int(k), k); };
  c.n_pairs = count("synth.n_pairs");
  c.indomain_fraction = rc.get_double("synth.indomain_fraction");
  c.noise_fraction = rc.get_double("synth.noise_fraction");
  c.indomain_vocab = count("synth.indomain_vocab");
  c.outdomain_vocab = count("synth.outdomain_vocab");
  c.overlap = rc.get_double("synth.overlap");
  c.head_size = count("synth.head_size");
  c.zipf_exponent = rc.get_double("synth.zipf");
  c.min_length = count("synth.min_length");
  c.max_length = count("synth.max_length");
  const auto mix = rc.get_doubles("synth.noise_mix");
  if (mix.size() != 3) throw Error("synth.noise_mix needs three weights");
  std::copy(mix.begin(), mix.end(), c.noise_mix.begin());
  c.mono_size = count("synth.mono_size");
  c.trusted_size = count("synth.trusted_size");
  c.heldout_size = count("synth.heldout_size");
  c.seed = static_cast<std::uint64_t>(rc.get_int("seed"));
  synth::validate(c);
  return c;
}

std::vector<std::int64_t> checkpoints(const RunConfig& rc) {
  std::vector<std::int64_t> out;
  for (auto part : text::split(rc.get("select.checkpoints"), ',')) {
    part = text::trim(part);
    if (part.empty()) continue;
    const auto t = text::parse_int(part);
    if (t < 0) throw Error("select.checkpoints must be >= 0");
    out.push_back(t);
  }
  return out;
}

}  // namespace cocur::cli
