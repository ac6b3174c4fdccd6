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

// Flat `key = value` run configuration.
//
// Every key has a documented default; setting an unknown key is an error.
// Files use one assignment per line, `#` starts a comment. Later sources
// override earlier ones, so repeated --config files merge left to right and
// --set overrides everything.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cocur/corpus.hpp"
#include "cocur/em_opt.hpp"
#include "cocur/schedule.hpp"
#include "cocur/synth.hpp"

namespace cocur::cli {

struct KeyInfo {
  std::string_view key;
  std::string_view default_value;
  std::string_view help;
};

// All recognised keys in documentation order.
std::span<const KeyInfo> known_keys();

class RunConfig {
 public:
  RunConfig();  // all defaults

  void set(std::string_view key, std::string_view value);
  // "key=value"
  void set_assignment(std::string_view assignment);
  void merge_file(const std::filesystem::path& path);

  const std::string& get(std::string_view key) const;
  long long get_int(std::string_view key) const;
  double get_double(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  std::vector<double> get_doubles(std::string_view key) const;

  // One `key = value` line per key, in documentation order.
  std::string resolved() const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

LoadOptions load_options(const RunConfig& rc);
sched::CurriculumConfig curriculum_config(const RunConfig& rc);
em::EmConfig em_config(const RunConfig& rc);
synth::SynthConfig synth_config(const RunConfig& rc);
// Steps at which `select` writes full-dataset selections.
std::vector<std::int64_t> checkpoints(const RunConfig& rc);

}  // namespace cocur::cli
