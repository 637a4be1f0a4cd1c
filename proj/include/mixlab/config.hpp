/* Copyright 2026 The mixlab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "mixlab/harness.hpp"

namespace mixlab {

/// Flat view of a config file: "section.key" -> (raw value, source line).
struct ConfigEntries {
  struct Value {
    std::string text;
    int line = 0;
  };
  std::map<std::string, Value> values;
};

/// INI-like text: `[section]` headers, `key = value` lines, `#` or `;` comments.
/// Lists are comma separated. Throws ConfigError with the offending line.
ConfigEntries parse_ini(const std::string& text);

/// JSON object of sections, e.g. {"loss": {"name": "square"}, "grid": {"n": [100]}}.
ConfigEntries parse_json_config(const std::string& text);

/// Builds and validates an experiment. Required: grid.n, loss.name,
/// construction.y1, construction.ytilde1 and one of construction.gamma / .c0.
/// Unknown keys are rejected.
ExperimentConfig config_from_entries(const ConfigEntries& entries);

/// Dispatches on the extension (.json, anything else is INI).
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text, bool json);

/// Canonical key=value rendering of every field that affects results
/// (everything except the worker count).
std::string canonical_form(const ExperimentConfig& config);

/// FNV-1a 64 of canonical_form, as 16 hex digits.
std::string semantic_hash(const ExperimentConfig& config);

}  // namespace mixlab
