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

#include "mixlab/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mixlab/errors.hpp"
#include "mixlab/io.hpp"

namespace mixlab {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "experiment.kind",       "experiment.seed",        "experiment.replicates",
      "experiment.workers",    "loss.name",              "loss.lo",
      "loss.hi",               "construction.y1",        "construction.ytilde1",
      "construction.gamma",    "construction.c0",        "construction.experts",
      "grid.n",                "rules.pm",               "rules.pim",
      "rules.erm",             "report.tail_thresholds", "report.epsilons",
      "report.conditional_replicates"};
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

double to_double(const std::string& text, const std::string& field, int line) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError("expected a number, got '" + t + "'", line, field);
  }
  return v;
}

std::int64_t to_int(const std::string& text, const std::string& field, int line) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError("expected an integer, got '" + t + "'", line, field);
  }
  return v;
}

std::uint64_t to_uint(const std::string& text, const std::string& field, int line) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || t[0] == '-' || end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError("expected an unsigned integer, got '" + t + "'", line, field);
  }
  return v;
}

bool to_bool(const std::string& text, const std::string& field, int line) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ConfigError("expected a boolean, got '" + t + "'", line, field);
}

std::string json_scalar(const nlohmann::json& v, const std::string& field) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_float()) return format_double(v.get<double>());
  throw ConfigError("unsupported JSON value", 0, field);
}

}  // namespace

ConfigEntries parse_ini(const std::string& text) {
  ConfigEntries entries;
  std::stringstream ss(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    const auto comment = raw.find_first_of("#;");
    const std::string s = trim(comment == std::string::npos ? raw : raw.substr(0, comment));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section header", line, s);
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError("empty section name", line, s);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line, s);
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw ConfigError("empty key", line, s);
    if (section.empty()) throw ConfigError("key outside of a section", line, key);
    const std::string full = section + "." + key;
    if (entries.values.count(full)) throw ConfigError("duplicate key", line, full);
    entries.values[full] = {trim(s.substr(eq + 1)), line};
  }
  return entries;
}

ConfigEntries parse_json_config(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what(), 0, "");
  }
  if (!doc.is_object()) throw ConfigError("top level must be an object", 0, "");
  ConfigEntries entries;
  for (const auto& [section, body] : doc.items()) {
    if (!body.is_object()) throw ConfigError("section must be an object", 0, section);
    for (const auto& [key, value] : body.items()) {
      const std::string full = section + "." + key;
      std::string rendered;
      if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) {
          if (i) rendered += ", ";
          rendered += json_scalar(value[i], full);
        }
      } else {
        rendered = json_scalar(value, full);
      }
      entries.values[full] = {rendered, 0};
    }
  }
  return entries;
}

ExperimentConfig config_from_entries(const ConfigEntries& entries) {
  for (const auto& [key, value] : entries.values) {
    if (!known_keys().count(key)) throw ConfigError("unknown key", value.line, key);
  }
  auto find = [&](const std::string& key) -> const ConfigEntries::Value* {
    const auto it = entries.values.find(key);
    return it == entries.values.end() ? nullptr : &it->second;
  };
  auto require = [&](const std::string& key) -> const ConfigEntries::Value& {
    const auto* v = find(key);
    if (!v) throw ConfigError("missing required field", 0, key);
    return *v;
  };

  ExperimentConfig config;
  if (const auto* v = find("experiment.kind")) {
    if (v->text == "expectation") {
      config.kind = ExperimentKind::expectation;
    } else if (v->text == "deviation") {
      config.kind = ExperimentKind::deviation;
    } else {
      throw ConfigError("kind must be expectation or deviation", v->line, "experiment.kind");
    }
  }
  if (const auto* v = find("experiment.seed")) config.seed = to_uint(v->text, "experiment.seed", v->line);
  if (const auto* v = find("experiment.replicates")) {
    config.replicates = to_int(v->text, "experiment.replicates", v->line);
  }
  if (const auto* v = find("experiment.workers")) {
    config.workers = static_cast<int>(to_int(v->text, "experiment.workers", v->line));
  }

  {
    const auto& v = require("loss.name");
    try {
      config.loss = parse_loss_kind(v.text);
    } catch (const std::exception&) {
      throw ConfigError("unknown loss '" + v.text + "'", v.line, "loss.name");
    }
  }
  const auto* lo = find("loss.lo");
  const auto* hi = find("loss.hi");
  if (static_cast<bool>(lo) != static_cast<bool>(hi)) {
    throw ConfigError("loss.lo and loss.hi go together", (lo ? lo : hi)->line, lo ? "loss.hi" : "loss.lo");
  }
  if (lo) config.interval = Interval{to_double(lo->text, "loss.lo", lo->line),
                                     to_double(hi->text, "loss.hi", hi->line)};

  {
    const auto& v = require("construction.y1");
    config.y1 = to_double(v.text, "construction.y1", v.line);
  }
  {
    const auto& v = require("construction.ytilde1");
    config.ytilde1 = to_double(v.text, "construction.ytilde1", v.line);
  }
  const auto* gamma = find("construction.gamma");
  const auto* c0 = find("construction.c0");
  if (!gamma && !c0) throw ConfigError("missing required field (gamma or c0)", 0, "construction.gamma");
  if (gamma && c0) throw ConfigError("set gamma or c0, not both", c0->line, "construction.c0");
  if (gamma) config.gamma = to_double(gamma->text, "construction.gamma", gamma->line);
  if (c0) config.c0 = to_double(c0->text, "construction.c0", c0->line);
  if (const auto* v = find("construction.experts")) {
    config.experts = static_cast<int>(to_int(v->text, "construction.experts", v->line));
  }

  {
    const auto& v = require("grid.n");
    for (const auto& item : split_list(v.text)) config.n_grid.push_back(to_int(item, "grid.n", v.line));
    if (config.n_grid.empty()) throw ConfigError("empty n grid", v.line, "grid.n");
  }

  if (const auto* v = find("rules.pm")) config.rules.pm = to_bool(v->text, "rules.pm", v->line);
  if (const auto* v = find("rules.erm")) config.rules.erm = to_bool(v->text, "rules.erm", v->line);
  if (const auto* v = find("rules.pim")) {
    if (v->text == "off" || v->text == "false") {
      config.rules.pim = false;
    } else {
      try {
        config.rules.pim_substitution = parse_substitution(v->text);
      } catch (const std::exception&) {
        throw ConfigError("unknown substitution '" + v->text + "'", v->line, "rules.pim");
      }
    }
  }

  if (const auto* v = find("report.tail_thresholds")) {
    for (const auto& item : split_list(v->text)) {
      config.tail_thresholds.push_back(to_double(item, "report.tail_thresholds", v->line));
    }
  }
  if (const auto* v = find("report.epsilons")) {
    for (const auto& item : split_list(v->text)) {
      config.epsilons.push_back(to_double(item, "report.epsilons", v->line));
    }
  }
  if (const auto* v = find("report.conditional_replicates")) {
    config.conditional_replicates = to_int(v->text, "report.conditional_replicates", v->line);
  }
  validate(config);
  return config;
}

ExperimentConfig parse_config_text(const std::string& text, bool json) {
  return config_from_entries(json ? parse_json_config(text) : parse_ini(text));
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string(), 0, "");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.extension() == ".json");
}

std::string canonical_form(const ExperimentConfig& c) {
  std::ostringstream out;
  auto list = [](const auto& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) s += ",";
      if constexpr (std::is_floating_point_v<std::decay_t<decltype(values[i])>>) {
        s += format_double(values[i]);
      } else {
        s += std::to_string(values[i]);
      }
    }
    return s;
  };
  const LossSpec loss = c.loss_spec();
  out << "kind=" << to_string(c.kind) << "\n"
      << "seed=" << c.seed << "\n"
      << "replicates=" << c.replicates << "\n"
      << "loss=" << to_string(c.loss) << "\n"
      << "lo=" << format_double(loss.interval.lo) << "\n"
      << "hi=" << format_double(loss.interval.hi) << "\n"
      << "y1=" << format_double(c.y1) << "\n"
      << "ytilde1=" << format_double(c.ytilde1) << "\n"
      << "gamma=" << (c.gamma ? format_double(*c.gamma) : "-") << "\n"
      << "c0=" << (c.c0 ? format_double(*c.c0) : "-") << "\n"
      << "experts=" << c.experts << "\n"
      << "n=" << list(c.n_grid) << "\n"
      << "pm=" << c.rules.pm << "\n"
      << "pim=" << (c.rules.pim ? c.rules.pim_substitution.name() : "off") << "\n"
      << "erm=" << c.rules.erm << "\n"
      << "tail_thresholds=" << list(c.tail_thresholds) << "\n"
      << "epsilons=" << list(c.epsilons) << "\n"
      << "conditional_replicates=" << c.conditional_replicates << "\n";
  return out.str();
}

std::string semantic_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_form(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mixlab
