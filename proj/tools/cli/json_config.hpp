/**
 * json_config.hpp — CLI11 config formatter reading JSON.
 *
 * Top-level keys set options of the main app; a nested object sets the
 * options of the subcommand with that name:
 *
 *   { "threads": 4, "lhv": { "model": "threshold", "d": 1.0, "shots": 1000000 } }
 *
 * Flags given on the command line win over values from the file.
 */

#pragma once

#include <istream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace bellreal::cli {

class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    nlohmann::ordered_json j;
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& results = opt->results();
        j[name] = results.size() == 1 ? nlohmann::ordered_json(results.front()) : nlohmann::ordered_json(results);
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      const std::string nested = to_config(sub, default_also, false, "");
      if (nested != "{}") j[sub->get_name()] = nlohmann::ordered_json::parse(nested);
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConfigError(std::string("invalid JSON config: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConfigError("JSON config must be an object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void collect(const nlohmann::json& obj, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) {
        auto nested = parents;
        nested.push_back(key);
        collect(value, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& element : value) item.inputs.push_back(scalar(element));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

}  // namespace bellreal::cli
