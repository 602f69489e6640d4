#pragma once

// Ties CLI11 options to keys of a JSON config file so that an explicit flag
// wins over the file, and the file wins over the compiled-in default.

#include "altmin/error.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace altmin::cli {

class ConfigBinder {
 public:
  template <class T>
  CLI::Option* option(CLI::App* app, const std::string& key, T& target, const std::string& help) {
    CLI::Option* opt = app->add_option("--" + key, target, help)->capture_default_str();
    remember(app, key, opt, [&target](const nlohmann::json& j) { target = j.get<T>(); });
    return opt;
  }

  CLI::Option* flag(CLI::App* app, const std::string& key, bool& target, const std::string& help) {
    CLI::Option* opt = app->add_flag("--" + key, target, help);
    remember(app, key, opt, [&target](const nlohmann::json& j) { target = j.get<bool>(); });
    return opt;
  }

  /// A key that can only come from the config file.
  void config_only(CLI::App* app, const std::string& key, nlohmann::json& target) {
    remember(app, key, nullptr, [&target](const nlohmann::json& j) { target = j; });
  }

  /// Applies `config` to the options of `global` and `active` that were not
  /// given on the command line. Top-level keys are shared; an object under
  /// the subcommand's name overrides them for that subcommand.
  void apply(const nlohmann::json& config, CLI::App* global, CLI::App* active) const {
    if (!config.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
    std::set<std::string> known;
    for (const auto& [app, keys] : bindings_) {
      known.insert(app->get_name());
      for (const auto& b : keys) known.insert(b.key);
    }
    nlohmann::json merged = nlohmann::json::object();
    for (const auto& [key, value] : config.items()) {
      if (!known.count(key)) throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
      if (!is_subcommand(key)) merged[key] = value;
    }
    if (config.contains(active->get_name())) {
      const auto& section = config.at(active->get_name());
      if (!section.is_object()) {
        throw Error(ErrorCode::InvalidConfig, "config section '" + active->get_name() + "' must be an object");
      }
      for (const auto& [key, value] : section.items()) {
        if (!bound(active, key) && !bound(global, key)) {
          throw Error(ErrorCode::InvalidConfig,
                      "unknown key '" + key + "' in config section '" + active->get_name() + "'");
        }
        merged[key] = value;
      }
    }
    for (CLI::App* app : {global, active}) {
      auto it = bindings_.find(app);
      if (it == bindings_.end()) continue;
      for (const auto& b : it->second) {
        if (!merged.contains(b.key) || (b.opt && b.opt->count() > 0)) continue;
        try {
          b.set(merged.at(b.key));
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorCode::InvalidConfig, "config key '" + b.key + "': " + e.what());
        }
      }
    }
  }

 private:
  struct Binding {
    std::string key;
    CLI::Option* opt;
    std::function<void(const nlohmann::json&)> set;
  };

  void remember(CLI::App* app, const std::string& key, CLI::Option* opt,
                std::function<void(const nlohmann::json&)> set) {
    bindings_[app].push_back({key, opt, std::move(set)});
  }

  bool bound(CLI::App* app, const std::string& key) const {
    auto it = bindings_.find(app);
    if (it == bindings_.end()) return false;
    for (const auto& b : it->second)
      if (b.key == key) return true;
    return false;
  }

  bool is_subcommand(const std::string& key) const {
    for (const auto& [app, keys] : bindings_)
      if (app->get_parent() != nullptr && app->get_name() == key) return true;
    return false;
  }

  std::map<CLI::App*, std::vector<Binding>> bindings_;
};

}  // namespace altmin::cli
