#pragma once

// Strict reader for JSON config documents: every key must be consumed,
// anything left over is reported as unknown.

#include <set>
#include <string>

#include "json.hpp"
#include "uhinet/errors.hpp"

namespace uhinet {

class ConfigReader {
 public:
  ConfigReader(const nlohmann::json& j, std::string context) : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) throw ConfigError(context_ + ": expected a JSON object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  // Leaves `out` untouched when the key is absent.
  template <typename T>
  void get(const std::string& key, T& out) {
    used_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(context_ + ": bad value for '" + key + "': " + j_.at(key).dump());
    }
  }

  const nlohmann::json* child(const std::string& key) {
    used_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) throw ConfigError(context_ + ": unknown key '" + key + "'");
    }
  }

 private:
  const nlohmann::json& j_;
  std::string context_;
  std::set<std::string> used_;
};

}  // namespace uhinet
