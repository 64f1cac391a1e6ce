#pragma once

// Flat key = value configuration with typed accessors.

#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "logcor/errors.hpp"

namespace logcor::exp {

class Config {
 public:
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& entries() const { return values_; }

  /// Lines of `key = value`; blank lines and lines starting with '#' are ignored.
  static Config parse(std::istream& in) {
    Config c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw DomainError("config line " + std::to_string(lineno) + ": expected key = value");
      const std::string k = trim(t.substr(0, eq)), v = trim(t.substr(eq + 1));
      if (k.empty()) throw DomainError("config line " + std::to_string(lineno) + ": empty key");
      c.set(k, v);
    }
    return c;
  }

  /// Entries of `other` override ours.
  void merge(const Config& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
  }

  std::string str(const std::string& key) const { return raw(key); }

  long long integer(const std::string& key) const {
    const std::string s = raw(key);
    long long v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw DomainError("config: '" + key + "' is not an integer: " + s);
    return v;
  }

  std::uint64_t u64(const std::string& key) const {
    const std::string s = raw(key);
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
      throw DomainError("config: '" + key + "' is not a non-negative integer: " + s);
    return v;
  }

  double real(const std::string& key) const { return parse_real(key, raw(key)); }

  /// Comma-separated reals.
  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(raw(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
    if (out.empty()) throw DomainError("config: '" + key + "' is an empty list");
    return out;
  }

  std::vector<long long> integers(const std::string& key) const {
    std::vector<long long> out;
    for (double x : reals(key)) {
      if (x != static_cast<double>(static_cast<long long>(x))) throw DomainError("config: '" + key + "' must list integers");
      out.push_back(static_cast<long long>(x));
    }
    return out;
  }

  /// Throws unless every key is in `known`.
  void require_known(const std::set<std::string>& known) const {
    for (const auto& [k, v] : values_)
      if (!known.count(k)) throw DomainError("config: unknown key '" + k + "'");
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  static double parse_real(const std::string& key, const std::string& s) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw DomainError("config: '" + key + "' is not a number: " + s);
  }

  std::string raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw DomainError("config: missing key '" + key + "'");
    return it->second;
  }

  std::map<std::string, std::string> values_;
};

}  // namespace logcor::exp
