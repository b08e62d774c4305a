#pragma once

// Persistent JSON-lines cache of exact values.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hodgekit/errors.hpp"
#include "hodgekit/rational.hpp"

namespace hodgekit {

inline constexpr const char* kToolVersion = "0.1.0";

struct CacheRecord {
  std::string kind;  ///< correlator | hodge | hurwitz | dh
  std::string key;
  Rational value;
  std::string tool_version = kToolVersion;

  bool operator==(const CacheRecord&) const = default;
};

inline bool valid_cache_kind(const std::string& kind) {
  return kind == "correlator" || kind == "hodge" || kind == "hurwitz" || kind == "dh";
}

inline nlohmann::json cache_record_json(const CacheRecord& r) {
  return {{"key", r.key}, {"kind", r.kind}, {"tool_version", r.tool_version}, {"value", to_string(r.value)}};
}

inline void write_cache_records(std::ostream& out, const std::vector<CacheRecord>& records) {
  for (const auto& r : records) out << cache_record_json(r).dump() << '\n';
}

/// Every line must be a complete record; anything else is reported with its
/// 1-based line number.
inline std::vector<CacheRecord> read_cache_records(std::istream& in) {
  std::vector<CacheRecord> out;
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t line = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line;
    const std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) throw CacheIntegrity(line, "truncated line (no terminating newline)");
    const std::string body = text.substr(pos, end - pos);
    pos = end + 1;
    try {
      const auto j = nlohmann::json::parse(body);
      if (!j.is_object() || j.size() != 4) throw CacheIntegrity(line, "expected an object with 4 fields");
      CacheRecord r{j.at("kind").get<std::string>(), j.at("key").get<std::string>(),
                    parse_canonical_rational(j.at("value").get<std::string>()), j.at("tool_version").get<std::string>()};
      if (!valid_cache_kind(r.kind)) throw CacheIntegrity(line, "unknown kind '" + r.kind + "'");
      if (r.key.empty()) throw CacheIntegrity(line, "empty key");
      out.push_back(std::move(r));
    } catch (const CacheIntegrity&) {
      throw;
    } catch (const std::exception& e) {
      throw CacheIntegrity(line, e.what());
    }
  }
  return out;
}

/// Write to a sibling temporary file, then rename over the target.
inline void write_cache_file(const std::filesystem::path& path, const std::vector<CacheRecord>& records) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write cache file " + tmp.string());
    write_cache_records(out, records);
    out.flush();
    if (!out) throw InvalidInput("cannot write cache file " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::vector<CacheRecord> read_cache_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read cache file " + path.string());
  return read_cache_records(in);
}

inline std::vector<CacheRecord> cache_roundtrip(const std::filesystem::path& path, const std::vector<CacheRecord>& records) {
  write_cache_file(path, records);
  return read_cache_file(path);
}

/// In-memory view keyed by (kind, key). Conflicting values are integrity errors.
class Cache {
 public:
  Cache() = default;

  static Cache open(const std::filesystem::path& path) {
    Cache c;
    c.path_ = path;
    if (std::filesystem::exists(path)) {
      for (auto& r : read_cache_file(path)) c.put(r.kind, r.key, r.value);
      c.dirty_ = false;
    }
    return c;
  }

  std::optional<Rational> get(const std::string& kind, const std::string& key) const {
    auto it = values_.find({kind, key});
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  void put(const std::string& kind, const std::string& key, const Rational& value) {
    if (!valid_cache_kind(kind)) throw InvalidInput("unknown cache kind '" + kind + "'");
    auto [it, inserted] = values_.try_emplace({kind, key}, value);
    if (!inserted && it->second != value) {
      throw IntegrityError("cache value for " + kind + " " + key + " disagrees with the computed value");
    }
    dirty_ = dirty_ || inserted;
  }

  std::vector<CacheRecord> records() const {
    std::vector<CacheRecord> out;
    for (const auto& [k, v] : values_) out.push_back({k.first, k.second, v, kToolVersion});
    return out;
  }

  std::size_t size() const { return values_.size(); }

  void save() {
    if (path_ && dirty_) write_cache_file(*path_, records());
    dirty_ = false;
  }

 private:
  std::optional<std::filesystem::path> path_;
  std::map<std::pair<std::string, std::string>, Rational> values_;
  bool dirty_ = false;
};

}  // namespace hodgekit
