#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>

#include "tensionlab/hash.hpp"
#include "tensionlab/io.hpp"
#include "tensionlab/version.hpp"

namespace tensionlab {

// Resolution order: explicit argument, TENSIONLAB_CACHE, default directory.
inline std::filesystem::path cache_directory(const std::string& configured = "") {
  if (!configured.empty()) return configured;
  if (const char* env = std::getenv("TENSIONLAB_CACHE"); env && *env) return env;
  return ".tensionlab-cache";
}

// Key = content hash of the canonical (sorted-key) config serialization plus
// the tool version, so a version bump invalidates every entry.
inline std::string cache_key(const json& canonical_config) {
  const std::string text = canonical_config.dump();
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(text, fnv1a(kToolVersion))));
  return buf;
}

inline std::optional<json> cache_lookup(const std::filesystem::path& dir, const std::string& key) {
  const std::filesystem::path file = dir / (key + ".json");
  if (!std::filesystem::exists(file)) return std::nullopt;
  try {
    json entry = json::parse(read_text(file));
    if (entry.at("tool_version").get<std::string>() != kToolVersion) return std::nullopt;
    return entry.at("payload");
  } catch (const std::exception& e) {
    std::fprintf(stderr, "warning: corrupt cache entry %s (%s), treating as miss\n",
                 file.string().c_str(), e.what());
    return std::nullopt;
  }
}

inline void cache_store(const std::filesystem::path& dir, const std::string& key,
                        const json& payload) {
  std::filesystem::create_directories(dir);
  json entry{{"tool_version", kToolVersion}, {"payload", payload}};
  write_text_atomic(dir / (key + ".json"), entry.dump(2) + "\n");
}

}  // namespace tensionlab
