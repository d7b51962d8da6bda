#pragma once

// Rank cache shared by the homology engines.  Entries are keyed by strings
// of the form "<kind> <n> <w> <class>".  When a directory is configured, the
// cache is mirrored to one append-only file per (algebra, convention).

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>

namespace khh {

inline uint64_t fnv1a(std::string_view s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

/// Directory named by KHH_CACHE_DIR, or empty.
inline std::string cache_dir_from_env() {
  const char* d = std::getenv("KHH_CACHE_DIR");
  return d ? std::string(d) : std::string();
}

class RankCache {
 public:
  RankCache() = default;

  /// Binds the cache to <dir>/<tag>-<hash>.ranks and loads existing entries.
  /// Lines that do not parse are ignored.
  RankCache(const std::string& dir, const std::string& tag, std::string_view identity) {
    if (dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ostringstream name;
    name << tag << "-" << std::hex << std::setw(16) << std::setfill('0') << fnv1a(identity) << ".ranks";
    path_ = (std::filesystem::path(dir) / name.str()).string();
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      auto tab = line.rfind('\t');
      if (tab == std::string::npos) continue;
      try {
        map_[line.substr(0, tab)] = std::stoull(line.substr(tab + 1));
      } catch (...) {
      }
    }
  }

  std::optional<std::size_t> get(const std::string& key) const {
    std::lock_guard<std::mutex> lk(m_);
    auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  void put(const std::string& key, std::size_t value) {
    std::lock_guard<std::mutex> lk(m_);
    if (!map_.emplace(key, value).second) return;
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::app);
    out << key << '\t' << value << '\n';
  }

  bool persistent() const { return !path_.empty(); }

 private:
  mutable std::mutex m_;
  std::unordered_map<std::string, std::size_t> map_;
  std::string path_;
};

}  // namespace khh
