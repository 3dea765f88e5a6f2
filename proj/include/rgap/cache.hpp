#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "rgap/records.hpp"
#include "rgap/types.hpp"

namespace rgap {

// Deterministic, collision-resistant key for one logical generation. All
// inputs are canonicalized (sorted keys, shortest round-trip floats) before
// hashing, so identical logical runs map to identical keys on any platform.
std::string cache_key(const std::string& sample_id, Mode mode, std::uint64_t seed,
                      const std::string& backend_id, const SamplingConfig& sampling,
                      const std::map<std::string, json>& extras = {});

// Advisory single-writer lock on a cache directory. Readers never take it.
class DirectoryLock {
  public:
    explicit DirectoryLock(const std::filesystem::path& dir);
    ~DirectoryLock();

    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

  private:
    std::filesystem::path lock_file_;
    bool held_ = false;
};

// Content-addressed store of generation records, one JSON file per cache key
// plus a shared blob directory. Records are append-only.
class GenerationCache {
  public:
    explicit GenerationCache(const std::filesystem::path& dir);

    std::optional<GenerationRecord> lookup(const std::string& key) const;
    void store(const std::string& key, const GenerationRecord& record);

    const std::filesystem::path& dir() const { return dir_; }
    BlobStore& blobs() { return blobs_; }

  private:
    std::filesystem::path dir_;
    BlobStore blobs_;
};

}  // namespace rgap
