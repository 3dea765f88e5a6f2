#include "rgap/cache.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <fstream>

#include "rgap/common.hpp"
#include "rgap/digest.hpp"

namespace rgap {

namespace fs = std::filesystem;

std::string cache_key(const std::string& sample_id, Mode mode, std::uint64_t seed,
                      const std::string& backend_id, const SamplingConfig& sampling,
                      const std::map<std::string, json>& extras) {
    json j;
    j["sample_id"] = sample_id;
    j["mode"] = mode_name(mode);
    j["seed"] = seed;
    j["backend_id"] = backend_id;
    j["sampling"] = sampling.to_json();
    json ex = json::object();
    for (const auto& [k, v] : extras) ex[k] = v;
    j["extras"] = ex;
    return sha256_hex(canonical_json(j));
}

DirectoryLock::DirectoryLock(const fs::path& dir) {
    fs::create_directories(dir);
    lock_file_ = dir / ".lock";
    int fd = ::open(lock_file_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0)
        fail(ErrorKind::Lock, "cache directory already locked by another writer: " + dir.string() +
                                  " (remove " + lock_file_.string() + " if stale)");
    std::string pid = std::to_string(::getpid()) + "\n";
    ssize_t written = ::write(fd, pid.data(), pid.size());
    (void)written;
    ::close(fd);
    held_ = true;
}

DirectoryLock::~DirectoryLock() {
    if (held_) {
        std::error_code ec;
        fs::remove(lock_file_, ec);
    }
}

GenerationCache::GenerationCache(const fs::path& dir) : dir_(dir), blobs_(dir / "blobs") {
    fs::create_directories(dir_ / "records");
}

std::optional<GenerationRecord> GenerationCache::lookup(const std::string& key) const {
    fs::path file = dir_ / "records" / (key + ".json");
    std::ifstream in(file);
    if (!in) return std::nullopt;
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::Corruption, "invalid cached record: " + file.string());
    return record_from_json(j, blobs_);
}

void GenerationCache::store(const std::string& key, const GenerationRecord& record) {
    fs::path file = dir_ / "records" / (key + ".json");
    fs::path tmp = dir_ / "records" / (key + ".tmp");
    {
        std::ofstream out(tmp);
        if (!out) fail(ErrorKind::Config, "cannot write cache record: " + file.string());
        out << canonical_json(record_to_json(record, blobs_)) << "\n";
    }
    fs::rename(tmp, file);
}

}  // namespace rgap
