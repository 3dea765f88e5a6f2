#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rgap/types.hpp"

namespace rgap {

// Digest-addressed binary sidecars for the large optional signal arrays.
// Record files stay line-delimited JSON and human-inspectable; each blob is
// stored once under blobs/<sha256> and verified against its digest on load.
class BlobStore {
  public:
    explicit BlobStore(std::filesystem::path dir);

    std::string put(const std::vector<std::uint8_t>& bytes);
    std::vector<std::uint8_t> get(const std::string& digest) const;
    bool contains(const std::string& digest) const;
    const std::filesystem::path& dir() const { return dir_; }

  private:
    std::filesystem::path dir_;
};

// Binary encodings (little-endian, fixed-width) for the sidecar payloads.
std::vector<std::uint8_t> encode_topk(const TopkMatrix& matrix);
TopkMatrix decode_topk(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_f64(const std::vector<double>& values);
std::vector<double> decode_f64(const std::vector<std::uint8_t>& bytes);

json record_to_json(const GenerationRecord& record, BlobStore& blobs);
GenerationRecord record_from_json(const json& j, const BlobStore& blobs);

// One record per line, UTF-8. Signals go through the blob store.
void save_records(const std::filesystem::path& file, const std::vector<GenerationRecord>& records,
                  BlobStore& blobs);
std::vector<GenerationRecord> load_records(const std::filesystem::path& file, const BlobStore& blobs);

void save_manifest(const std::filesystem::path& file, const RunManifest& manifest);
RunManifest load_manifest(const std::filesystem::path& file);

}  // namespace rgap
