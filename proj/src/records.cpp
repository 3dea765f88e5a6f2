#include "rgap/records.hpp"

#include <atomic>
#include <cstring>
#include <fstream>

#include "rgap/common.hpp"
#include "rgap/digest.hpp"

namespace rgap {

namespace fs = std::filesystem;

namespace {

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void append_i32(std::vector<std::uint8_t>& out, std::int32_t v) {
    append_u32(out, static_cast<std::uint32_t>(v));
}

void append_f64(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xff));
}

std::uint32_t read_u32(const std::vector<std::uint8_t>& in, std::size_t& pos) {
    if (pos + 4 > in.size()) fail(ErrorKind::Corruption, "blob truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[pos + i]) << (8 * i);
    pos += 4;
    return v;
}

double read_f64(const std::vector<std::uint8_t>& in, std::size_t& pos) {
    if (pos + 8 > in.size()) fail(ErrorKind::Corruption, "blob truncated");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(in[pos + i]) << (8 * i);
    pos += 8;
    double v = 0;
    std::memcpy(&v, &bits, 8);
    return v;
}

const json& require_field(const json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end()) fail(ErrorKind::Schema, std::string("record missing field '") + field + "'");
    return *it;
}

void check_topk_sorted(const TopkMatrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 1; c < m.width; ++c) {
            if (m.at(r, c).logprob > m.at(r, c - 1).logprob)
                fail(ErrorKind::Schema,
                     "topk row " + std::to_string(r) + " not sorted descending by probability");
        }
    }
}

}  // namespace

BlobStore::BlobStore(fs::path dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
}

std::string BlobStore::put(const std::vector<std::uint8_t>& bytes) {
    static std::atomic<std::uint64_t> tmp_counter{0};
    std::string digest = sha256_hex(bytes);
    fs::path target = dir_ / digest;
    if (!fs::exists(target)) {
        // Unique temp name: concurrent writers of the same blob both succeed
        // and the rename is idempotent (identical content).
        fs::path tmp = dir_ / (digest + ".tmp" + std::to_string(tmp_counter.fetch_add(1)));
        std::ofstream out(tmp, std::ios::binary);
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        out.close();
        fs::rename(tmp, target);
    }
    return digest;
}

std::vector<std::uint8_t> BlobStore::get(const std::string& digest) const {
    fs::path source = dir_ / digest;
    std::ifstream in(source, std::ios::binary);
    if (!in) fail(ErrorKind::Corruption, "missing blob " + digest);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (sha256_hex(bytes) != digest)
        fail(ErrorKind::Corruption, "blob digest mismatch for " + digest);
    return bytes;
}

bool BlobStore::contains(const std::string& digest) const {
    return fs::exists(dir_ / digest);
}

std::vector<std::uint8_t> encode_topk(const TopkMatrix& matrix) {
    std::vector<std::uint8_t> out;
    out.reserve(8 + matrix.entries.size() * 12);
    append_u32(out, static_cast<std::uint32_t>(matrix.rows()));
    append_u32(out, static_cast<std::uint32_t>(matrix.width));
    for (const auto& e : matrix.entries) {
        append_i32(out, e.token_id);
        append_f64(out, e.logprob);
    }
    return out;
}

TopkMatrix decode_topk(const std::vector<std::uint8_t>& bytes) {
    std::size_t pos = 0;
    std::uint32_t rows = read_u32(bytes, pos);
    std::uint32_t width = read_u32(bytes, pos);
    TopkMatrix m;
    m.width = width;
    m.entries.resize(static_cast<std::size_t>(rows) * width);
    for (auto& e : m.entries) {
        e.token_id = static_cast<std::int32_t>(read_u32(bytes, pos));
        e.logprob = read_f64(bytes, pos);
    }
    return m;
}

std::vector<std::uint8_t> encode_f64(const std::vector<double>& values) {
    std::vector<std::uint8_t> out;
    out.reserve(4 + values.size() * 8);
    append_u32(out, static_cast<std::uint32_t>(values.size()));
    for (double v : values) append_f64(out, v);
    return out;
}

std::vector<double> decode_f64(const std::vector<std::uint8_t>& bytes) {
    std::size_t pos = 0;
    std::uint32_t n = read_u32(bytes, pos);
    std::vector<double> values(n);
    for (auto& v : values) v = read_f64(bytes, pos);
    return values;
}

json record_to_json(const GenerationRecord& record, BlobStore& blobs) {
    json j;
    j["sample_id"] = record.sample_id;
    j["mode"] = mode_name(record.mode);
    j["seed"] = record.seed;
    j["trace"] = record.trace;
    j["response"] = record.response;
    j["trace_token_count"] = record.trace_token_count;
    j["finish_reason"] = finish_reason_name(record.finish_reason);
    j["backend_id"] = record.backend_id;
    if (record.topk_logprobs) {
        check_topk_sorted(*record.topk_logprobs);
        j["topk_logprobs"] = {{"blob", blobs.put(encode_topk(*record.topk_logprobs))},
                              {"rows", record.topk_logprobs->rows()},
                              {"width", record.topk_logprobs->width}};
    }
    if (record.prompt_token_logprobs) {
        j["prompt_token_logprobs"] = {{"blob", blobs.put(encode_f64(*record.prompt_token_logprobs))},
                                      {"count", record.prompt_token_logprobs->size()}};
    }
    if (record.final_hidden_state) {
        j["final_hidden_state"] = {{"blob", blobs.put(encode_f64(*record.final_hidden_state))},
                                   {"dim", record.final_hidden_state->size()}};
    }
    return j;
}

GenerationRecord record_from_json(const json& j, const BlobStore& blobs) {
    GenerationRecord r;
    r.sample_id = require_field(j, "sample_id").get<std::string>();
    r.mode = mode_from_name(require_field(j, "mode").get<std::string>());
    r.seed = require_field(j, "seed").get<std::uint64_t>();
    r.trace = require_field(j, "trace").get<std::string>();
    r.response = require_field(j, "response").get<std::string>();
    r.trace_token_count = require_field(j, "trace_token_count").get<std::int64_t>();
    r.finish_reason = finish_reason_from_name(require_field(j, "finish_reason").get<std::string>());
    r.backend_id = require_field(j, "backend_id").get<std::string>();
    if (j.contains("topk_logprobs")) {
        const auto& meta = j.at("topk_logprobs");
        TopkMatrix m = decode_topk(blobs.get(meta.at("blob").get<std::string>()));
        if (m.rows() != meta.at("rows").get<std::size_t>() ||
            m.width != meta.at("width").get<std::size_t>())
            fail(ErrorKind::Corruption, "topk blob shape mismatch for record " + r.sample_id);
        check_topk_sorted(m);
        r.topk_logprobs = std::move(m);
    }
    if (j.contains("prompt_token_logprobs")) {
        const auto& meta = j.at("prompt_token_logprobs");
        auto values = decode_f64(blobs.get(meta.at("blob").get<std::string>()));
        if (values.size() != meta.at("count").get<std::size_t>())
            fail(ErrorKind::Corruption, "prompt logprob blob length mismatch for record " + r.sample_id);
        r.prompt_token_logprobs = std::move(values);
    }
    if (j.contains("final_hidden_state")) {
        const auto& meta = j.at("final_hidden_state");
        auto values = decode_f64(blobs.get(meta.at("blob").get<std::string>()));
        if (values.size() != meta.at("dim").get<std::size_t>())
            fail(ErrorKind::Corruption, "hidden-state blob length mismatch for record " + r.sample_id);
        r.final_hidden_state = std::move(values);
    }
    return r;
}

void save_records(const fs::path& file, const std::vector<GenerationRecord>& records,
                  BlobStore& blobs) {
    fs::create_directories(file.parent_path().empty() ? fs::path(".") : file.parent_path());
    std::ofstream out(file);
    if (!out) fail(ErrorKind::Config, "cannot write record file: " + file.string());
    for (const auto& r : records) out << canonical_json(record_to_json(r, blobs)) << "\n";
}

std::vector<GenerationRecord> load_records(const fs::path& file, const BlobStore& blobs) {
    std::ifstream in(file);
    if (!in) fail(ErrorKind::Upstream, "missing record file: " + file.string());
    std::vector<GenerationRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            fail(ErrorKind::Schema, file.string() + ":" + std::to_string(line_no) + ": invalid JSON");
        records.push_back(record_from_json(j, blobs));
    }
    return records;
}

void save_manifest(const fs::path& file, const RunManifest& manifest) {
    std::ofstream out(file);
    if (!out) fail(ErrorKind::Config, "cannot write manifest: " + file.string());
    out << manifest.to_json().dump(2) << "\n";
}

RunManifest load_manifest(const fs::path& file) {
    std::ifstream in(file);
    if (!in) fail(ErrorKind::Upstream, "missing manifest: " + file.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::Schema, "invalid manifest JSON: " + file.string());
    return RunManifest::from_json(j);
}

}  // namespace rgap
