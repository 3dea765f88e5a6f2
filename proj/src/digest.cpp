#include "rgap/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstring>
#include <stdexcept>

namespace rgap {

namespace {

std::array<std::uint8_t, 32> sha256_raw(const void* data, std::size_t size) {
    std::array<std::uint8_t, 32> out{};
    unsigned int out_len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr) throw std::runtime_error("EVP_MD_CTX_new failed");
    bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
              EVP_DigestUpdate(ctx, data, size) == 1 &&
              EVP_DigestFinal_ex(ctx, out.data(), &out_len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok || out_len != out.size()) throw std::runtime_error("SHA-256 computation failed");
    return out;
}

std::string to_hex(const std::uint8_t* bytes, std::size_t n) {
    static const char* digits = "0123456789abcdef";
    std::string hex;
    hex.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
        hex.push_back(digits[bytes[i] >> 4]);
        hex.push_back(digits[bytes[i] & 0x0f]);
    }
    return hex;
}

}  // namespace

std::string sha256_hex(const void* data, std::size_t size) {
    auto raw = sha256_raw(data, size);
    return to_hex(raw.data(), raw.size());
}

std::string sha256_hex(const std::string& data) {
    return sha256_hex(data.data(), data.size());
}

std::string sha256_hex(const std::vector<std::uint8_t>& data) {
    return sha256_hex(data.data(), data.size());
}

std::vector<double> digest_expand_unit(const std::string& seed, std::size_t count) {
    std::vector<double> values;
    values.reserve(count);
    std::uint64_t block = 0;
    std::array<std::uint8_t, 32> raw{};
    std::size_t offset = raw.size();  // force a refill on first use
    while (values.size() < count) {
        if (offset + 8 > raw.size()) {
            std::string block_seed = seed + "#" + std::to_string(block++);
            raw = [&] {
                auto hex_input = block_seed;
                std::array<std::uint8_t, 32> r{};
                unsigned int len = 0;
                EVP_MD_CTX* ctx = EVP_MD_CTX_new();
                EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
                EVP_DigestUpdate(ctx, hex_input.data(), hex_input.size());
                EVP_DigestFinal_ex(ctx, r.data(), &len);
                EVP_MD_CTX_free(ctx);
                return r;
            }();
            offset = 0;
        }
        std::uint64_t word = 0;
        std::memcpy(&word, raw.data() + offset, 8);
        offset += 8;
        // 53 mantissa bits -> uniform in [0,1), mapped to [-1,1].
        double unit = static_cast<double>(word >> 11) * (1.0 / 9007199254740992.0);
        values.push_back(unit * 2.0 - 1.0);
    }
    return values;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

}  // namespace rgap
