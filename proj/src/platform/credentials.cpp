#include "fakebook/platform/credentials.hpp"

#include "fakebook/core/error.hpp"
#include "fakebook/core/text.hpp"

#include <array>
#include <vector>

#include <fmt/format.h>
#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

namespace fakebook::credentials {

namespace {

std::string to_hex(const unsigned char* data, std::size_t n) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(kDigits[data[i] >> 4]);
        out.push_back(kDigits[data[i] & 0xF]);
    }
    return out;
}

bool from_hex(std::string_view hex, std::vector<unsigned char>& out) {
    if (hex.size() % 2) return false;
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;
    };
    out.clear();
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        const int hi = nibble(hex[i]), lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) return false;
        out.push_back(static_cast<unsigned char>(hi << 4 | lo));
    }
    return true;
}

std::vector<unsigned char> random_bytes(std::size_t n) {
    std::vector<unsigned char> out(n);
    if (RAND_bytes(out.data(), static_cast<int>(n)) != 1) fail(ErrorCode::internal, "random generator failure");
    return out;
}

bool derive(std::string_view password, const std::vector<unsigned char>& salt, int iterations,
            std::array<unsigned char, 32>& out) {
    return PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()), salt.data(),
                             static_cast<int>(salt.size()), iterations, EVP_sha256(), static_cast<int>(out.size()),
                             out.data()) == 1;
}

}  // namespace

std::string hash_password(std::string_view password, int iterations) {
    if (iterations < 1) fail(ErrorCode::validation, "iteration count must be positive");
    const auto salt = random_bytes(16);
    std::array<unsigned char, 32> key{};
    if (!derive(password, salt, iterations, key)) fail(ErrorCode::internal, "PBKDF2 failure");
    return fmt::format("pbkdf2-sha256${}${}${}", iterations, to_hex(salt.data(), salt.size()),
                       to_hex(key.data(), key.size()));
}

bool verify_password(std::string_view password, std::string_view encoded) noexcept {
    try {
        const auto parts = split(encoded, '$');
        if (parts.size() != 4 || parts[0] != "pbkdf2-sha256") return false;
        const auto iterations = parse_int(parts[1]);
        if (!iterations || *iterations < 1 || *iterations > 10'000'000) return false;
        std::vector<unsigned char> salt, expected;
        if (!from_hex(parts[2], salt) || !from_hex(parts[3], expected) || expected.size() != 32) return false;
        std::array<unsigned char, 32> key{};
        if (!derive(password, salt, static_cast<int>(*iterations), key)) return false;
        return CRYPTO_memcmp(key.data(), expected.data(), key.size()) == 0;
    } catch (...) {
        return false;
    }
}

std::string random_token() {
    const auto bytes = random_bytes(32);
    return to_hex(bytes.data(), bytes.size());
}

std::string token_digest(std::string_view token) {
    std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
    SHA256(reinterpret_cast<const unsigned char*>(token.data()), token.size(), digest.data());
    return to_hex(digest.data(), digest.size());
}

}  // namespace fakebook::credentials
