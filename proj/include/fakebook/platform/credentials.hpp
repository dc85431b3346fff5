#pragma once

#include <string>
#include <string_view>

namespace fakebook::credentials {

inline constexpr int kDefaultIterations = 100'000;

/// PBKDF2-HMAC-SHA256 with a random 16-byte salt, encoded as
/// "pbkdf2-sha256$<iterations>$<salt hex>$<hash hex>".
std::string hash_password(std::string_view password, int iterations = kDefaultIterations);

/// Constant-time comparison against a hash_password() string. Malformed or
/// empty hashes never verify.
bool verify_password(std::string_view password, std::string_view encoded) noexcept;

/// 32 random bytes as hex.
std::string random_token();

/// SHA-256 hex digest; sessions are looked up by the digest of their token.
std::string token_digest(std::string_view token);

}  // namespace fakebook::credentials
