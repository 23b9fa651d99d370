#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <functional>
#include <string>
#include <string_view>

#include "toolcache/model.hpp"

namespace toolcache {

// SHA-256 of the canonical request string. Equality and ordering only look at
// the digest; debug_form is kept for logs and tests.
struct CacheKey {
    std::array<std::uint8_t, 32> digest{};
    std::string debug_form;

    bool operator==(const CacheKey& o) const noexcept { return digest == o.digest; }
    std::strong_ordering operator<=>(const CacheKey& o) const noexcept { return digest <=> o.digest; }

    std::string hex() const;
};

// Canonical form "tool:{k1=v1,k2=v2}". Maps are sorted by key at every depth,
// lists keep their order, text is NFC-normalized and delimiter characters
// are backslash-escaped. A string that would otherwise read as a number or a
// boolean gets a leading backslash so it never collides with one.
//
// Numbers: integral values below 2^63 in magnitude print as plain integers
// (so 1 and 1.0 agree); everything else uses the shortest round-trip form.
//
// Throws UnsupportedValue for null, binary, non-finite numbers or invalid
// UTF-8, and MalformedRequest for an empty tool name.
std::string canonicalize(std::string_view tool_name, const Params& params);
std::string canonicalize(std::string_view tool_name, const ParamValue& params_object);

CacheKey make_key(std::string_view tool_name, const Params& params);
CacheKey make_key(const ToolCallRequest& r);

// Canonical rendering of a single value, as it appears inside a key.
std::string canonical_value(const ParamValue& v);

// Digest of an arbitrary canonical string; make_key() hashes canonicalize().
CacheKey key_from_canonical(std::string canonical);

// NFC normalization of UTF-8 text; throws UnsupportedValue on invalid input.
std::string normalize_text(std::string_view utf8);

}  // namespace toolcache

template <>
struct std::hash<toolcache::CacheKey> {
    std::size_t operator()(const toolcache::CacheKey& k) const noexcept {
        std::size_t h;
        std::memcpy(&h, k.digest.data(), sizeof h);
        return h;
    }
};
