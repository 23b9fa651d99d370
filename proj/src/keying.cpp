#include "toolcache/keying.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <openssl/evp.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "toolcache/errors.hpp"

namespace toolcache {

namespace {

bool valid_utf8(std::string_view s) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(s.data());
    const auto len = static_cast<std::int32_t>(s.size());
    std::int32_t i = 0;
    while (i < len) {
        UChar32 c;
        U8_NEXT(p, i, len, c);
        if (c < 0) return false;
    }
    return true;
}

bool is_delimiter(char c) {
    switch (c) {
        case '\\': case ',': case '=': case '{': case '}': case '[': case ']': case ':':
            return true;
        default:
            return false;
    }
}

bool reads_as_literal(std::string_view s) {
    if (s == "true" || s == "false") return true;
    if (s.empty()) return false;
    double d;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

void append_escaped(std::string& out, std::string_view raw) {
    const std::string text = normalize_text(raw);
    if (reads_as_literal(text)) out.push_back('\\');
    for (char c : text) {
        if (is_delimiter(c)) out.push_back('\\');
        out.push_back(c);
    }
}

void append_number(std::string& out, const ParamValue& v) {
    char buf[64];
    std::to_chars_result res{};
    if (v.is_number_unsigned()) {
        res = std::to_chars(buf, buf + sizeof buf, v.get<std::uint64_t>());
    } else if (v.is_number_integer()) {
        res = std::to_chars(buf, buf + sizeof buf, v.get<std::int64_t>());
    } else {
        double d = v.get<double>();
        if (!std::isfinite(d)) throw UnsupportedValue("non-finite number in parameters");
        constexpr double two63 = 9223372036854775808.0;
        if (d == std::trunc(d) && std::fabs(d) < two63) {
            res = std::to_chars(buf, buf + sizeof buf, static_cast<std::int64_t>(d));
        } else {
            res = std::to_chars(buf, buf + sizeof buf, d);
        }
    }
    out.append(buf, res.ptr);
}

void append_value(std::string& out, const ParamValue& v);

void append_map(std::string& out, std::vector<std::pair<std::string, const ParamValue*>> items) {
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < items.size(); ++i) {
        if (items[i].first == items[i - 1].first)
            throw UnsupportedValue("duplicate parameter name after normalization: " + items[i].first);
    }
    out.push_back('{');
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out.push_back(',');
        append_escaped(out, items[i].first);
        out.push_back('=');
        append_value(out, *items[i].second);
    }
    out.push_back('}');
}

void append_value(std::string& out, const ParamValue& v) {
    switch (v.type()) {
        case ParamValue::value_t::object: {
            std::vector<std::pair<std::string, const ParamValue*>> items;
            items.reserve(v.size());
            for (const auto& [k, child] : v.items()) items.emplace_back(normalize_text(k), &child);
            append_map(out, std::move(items));
            break;
        }
        case ParamValue::value_t::array: {
            out.push_back('[');
            bool first = true;
            for (const auto& child : v) {
                if (!first) out.push_back(',');
                first = false;
                append_value(out, child);
            }
            out.push_back(']');
            break;
        }
        case ParamValue::value_t::string:
            append_escaped(out, v.get_ref<const std::string&>());
            break;
        case ParamValue::value_t::boolean:
            out += v.get<bool>() ? "true" : "false";
            break;
        case ParamValue::value_t::number_integer:
        case ParamValue::value_t::number_unsigned:
        case ParamValue::value_t::number_float:
            append_number(out, v);
            break;
        case ParamValue::value_t::null:
            throw UnsupportedValue("null parameter value");
        default:
            throw UnsupportedValue("unsupported parameter value type");
    }
}

std::string canonical_prefix(std::string_view tool_name) {
    if (tool_name.empty()) throw MalformedRequest("tool_name");
    std::string out;
    append_escaped(out, tool_name);
    out.push_back(':');
    return out;
}

}  // namespace

std::string normalize_text(std::string_view utf8) {
    if (!valid_utf8(utf8)) throw UnsupportedValue("invalid UTF-8 in parameters");
    // Pure ASCII is already NFC.
    if (std::all_of(utf8.begin(), utf8.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; }))
        return std::string(utf8);
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw UnsupportedValue("unicode normalizer unavailable");
    icu::UnicodeString src = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    icu::UnicodeString dst = nfc->normalize(src, status);
    if (U_FAILURE(status)) throw UnsupportedValue("unicode normalization failed");
    std::string out;
    dst.toUTF8String(out);
    return out;
}

std::string canonicalize(std::string_view tool_name, const Params& params) {
    std::string out = canonical_prefix(tool_name);
    std::vector<std::pair<std::string, const ParamValue*>> items;
    items.reserve(params.size());
    for (const auto& p : params) items.emplace_back(normalize_text(p.name), &p.value);
    append_map(out, std::move(items));
    return out;
}

std::string canonicalize(std::string_view tool_name, const ParamValue& params_object) {
    if (!params_object.is_object()) throw UnsupportedValue("parameters must be a map");
    std::string out = canonical_prefix(tool_name);
    append_value(out, params_object);
    return out;
}

std::string canonical_value(const ParamValue& v) {
    std::string out;
    append_value(out, v);
    return out;
}

CacheKey key_from_canonical(std::string canonical) {
    CacheKey key;
    unsigned int len = 0;
    if (EVP_Digest(canonical.data(), canonical.size(), key.digest.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != key.digest.size())
        throw Error("sha256 digest failed");
    key.debug_form = std::move(canonical);
    return key;
}

CacheKey make_key(std::string_view tool_name, const Params& params) {
    return key_from_canonical(canonicalize(tool_name, params));
}

CacheKey make_key(const ToolCallRequest& r) { return make_key(r.tool_name, r.params); }

std::string CacheKey::hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(digest.size() * 2);
    for (auto b : digest) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

}  // namespace toolcache
