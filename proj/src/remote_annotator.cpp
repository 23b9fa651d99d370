#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <thread>

#include "httplib.h"
#include "toolcache/annotator.hpp"
#include "toolcache/errors.hpp"
#include "toolcache/keying.hpp"

namespace toolcache {

namespace {

constexpr const char* kSchema =
    R"({"request_type": "INFORMATIONAL" | "COMMAND", "parameter_category": string | null, "ttl_seconds": number})";

void replace_all(std::string& s, std::string_view from, const std::string& to) {
    for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
        s.replace(pos, from.size(), to);
}

// Splits "https://host:port/prefix" into ("https://host:port", "/prefix").
std::pair<std::string, std::string> split_base_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("remote base_url needs a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string prefix = url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, path_start), prefix};
}

std::string extract_json_object(const std::string& text) {
    const auto first = text.find('{');
    const auto last = text.rfind('}');
    if (first == std::string::npos || last == std::string::npos || last < first)
        throw MalformedLLMResponse("no JSON object in model output");
    return text.substr(first, last - first + 1);
}

}  // namespace

const std::string& default_prompt_template() {
    static const std::string tmpl =
        "You analyse tool calls issued by an LLM agent so that a cache can decide whether their results may be "
        "reused.\n"
        "Tool: {{tool_name}}\n"
        "Parameters: {{parameters}}\n"
        "Classify the call:\n"
        "- request_type: INFORMATIONAL when the call only reads data, COMMAND when it changes external state.\n"
        "- parameter_category: the value of the parameter that best groups similar calls (usually the first), "
        "or null for single-parameter calls.\n"
        "- ttl_seconds: how long the result stays valid. Use 0 for COMMAND calls, 60 for real-time data, 300 for "
        "computational results and 3600 for static knowledge.\n"
        "Reply with exactly one JSON object matching this schema and nothing else:\n"
        "{{schema}}\n";
    return tmpl;
}

std::string render_prompt(const std::string& tmpl, const ToolCallRequest& r) {
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& p : r.params) params[p.name] = p.value;
    std::string out = tmpl.empty() ? default_prompt_template() : tmpl;
    replace_all(out, "{{tool_name}}", r.tool_name);
    replace_all(out, "{{parameters}}", params.dump());
    replace_all(out, "{{schema}}", kSchema);
    return out;
}

nlohmann::json build_chat_request(const RemoteConfig& cfg, const ToolCallRequest& r) {
    return nlohmann::json{{"model", cfg.model},
                          {"temperature", 0},
                          {"messages", nlohmann::json::array({{{"role", "user"},
                                                               {"content", render_prompt(cfg.prompt_template, r)}}})}};
}

SemanticFeatures parse_annotation_response(const std::string& body, const ToolCallRequest& r) {
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(body);
        if (parsed.contains("choices"))
            parsed = nlohmann::json::parse(
                extract_json_object(parsed.at("choices").at(0).at("message").at("content").get<std::string>()));
    } catch (const nlohmann::json::exception&) {
        try {
            parsed = nlohmann::json::parse(extract_json_object(body));
        } catch (const nlohmann::json::exception& e) {
            throw MalformedLLMResponse(std::string("unparseable model output: ") + e.what());
        }
    }
    if (!parsed.is_object()) throw MalformedLLMResponse("model output is not an object");
    if (!parsed.contains("request_type")) throw MalformedLLMResponse("missing request_type");
    if (!parsed.contains("ttl_seconds")) throw MalformedLLMResponse("missing ttl_seconds");
    SemanticFeatures f;
    try {
        const auto type = parsed.at("request_type").get<std::string>();
        if (type == "INFORMATIONAL")
            f.request_type = RequestType::Informational;
        else if (type == "COMMAND")
            f.request_type = RequestType::Command;
        else
            throw MalformedLLMResponse("bad request_type: " + type);
        f.ttl_seconds = parsed.at("ttl_seconds").get<double>();
        if (auto it = parsed.find("parameter_category"); it != parsed.end() && !it->is_null())
            f.parameter_category = it->is_string() ? it->get<std::string>() : canonical_value(*it);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedLLMResponse(std::string("bad field type: ") + e.what());
    }
    if (!(f.ttl_seconds >= 0) || !std::isfinite(f.ttl_seconds)) throw MalformedLLMResponse("bad ttl_seconds");
    if (f.request_type == RequestType::Command) f.ttl_seconds = 0.0;
    if (r.params.size() < 2) f.parameter_category.reset();
    return f;
}

RemoteConfig RemoteConfig::from_json(const nlohmann::json& j) {
    RemoteConfig c;
    c.base_url = j.at("base_url").get<std::string>();
    c.model = j.at("model").get<std::string>();
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.prompt_template = j.value("prompt_template", std::string{});
    if (auto it = j.find("prompt_template_file"); it != j.end()) {
        const auto path = it->get<std::string>();
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("cannot open prompt template: " + path);
        c.prompt_template.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    c.timeout = std::chrono::milliseconds(j.value("timeout_ms", static_cast<long>(c.timeout.count())));
    c.retries = j.value("retries", c.retries);
    c.backoff = std::chrono::milliseconds(j.value("backoff_ms", static_cast<long>(c.backoff.count())));
    return c;
}

ChatTransport make_http_transport(const RemoteConfig& cfg) {
    auto [host, prefix] = split_base_url(cfg.base_url);
    std::string api_key;
    if (const char* k = std::getenv(cfg.api_key_env.c_str())) api_key = k;
    const auto timeout = cfg.timeout;
    return [host, prefix, api_key, timeout](const nlohmann::json& body) -> std::string {
        httplib::Client cli(host);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
        cli.set_connection_timeout(secs.count(), usecs.count());
        cli.set_read_timeout(secs.count(), usecs.count());
        httplib::Headers headers;
        if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
        auto res = cli.Post(prefix + "/chat/completions", headers, body.dump(), "application/json");
        if (!res) throw EndpointUnavailable("chat endpoint unreachable: " + httplib::to_string(res.error()));
        if (res->status != 200) throw EndpointUnavailable("chat endpoint returned HTTP " + std::to_string(res->status));
        return res->body;
    };
}

RemoteAnnotator::RemoteAnnotator(RemoteConfig cfg, ChatTransport transport, std::optional<ToolManifest> fallback)
    : cfg_(std::move(cfg)), transport_(std::move(transport)), fallback_(std::move(fallback)) {}

RemoteAnnotator::RemoteAnnotator(RemoteConfig cfg, std::optional<ToolManifest> fallback)
    : RemoteAnnotator(cfg, make_http_transport(cfg), std::move(fallback)) {}

SemanticFeatures RemoteAnnotator::fetch(const ToolCallRequest& r) {
    const auto body = build_chat_request(cfg_, r);
    auto delay = cfg_.backoff;
    for (int attempt = 0;; ++attempt) {
        try {
            {
                std::lock_guard lock(mu_);
                ++remote_calls_;
            }
            return parse_annotation_response(transport_(body), r);
        } catch (const EndpointUnavailable&) {
            if (attempt >= cfg_.retries) throw;
        }
        std::this_thread::sleep_for(delay);
        delay *= 2;
    }
}

SemanticFeatures RemoteAnnotator::annotate(const ToolCallRequest& r) {
    const std::string memo_key = canonicalize(r.tool_name, r.params);
    {
        std::lock_guard lock(mu_);
        if (auto it = memo_.find(memo_key); it != memo_.end()) return it->second;
    }
    SemanticFeatures f;
    try {
        f = fetch(r);
    } catch (const EndpointUnavailable&) {
        if (!fallback_) throw;
        std::lock_guard lock(mu_);
        ++fallbacks_;
        return annotate_static(r, *fallback_);
    } catch (const MalformedLLMResponse&) {
        if (!fallback_) throw;
        std::lock_guard lock(mu_);
        ++fallbacks_;
        return annotate_static(r, *fallback_);
    }
    std::lock_guard lock(mu_);
    memo_[memo_key] = f;
    return f;
}

std::size_t RemoteAnnotator::remote_calls() const {
    std::lock_guard lock(mu_);
    return remote_calls_;
}

std::size_t RemoteAnnotator::fallbacks() const {
    std::lock_guard lock(mu_);
    return fallbacks_;
}

SemanticFeatures annotate_remote(const ToolCallRequest& r, const RemoteConfig& endpoint,
                                 const std::optional<ToolManifest>& fallback) {
    RemoteAnnotator annotator(endpoint, fallback);
    return annotator.annotate(r);
}

}  // namespace toolcache
