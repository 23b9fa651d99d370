#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "json.hpp"
#include "toolcache/model.hpp"

namespace toolcache {

enum class TtlClass { Command, Realtime, Computational, Static };

// Default lifetimes: 0 s, 60 s, 300 s and 3600 s.
double ttl_for_class(TtlClass c);
TtlClass ttl_class_from_string(std::string_view s);
std::string_view to_string(TtlClass c);

struct CategoryRule {
    enum class Kind { FirstParam, NamedParam, None };
    Kind kind = Kind::FirstParam;
    std::string param_name;  // NamedParam only

    bool operator==(const CategoryRule&) const = default;
};

struct ToolRule {
    RequestType request_type = RequestType::Informational;
    double ttl_seconds = 0.0;
    CategoryRule category_rule;

    bool operator==(const ToolRule&) const = default;
};

// Tool registry used by the static annotator. File form:
//   {"weather": {"request_type": "INFORMATIONAL", "ttl_class": "realtime",
//                "category_rule": "first_param"}, ...}
// "ttl_seconds" may replace "ttl_class"; "category_rule" also accepts
// {"named_param": "<name>"} and "none".
class ToolManifest {
  public:
    ToolManifest() = default;

    void add(std::string tool, ToolRule rule);
    bool contains(const std::string& tool) const { return tools_.count(tool) != 0; }
    const ToolRule& at(const std::string& tool) const;  // throws UnknownTool
    const std::map<std::string, ToolRule>& tools() const { return tools_; }

    static ToolManifest from_json(const nlohmann::json& j);
    static ToolManifest load(const std::string& path);
    nlohmann::json to_json() const;

  private:
    std::map<std::string, ToolRule> tools_;
};

// Category label for a parameter value: strings verbatim, anything else in
// its canonical key rendering.
std::string category_label(const ParamValue& v);

SemanticFeatures annotate_static(const ToolCallRequest& r, const ToolManifest& m);

// COMMAND requests and anything living 60 s or less never enter the cache.
bool is_cacheable(const SemanticFeatures& f);

class Annotator {
  public:
    virtual ~Annotator() = default;
    virtual SemanticFeatures annotate(const ToolCallRequest& r) = 0;
};

class StaticAnnotator final : public Annotator {
  public:
    explicit StaticAnnotator(ToolManifest m) : manifest_(std::move(m)) {}
    SemanticFeatures annotate(const ToolCallRequest& r) override { return annotate_static(r, manifest_); }

  private:
    ToolManifest manifest_;
};

// Uses the features carried by pre-annotated trace records; falls back to a
// manifest (when given) for records without them.
class TraceAnnotator final : public Annotator {
  public:
    TraceAnnotator() = default;
    explicit TraceAnnotator(ToolManifest fallback) : fallback_(std::move(fallback)) {}
    SemanticFeatures annotate(const ToolCallRequest& r) override;

  private:
    std::optional<ToolManifest> fallback_;
};

struct RemoteConfig {
    // e.g. "https://api.example.com/v1"; requests go to <base_url>/chat/completions.
    std::string base_url;
    std::string model;
    std::string api_key_env = "TOOLCACHE_API_KEY";
    std::string prompt_template;  // empty: built-in default; JSON may name a file via "prompt_template_file"
    std::chrono::milliseconds timeout{30000};
    int retries = 2;
    std::chrono::milliseconds backoff{500};

    static RemoteConfig from_json(const nlohmann::json& j);
};

// Sends one chat-completions request body and returns the raw response body.
// Throws EndpointUnavailable on transport failure.
using ChatTransport = std::function<std::string(const nlohmann::json& request_body)>;

ChatTransport make_http_transport(const RemoteConfig& cfg);

const std::string& default_prompt_template();

// Fills {{tool_name}}, {{parameters}} and {{schema}}.
std::string render_prompt(const std::string& tmpl, const ToolCallRequest& r);

// Builds the OpenAI-compatible request body for one annotation.
nlohmann::json build_chat_request(const RemoteConfig& cfg, const ToolCallRequest& r);

// Parses a chat-completions response body (or bare message text) into
// features. Throws MalformedLLMResponse when required fields are missing.
SemanticFeatures parse_annotation_response(const std::string& body, const ToolCallRequest& r);

class RemoteAnnotator final : public Annotator {
  public:
    RemoteAnnotator(RemoteConfig cfg, ChatTransport transport, std::optional<ToolManifest> fallback = std::nullopt);
    RemoteAnnotator(RemoteConfig cfg, std::optional<ToolManifest> fallback = std::nullopt);

    SemanticFeatures annotate(const ToolCallRequest& r) override;

    std::size_t remote_calls() const;
    std::size_t fallbacks() const;

  private:
    SemanticFeatures fetch(const ToolCallRequest& r);

    RemoteConfig cfg_;
    ChatTransport transport_;
    std::optional<ToolManifest> fallback_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, SemanticFeatures> memo_;
    std::size_t remote_calls_ = 0;
    std::size_t fallbacks_ = 0;
};

SemanticFeatures annotate_remote(const ToolCallRequest& r, const RemoteConfig& endpoint,
                                 const std::optional<ToolManifest>& fallback = std::nullopt);

}  // namespace toolcache
