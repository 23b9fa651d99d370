#include "toolcache/annotator.hpp"

#include <fstream>

#include "toolcache/errors.hpp"
#include "toolcache/keying.hpp"

namespace toolcache {

double ttl_for_class(TtlClass c) {
    switch (c) {
        case TtlClass::Command: return 0.0;
        case TtlClass::Realtime: return 60.0;
        case TtlClass::Computational: return 300.0;
        case TtlClass::Static: return 3600.0;
    }
    return 0.0;
}

TtlClass ttl_class_from_string(std::string_view s) {
    if (s == "command") return TtlClass::Command;
    if (s == "realtime") return TtlClass::Realtime;
    if (s == "computational") return TtlClass::Computational;
    if (s == "static") return TtlClass::Static;
    throw ConfigError("unknown ttl_class: " + std::string(s));
}

std::string_view to_string(TtlClass c) {
    switch (c) {
        case TtlClass::Command: return "command";
        case TtlClass::Realtime: return "realtime";
        case TtlClass::Computational: return "computational";
        case TtlClass::Static: return "static";
    }
    return "command";
}

void ToolManifest::add(std::string tool, ToolRule rule) {
    if (rule.request_type == RequestType::Command) rule.ttl_seconds = 0.0;
    tools_[std::move(tool)] = std::move(rule);
}

const ToolRule& ToolManifest::at(const std::string& tool) const {
    auto it = tools_.find(tool);
    if (it == tools_.end()) throw UnknownTool(tool);
    return it->second;
}

ToolManifest ToolManifest::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("tool manifest must be a JSON object");
    ToolManifest m;
    for (const auto& [name, spec] : j.items()) {
        try {
            ToolRule rule;
            rule.request_type = request_type_from_string(spec.at("request_type").get<std::string>());
            if (spec.contains("ttl_seconds")) {
                rule.ttl_seconds = spec.at("ttl_seconds").get<double>();
                if (!(rule.ttl_seconds >= 0)) throw ConfigError("negative ttl_seconds");
            } else {
                rule.ttl_seconds = ttl_for_class(ttl_class_from_string(spec.at("ttl_class").get<std::string>()));
            }
            const auto cat = spec.value("category_rule", nlohmann::json("first_param"));
            if (cat.is_string()) {
                const auto s = cat.get<std::string>();
                if (s == "first_param")
                    rule.category_rule.kind = CategoryRule::Kind::FirstParam;
                else if (s == "none")
                    rule.category_rule.kind = CategoryRule::Kind::None;
                else
                    throw ConfigError("unknown category_rule: " + s);
            } else if (cat.is_object() && cat.contains("named_param")) {
                rule.category_rule.kind = CategoryRule::Kind::NamedParam;
                rule.category_rule.param_name = cat.at("named_param").get<std::string>();
            } else {
                throw ConfigError("bad category_rule");
            }
            m.add(name, std::move(rule));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("manifest entry '" + name + "': " + e.what());
        }
    }
    return m;
}

ToolManifest ToolManifest::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open manifest: " + path);
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("manifest " + path + ": " + e.what());
    }
}

nlohmann::json ToolManifest::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, rule] : tools_) {
        nlohmann::json e{{"request_type", toolcache::to_string(rule.request_type)}, {"ttl_seconds", rule.ttl_seconds}};
        switch (rule.category_rule.kind) {
            case CategoryRule::Kind::FirstParam: e["category_rule"] = "first_param"; break;
            case CategoryRule::Kind::None: e["category_rule"] = "none"; break;
            case CategoryRule::Kind::NamedParam:
                e["category_rule"] = {{"named_param", rule.category_rule.param_name}};
                break;
        }
        j[name] = std::move(e);
    }
    return j;
}

std::string category_label(const ParamValue& v) {
    if (v.is_string()) return v.get<std::string>();
    return canonical_value(v);
}

SemanticFeatures annotate_static(const ToolCallRequest& r, const ToolManifest& m) {
    const ToolRule& rule = m.at(r.tool_name);
    SemanticFeatures f;
    f.request_type = rule.request_type;
    f.ttl_seconds = rule.request_type == RequestType::Command ? 0.0 : rule.ttl_seconds;
    switch (rule.category_rule.kind) {
        case CategoryRule::Kind::FirstParam:
            // Single-parameter calls get no parameter-level grouping.
            if (r.params.size() >= 2) f.parameter_category = category_label(r.params.front().value);
            break;
        case CategoryRule::Kind::NamedParam:
            for (const auto& p : r.params) {
                if (p.name == rule.category_rule.param_name) {
                    f.parameter_category = category_label(p.value);
                    break;
                }
            }
            break;
        case CategoryRule::Kind::None:
            break;
    }
    return f;
}

bool is_cacheable(const SemanticFeatures& f) {
    if (f.request_type == RequestType::Command) return false;
    return f.ttl_seconds > 60.0;
}

SemanticFeatures TraceAnnotator::annotate(const ToolCallRequest& r) {
    if (r.annotation) return *r.annotation;
    if (fallback_) return annotate_static(r, *fallback_);
    throw UnknownTool(r.tool_name);
}

}  // namespace toolcache
