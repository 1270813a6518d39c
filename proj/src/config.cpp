#include "adarag/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace adarag::config {

using nlohmann::json;

EnvGetter system_env() {
    return [](const char* name) -> const char* { return std::getenv(name); };
}

namespace {

void reject_unknown(const json& obj, const char* section,
                    std::initializer_list<const char*> known) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw Error("config: unknown key \"" + key + "\" in " + section);
        }
    }
}

template <typename T>
void read_into(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error("config: key \"" + std::string(key) + "\" has the wrong type");
    }
}

}  // namespace

AppConfig parse_config_text(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error("config: not a JSON object");
    }
    reject_unknown(doc, "the top level", {"llm", "retrieval", "multi", "classifier", "paths"});

    AppConfig cfg;
    if (doc.contains("llm")) {
        const auto& o = doc["llm"];
        reject_unknown(o, "\"llm\"",
                       {"base_url", "model", "api_key_env", "temperature", "timeout_ms",
                        "max_retries", "in_flight", "gateway", "script"});
        read_into(o, "base_url", cfg.llm.base_url);
        read_into(o, "model", cfg.llm.model);
        read_into(o, "api_key_env", cfg.llm.api_key_env);
        read_into(o, "temperature", cfg.llm.temperature);
        read_into(o, "timeout_ms", cfg.llm.timeout_ms);
        read_into(o, "max_retries", cfg.llm.max_retries);
        read_into(o, "in_flight", cfg.llm.in_flight);
        read_into(o, "gateway", cfg.llm.gateway);
        read_into(o, "script", cfg.llm.script);
    }
    if (doc.contains("retrieval")) {
        const auto& o = doc["retrieval"];
        reject_unknown(o, "\"retrieval\"", {"k1", "b", "single_k", "multi_per_step_k"});
        read_into(o, "k1", cfg.retrieval.k1);
        read_into(o, "b", cfg.retrieval.b);
        read_into(o, "single_k", cfg.retrieval.single_k);
        read_into(o, "multi_per_step_k", cfg.retrieval.multi_per_step_k);
    }
    if (doc.contains("multi")) {
        const auto& o = doc["multi"];
        reject_unknown(o, "\"multi\"", {"max_cycles", "termination_keyword"});
        read_into(o, "max_cycles", cfg.multi.max_cycles);
        read_into(o, "termination_keyword", cfg.multi.termination_keyword);
    }
    if (doc.contains("classifier")) {
        const auto& o = doc["classifier"];
        reject_unknown(o, "\"classifier\"", {"mode", "endpoint", "model_path", "fixed_label"});
        read_into(o, "mode", cfg.classifier.mode);
        read_into(o, "endpoint", cfg.classifier.endpoint);
        read_into(o, "model_path", cfg.classifier.model_path);
        read_into(o, "fixed_label", cfg.classifier.fixed_label);
    }
    if (doc.contains("paths")) {
        const auto& o = doc["paths"];
        reject_unknown(o, "\"paths\"", {"corpus", "datasets", "out_dir"});
        read_into(o, "corpus", cfg.paths.corpus);
        read_into(o, "datasets", cfg.paths.datasets);
        read_into(o, "out_dir", cfg.paths.out_dir);
    }

    if (cfg.llm.gateway != "http" && cfg.llm.gateway != "scripted") {
        throw Error("config: llm.gateway must be \"http\" or \"scripted\"");
    }
    if (cfg.classifier.mode != "builtin" && cfg.classifier.mode != "remote" &&
        cfg.classifier.mode != "fixed") {
        throw Error("config: classifier.mode must be builtin, remote or fixed");
    }
    if (!cfg.classifier.fixed_label.empty() && !label_from_string(cfg.classifier.fixed_label)) {
        throw Error("config: classifier.fixed_label must be A, B or C");
    }
    return cfg;
}

AppConfig load_app_config(const std::string& config_path, const EnvGetter& env) {
    AppConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) throw Error("cannot open config file: " + config_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        cfg = parse_config_text(buf.str());
    }
    if (const char* v = env("LLM_BASE_URL"); v != nullptr && *v != '\0') cfg.llm.base_url = v;
    if (const char* v = env("LLM_MODEL"); v != nullptr && *v != '\0') cfg.llm.model = v;
    return cfg;
}

std::string resolve_api_key(const AppConfig& cfg, const EnvGetter& env) {
    if (cfg.llm.api_key_env.empty()) return "";
    const char* v = env(cfg.llm.api_key_env.c_str());
    return v == nullptr ? "" : v;
}

}  // namespace adarag::config
