#pragma once

// Application configuration: defaults, JSON config file, environment
// overrides. Effective precedence is flags > environment > config file >
// defaults; the CLI applies flags on top of load_app_config()'s result.
// Unknown keys in the config file are rejected.

#include <functional>
#include <optional>
#include <string>

#include "adarag/types.hpp"

namespace adarag::config {

struct LlmConfig {
    std::string base_url = "http://localhost:11434";
    std::string model;
    std::string api_key_env = "LLM_API_KEY";  // env var holding the key
    double temperature = 0.0;
    int timeout_ms = 30000;
    int max_retries = 2;
    int in_flight = 4;
    std::string gateway = "http";  // "http" | "scripted"
    std::string script;            // script file for the scripted gateway
};

struct RetrievalConfig {
    double k1 = 1.2;
    double b = 0.75;
    int single_k = 3;
    int multi_per_step_k = 3;
};

struct MultiLoopConfig {
    int max_cycles = 5;
    std::string termination_keyword = "Jawaban";
};

struct ClassifierConfig {
    std::string mode = "builtin";  // "builtin" | "remote" | "fixed"
    std::string endpoint;          // remote mode
    std::string model_path;        // builtin mode
    std::string fixed_label;       // fixed mode: "A" | "B" | "C"
};

struct PathsConfig {
    std::string corpus;
    std::string datasets;
    std::string out_dir = ".";
};

struct AppConfig {
    LlmConfig llm;
    RetrievalConfig retrieval;
    MultiLoopConfig multi;
    ClassifierConfig classifier;
    PathsConfig paths;
};

/// Environment accessor, injectable for tests.
using EnvGetter = std::function<const char*(const char*)>;

EnvGetter system_env();

/// JSON text -> config over defaults. Throws Error on unknown keys or
/// type mismatches.
AppConfig parse_config_text(const std::string& text);

/// Defaults, then the optional config file, then LLM_BASE_URL/LLM_MODEL
/// from the environment.
AppConfig load_app_config(const std::string& config_path, const EnvGetter& env);

/// Resolves the API key from the environment variable the config names.
std::string resolve_api_key(const AppConfig& cfg, const EnvGetter& env);

}  // namespace adarag::config
