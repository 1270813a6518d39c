#include "adarag/gateway.hpp"

#include <fstream>
#include <mutex>
#include <semaphore>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "adarag/text.hpp"

namespace adarag::llm {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Prompt rendering
// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kShortAnswerInstruction = "Berikan jawaban yang singkat.";
constexpr std::string_view kReasonInstruction =
    "Jawablah pertanyaan berikut dengan penalaran langkah demi langkah. "
    "Jika informasi yang diberikan tidak cukup untuk menjawab pertanyaan, "
    "berikan saja kata kunci yang dapat digunakan untuk menjawab pertanyaan. "
    "Jika informasi yang diberikan cukup, berikan jawaban yang tepat.";

std::string render_doc_block(const Document& doc, size_t ordinal) {
    std::string block = "[" + std::to_string(ordinal) + "] ";
    if (!doc.title.empty()) {
        block += doc.title;
        block += '\n';
    }
    block += doc.text;
    return block;
}

// Renders "Konteks:\n[1] ...\n[2] ..." keeping the leading documents that
// fit the character budget. The top-ranked document is always kept.
std::string render_context_block(std::span<const Document> contexts, size_t budget) {
    std::vector<std::string> blocks;
    blocks.reserve(contexts.size());
    for (size_t i = 0; i < contexts.size(); ++i) {
        blocks.push_back(render_doc_block(contexts[i], i + 1));
    }
    const auto total = [&](size_t n) {
        size_t len = 0;
        for (size_t i = 0; i < n; ++i) len += blocks[i].size() + 1;  // +1 joining newline
        return len;
    };
    size_t keep = blocks.size();
    while (keep > 1 && total(keep) > budget) --keep;

    std::string out = "Konteks:";
    for (size_t i = 0; i < keep; ++i) {
        out += '\n';
        out += blocks[i];
    }
    return out;
}

}  // namespace

std::string render_prompt(PromptKind kind, const std::string& question,
                          std::span<const Document> contexts,
                          std::span<const std::string> prior_reasoning,
                          const PromptOptions& opts) {
    switch (kind) {
        case PromptKind::non_retrieval:
            if (!contexts.empty() || !prior_reasoning.empty()) {
                throw ContractError("non_retrieval prompt takes no contexts or reasoning");
            }
            break;
        case PromptKind::single_retrieval:
            if (contexts.empty()) {
                throw ContractError("single_retrieval prompt requires contexts");
            }
            if (!prior_reasoning.empty()) {
                throw ContractError("single_retrieval prompt takes no prior reasoning");
            }
            break;
        case PromptKind::multi_reason:
            break;
    }

    std::vector<std::string> blocks;
    if (kind == PromptKind::multi_reason) {
        blocks.emplace_back(kReasonInstruction);
    } else {
        blocks.emplace_back(kShortAnswerInstruction);
    }
    if (!contexts.empty()) {
        blocks.push_back(render_context_block(contexts, opts.context_char_budget));
    }
    if (!prior_reasoning.empty()) {
        std::string block = "Penalaran sebelumnya:";
        for (const auto& sentence : prior_reasoning) {
            block += '\n';
            block += sentence;
        }
        blocks.push_back(std::move(block));
    }
    {
        std::string block = "Pertanyaan: " + question;
        block += (kind == PromptKind::multi_reason) ? "\nPenalaran:" : "\nJawaban:";
        blocks.push_back(std::move(block));
    }

    std::string prompt;
    for (size_t i = 0; i < blocks.size(); ++i) {
        if (i > 0) prompt += "\n\n";
        prompt += blocks[i];
    }
    return prompt;
}

// ---------------------------------------------------------------------------
// Retry loop
// ---------------------------------------------------------------------------

CompletionResult Gateway::complete(const std::string& prompt, const GenParams& params) {
    const auto start = std::chrono::steady_clock::now();
    auto delay = backoff_base();
    int attempts = 0;
    for (;;) {
        ++attempts;
        try {
            std::string content = attempt(prompt, params);
            CompletionResult result;
            result.text = text::trim_right(content);
            result.elapsed = std::chrono::steady_clock::now() - start;
            result.attempts = attempts;
            return result;
        } catch (const ProtocolError&) {
            throw;
        } catch (const TimeoutError& e) {
            if (attempts > params.max_retries) {
                throw TimeoutError("gateway timed out after " + std::to_string(attempts) +
                                   " attempt(s): " + e.what());
            }
        } catch (const TransportError& e) {
            if (attempts > params.max_retries) {
                throw TransportError("gateway failed after " + std::to_string(attempts) +
                                     " attempt(s): " + e.what());
            }
        }
        if (delay.count() > 0) std::this_thread::sleep_for(delay);
        delay *= 2;
    }
}

// ---------------------------------------------------------------------------
// HTTP gateway
// ---------------------------------------------------------------------------

struct HttpGateway::Impl {
    HttpGatewayConfig cfg;
    std::string host;         // scheme://host[:port]
    std::string path_prefix;  // leading path of base_url, no trailing '/'
    std::counting_semaphore<1024> slots;

    explicit Impl(HttpGatewayConfig c)
        : cfg(std::move(c)), slots(std::max(1, cfg.in_flight)) {
        // Split the base URL into the client target and a path prefix.
        std::string url = cfg.base_url;
        size_t scheme_end = url.find("://");
        size_t path_start =
            url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
        if (path_start == std::string::npos) {
            host = url;
        } else {
            host = url.substr(0, path_start);
            path_prefix = url.substr(path_start);
            while (!path_prefix.empty() && path_prefix.back() == '/') path_prefix.pop_back();
        }
    }
};

HttpGateway::HttpGateway(HttpGatewayConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {
    if (impl_->cfg.base_url.empty()) {
        throw ContractError("HttpGateway requires a base_url");
    }
}

HttpGateway::~HttpGateway() = default;

std::chrono::milliseconds HttpGateway::backoff_base() const { return impl_->cfg.backoff_base; }

std::string HttpGateway::attempt(const std::string& prompt, const GenParams& params) {
    impl_->slots.acquire();
    struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
    } release{impl_->slots};

    httplib::Client cli(impl_->host);
    cli.set_connection_timeout(params.timeout);
    cli.set_read_timeout(params.timeout);
    cli.set_write_timeout(params.timeout);

    httplib::Headers headers;
    if (!impl_->cfg.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + impl_->cfg.api_key);
    }

    json body;
    body["model"] = params.model;
    body["messages"] = json::array({json{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = params.temperature;
    if (params.max_tokens) body["max_tokens"] = *params.max_tokens;

    const std::string target = impl_->path_prefix + "/v1/chat/completions";
    auto res = cli.Post(target, headers, body.dump(), "application/json");

    if (!res) {
        switch (res.error()) {
            case httplib::Error::ConnectionTimeout:
                throw TimeoutError("connection timed out: " + impl_->host);
            case httplib::Error::Read:
                throw TimeoutError("read timed out or connection dropped: " + impl_->host);
            default:
                throw TransportError("HTTP transport failure (" +
                                     httplib::to_string(res.error()) + "): " + impl_->host);
        }
    }
    if (res->status >= 500) {
        throw TransportError("HTTP " + std::to_string(res->status) + " from " + impl_->host);
    }
    if (res->status != 200) {
        throw ProtocolError("HTTP " + std::to_string(res->status) + " from " + impl_->host);
    }

    json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) {
        throw ProtocolError("response body is not JSON");
    }
    if (!parsed.contains("choices") || !parsed["choices"].is_array() ||
        parsed["choices"].empty()) {
        throw ProtocolError("response lacks choices[0]");
    }
    const auto& first = parsed["choices"][0];
    if (!first.contains("message") || !first["message"].contains("content") ||
        !first["message"]["content"].is_string()) {
        throw ProtocolError("response lacks choices[0].message.content string");
    }
    return first["message"]["content"].get<std::string>();
}

// ---------------------------------------------------------------------------
// Scripted gateway
// ---------------------------------------------------------------------------

struct ScriptedGateway::Impl {
    struct Slot {
        ScriptEntry entry;
        int remaining;  // -1 = unlimited
    };
    std::vector<Slot> slots;
    size_t calls = 0;
    mutable std::mutex mu;
};

ScriptedGateway::ScriptedGateway(std::vector<ScriptEntry> script)
    : impl_(std::make_unique<Impl>()) {
    if (script.empty()) throw ContractError("scripted gateway requires a non-empty script");
    for (auto& entry : script) {
        int remaining = entry.repeat;
        if (remaining == 0) remaining = 1;
        impl_->slots.push_back({std::move(entry), remaining});
    }
}

ScriptedGateway::~ScriptedGateway() = default;

size_t ScriptedGateway::calls() const {
    std::lock_guard<std::mutex> lk(impl_->mu);
    return impl_->calls;
}

std::string ScriptedGateway::attempt(const std::string& prompt, const GenParams&) {
    std::lock_guard<std::mutex> lk(impl_->mu);
    ++impl_->calls;
    for (auto& slot : impl_->slots) {
        if (slot.remaining == 0) continue;
        bool ok = true;
        for (const auto& needle : slot.entry.match) {
            if (prompt.find(needle) == std::string::npos) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        if (slot.remaining > 0) --slot.remaining;
        switch (slot.entry.kind) {
            case ScriptEntry::Kind::reply:
                return slot.entry.response;
            case ScriptEntry::Kind::transport_error:
                throw TransportError("scripted transport failure");
            case ScriptEntry::Kind::protocol_error:
                throw ProtocolError("scripted protocol failure");
            case ScriptEntry::Kind::timeout_error:
                throw TimeoutError("scripted timeout");
        }
    }
    std::string head = prompt.substr(0, 120);
    throw ScriptExhausted("scripted gateway has no matching entry for prompt: \"" + head + "...\"");
}

std::vector<ScriptEntry> load_script_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open script file: " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_array()) {
        throw Error("script file must be a JSON array: " + path);
    }
    std::vector<ScriptEntry> script;
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("response") || !item["response"].is_string()) {
            throw Error("script entry needs a string \"response\": " + path);
        }
        ScriptEntry entry;
        entry.response = item["response"].get<std::string>();
        if (item.contains("match")) {
            if (item["match"].is_string()) {
                entry.match.push_back(item["match"].get<std::string>());
            } else if (item["match"].is_array()) {
                for (const auto& m : item["match"]) {
                    if (!m.is_string()) throw Error("script \"match\" entries must be strings");
                    entry.match.push_back(m.get<std::string>());
                }
            } else {
                throw Error("script \"match\" must be a string or array of strings");
            }
        }
        if (item.contains("kind")) {
            const std::string kind = item["kind"].get<std::string>();
            if (kind == "reply") entry.kind = ScriptEntry::Kind::reply;
            else if (kind == "transport_error") entry.kind = ScriptEntry::Kind::transport_error;
            else if (kind == "protocol_error") entry.kind = ScriptEntry::Kind::protocol_error;
            else if (kind == "timeout_error") entry.kind = ScriptEntry::Kind::timeout_error;
            else throw Error("unknown script entry kind: " + kind);
        }
        if (item.contains("repeat")) entry.repeat = item["repeat"].get<int>();
        script.push_back(std::move(entry));
    }
    if (script.empty()) throw Error("script file has no entries: " + path);
    return script;
}

}  // namespace adarag::llm
