#pragma once

// Prompt rendering plus completion execution against an OpenAI-compatible
// chat endpoint, with a deterministic scripted double for tests.
//
// The three prompt layouts are fixed here — tests assert them byte for
// byte. Each template is plain text with the blocks below separated by
// one blank line; absent blocks are omitted together with their
// separator.
//
//   NON_RETRIEVAL:
//     Berikan jawaban yang singkat.
//     <blank>
//     Pertanyaan: {question}
//     Jawaban:
//
//   SINGLE_RETRIEVAL: same instruction, with a context block before the
//   question:
//     Konteks:
//     [1] {title}
//     {text}
//     [2] ...
//
//   MULTI_REASON:
//     Jawablah pertanyaan berikut dengan penalaran langkah demi langkah.
//     Jika informasi yang diberikan tidak cukup untuk menjawab
//     pertanyaan, berikan saja kata kunci yang dapat digunakan untuk
//     menjawab pertanyaan. Jika informasi yang diberikan cukup, berikan
//     jawaban yang tepat.
//     <blank>
//     [context block, if any]
//     <blank>
//     Penalaran sebelumnya:       (prior reasoning sentences, if any)
//     {sentence 1}
//     ...
//     <blank>
//     Pertanyaan: {question}
//     Penalaran:
//
// Accumulated contexts are truncated to `context_char_budget` rendered
// characters, dropping lowest-ranked (last) documents first; the top
// document is always kept.

#include <chrono>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adarag/types.hpp"

namespace adarag::llm {

struct GenParams {
    std::string model;
    double temperature = 0.0;             // default 0 for reproducibility
    std::optional<int> max_tokens;
    std::chrono::milliseconds timeout{30000};
    int max_retries = 2;
};

enum class PromptKind { non_retrieval, single_retrieval, multi_reason };

struct CompletionResult {
    std::string text;                          // endpoint content, trailing whitespace trimmed
    std::chrono::duration<double> elapsed{};   // covers all attempts
    int attempts = 1;                          // <= max_retries + 1
};

struct PromptOptions {
    size_t context_char_budget = 12000;
};

/// Renders one of the three templates. Preconditions: non_retrieval takes
/// no contexts and no reasoning; single_retrieval requires contexts and
/// takes no reasoning. Violations throw ContractError.
std::string render_prompt(PromptKind kind, const std::string& question,
                          std::span<const Document> contexts,
                          std::span<const std::string> prior_reasoning,
                          const PromptOptions& opts = {});

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class GatewayError : public Error {
public:
    using Error::Error;
};

/// Connection-level failure (retried up to max_retries).
class TransportError : public GatewayError {
public:
    using GatewayError::GatewayError;
};

/// A transport failure caused by a deadline (retried like transport).
class TimeoutError : public TransportError {
public:
    using TransportError::TransportError;
};

/// Endpoint answered but not with the expected shape; never retried.
class ProtocolError : public GatewayError {
public:
    using GatewayError::GatewayError;
};

/// The scripted double ran out of matching entries. Deliberately a
/// logic_error: it signals a broken test script and is never absorbed
/// into an AnswerTrace.
class ScriptExhausted : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// ---------------------------------------------------------------------------
// Gateways
// ---------------------------------------------------------------------------

/// Completion executor. complete() owns the retry loop: transport and
/// timeout failures are retried with exponential backoff up to
/// max_retries; protocol errors are not. Elapsed covers all attempts.
/// Implementations are safe for concurrent calls.
class Gateway {
public:
    virtual ~Gateway() = default;

    CompletionResult complete(const std::string& prompt, const GenParams& params);

protected:
    /// One attempt; returns the assistant message content or throws a
    /// GatewayError subtype.
    virtual std::string attempt(const std::string& prompt, const GenParams& params) = 0;

    /// First retry delay; doubles per retry.
    virtual std::chrono::milliseconds backoff_base() const {
        return std::chrono::milliseconds(250);
    }
};

struct HttpGatewayConfig {
    std::string base_url;   // e.g. http://localhost:11434
    std::string api_key;    // empty = no Authorization header
    int in_flight = 4;      // concurrent request bound
    std::chrono::milliseconds backoff_base{250};
};

/// POSTs {base_url}/v1/chat/completions with an OpenAI-compatible body
/// and returns choices[0].message.content.
class HttpGateway : public Gateway {
public:
    explicit HttpGateway(HttpGatewayConfig cfg);
    ~HttpGateway() override;

protected:
    std::string attempt(const std::string& prompt, const GenParams& params) override;
    std::chrono::milliseconds backoff_base() const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One scripted exchange. An entry matches when every string in `match`
/// occurs as a substring of the prompt (empty list matches anything).
/// `repeat` is the number of times the entry may be consumed; -1 means
/// unlimited.
struct ScriptEntry {
    enum class Kind { reply, transport_error, protocol_error, timeout_error };

    std::vector<std::string> match;
    std::string response;
    Kind kind = Kind::reply;
    int repeat = 1;
};

inline ScriptEntry reply_any(std::string response) {
    return ScriptEntry{{}, std::move(response), ScriptEntry::Kind::reply, 1};
}

inline ScriptEntry reply_when(std::string substring, std::string response, int repeat = 1) {
    return ScriptEntry{{std::move(substring)}, std::move(response), ScriptEntry::Kind::reply, repeat};
}

/// Deterministic scripted double. Each call consumes the first
/// still-available matching entry; calls are serialized internally so
/// consumption order is deterministic. A call no entry matches throws
/// ScriptExhausted.
class ScriptedGateway : public Gateway {
public:
    explicit ScriptedGateway(std::vector<ScriptEntry> script);
    ~ScriptedGateway() override;

    /// Attempts made so far (includes scripted failures).
    size_t calls() const;

protected:
    std::string attempt(const std::string& prompt, const GenParams& params) override;
    std::chrono::milliseconds backoff_base() const override { return std::chrono::milliseconds(0); }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Loads a script from a JSON file: an array of objects with fields
/// "match" (string or array of strings, optional), "response" (string),
/// "kind" ("reply" | "transport_error" | "protocol_error" |
/// "timeout_error", default "reply") and "repeat" (int, default 1, -1 =
/// unlimited).
std::vector<ScriptEntry> load_script_file(const std::string& path);

}  // namespace adarag::llm
