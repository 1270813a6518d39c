#pragma once

// Shared domain types and error hierarchy used across the engine.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace adarag {

/// Three-way question complexity class.
/// A: answerable without retrieval, B: one retrieval step, C: multi-step.
enum class ComplexityLabel { A, B, C };

inline char label_to_char(ComplexityLabel l) {
    switch (l) {
        case ComplexityLabel::A: return 'A';
        case ComplexityLabel::B: return 'B';
        case ComplexityLabel::C: return 'C';
    }
    return '?';
}

std::optional<ComplexityLabel> label_from_string(const std::string& s);

/// The three answering methods.
enum class StrategyKind { non_retrieval, single_retrieval, multi_retrieval };

std::string strategy_name(StrategyKind k);

/// A retrievable corpus passage.
struct Document {
    std::string id;     // unique within a corpus, non-empty
    std::string title;  // may be empty
    std::string text;   // non-empty after whitespace trim
};

/// A question with gold answers and an optional complexity label.
struct QAExample {
    std::string id;
    std::string question;               // non-empty
    std::vector<std::string> answers;   // >= 1 entry, each non-empty
    std::string dataset;                // e.g. "indoqa" | "qasina" | "hotpotqa-id"
    std::optional<ComplexityLabel> label;
};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class for operational errors (I/O, data, remote endpoints).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data (bad line, duplicate id, empty dataset).
class IngestError : public Error {
public:
    using Error::Error;
};

/// Lookup for an id that does not exist.
class NotFoundError : public Error {
public:
    using Error::Error;
};

/// A caller violated a documented precondition.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace adarag
