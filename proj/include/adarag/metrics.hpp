#pragma once

// Answer normalization, exact match, token-overlap F1, and run-level
// aggregation. All operations are pure.
//
// Multi-gold scoring takes the max over golds (the SQuAD-family
// convention). F1 of two empty token lists is 1; exactly one empty is 0.

#include <chrono>
#include <string>
#include <vector>

#include "adarag/types.hpp"

namespace adarag::metrics {

/// NFC-normalizes (Latin subset), lowercases, replaces punctuation and
/// symbol characters with spaces, collapses whitespace and trims. No
/// article removal (Indonesian has none).
std::string normalize_answer(std::string_view txt);

/// True iff the normalized prediction equals some normalized gold.
bool exact_match(const std::string& pred, const std::vector<std::string>& golds);

/// Max over golds of the token-multiset F1 between normalized strings.
double token_f1(const std::string& pred, const std::vector<std::string>& golds);

struct EvalRecord {
    std::string question_id;
    bool em = false;
    double f1 = 0.0;                        // in [0,1]; em implies 1.0
    int steps = 0;                          // retrieval operations
    std::chrono::duration<double> elapsed{};
    StrategyKind strategy = StrategyKind::non_retrieval;
};

/// The column schema of the run reports.
struct EvalSummary {
    int total = 0;
    int em_count = 0;
    double accuracy = 0.0;   // em_count / total
    double f1_mean = 0.0;
    double step_mean = 0.0;
    double time_mean = 0.0;  // seconds
};

/// Arithmetic means at full precision; display rounding happens in
/// reporting. Throws ContractError on empty input.
EvalSummary aggregate(const std::vector<EvalRecord>& records);

}  // namespace adarag::metrics
