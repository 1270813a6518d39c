#pragma once

// The three answering methods: non-retrieval, single-retrieval and the
// interleaved multi-retrieval loop (retrieve-step / reason-step), each
// producing a full AnswerTrace.
//
// The multi loop runs cycles 1..max_cycles. Every cycle starts with a
// retrieve-step — the original question on cycle 1, afterwards the most
// recent reason-step output — then a reason-step over the question, all
// accumulated documents (deduplicated, first-seen order) and all prior
// reasoning. The loop stops when the reason-step output contains the
// termination keyword (case-insensitive substring) or the cycle budget
// runs out.
//
// Gateway failures never abort a run: the trace carries the error and an
// empty answer so evaluation covers every question. Strategy executions
// are independent and safe to run concurrently across questions.

#include <string>
#include <string_view>
#include <vector>

#include "adarag/bm25.hpp"
#include "adarag/corpus.hpp"
#include "adarag/gateway.hpp"
#include "adarag/types.hpp"

namespace adarag::strategy {

struct MultiConfig {
    int max_cycles = 5;
    std::string termination_keyword = "Jawaban";
    int per_step_k = 3;
};

struct AnswerTrace {
    std::string question_id;
    StrategyKind strategy = StrategyKind::non_retrieval;
    std::string answer;
    int retrieval_count = 0;
    int cycles = 0;
    std::chrono::duration<double> elapsed{};
    std::vector<std::string> retrieved_doc_ids;  // deduplicated, first-retrieval order
    std::vector<std::string> reasoning;
    std::optional<std::string> error;
};

AnswerTrace answer_non_retrieval(const QAExample& q, llm::Gateway& gateway,
                                 const llm::GenParams& params,
                                 const llm::PromptOptions& popts = {});

/// Retrieves once with the question, then prompts with the hits in rank
/// order. An empty hit list degrades to the no-context prompt (noted in
/// reasoning) — still one retrieval operation.
AnswerTrace answer_single_retrieval(const QAExample& q, const bm25::InvertedIndex& index,
                                    const corpus::CorpusHandle& docs, llm::Gateway& gateway,
                                    int k, const llm::GenParams& params,
                                    const llm::PromptOptions& popts = {});

AnswerTrace answer_multi_retrieval(const QAExample& q, const bm25::InvertedIndex& index,
                                   const corpus::CorpusHandle& docs, llm::Gateway& gateway,
                                   const MultiConfig& cfg, const llm::GenParams& params,
                                   const llm::PromptOptions& popts = {});

/// True iff reason_text contains the keyword, matched case-insensitively.
bool detect_termination(std::string_view reason_text, std::string_view keyword);

/// Extracts the answer from a reason-step output: at the first
/// case-insensitive keyword occurrence, an attached inflection suffix
/// ("jawabannya") and spaces are skipped; a following ':' yields the rest
/// of that line, otherwise the text from that line's start onward. A text
/// without the keyword is returned whole (trimmed) as the fallback
/// answer.
std::string extract_final_answer(std::string_view reason_text, std::string_view keyword);

}  // namespace adarag::strategy
