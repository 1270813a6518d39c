#include "adarag/strategies.hpp"

#include <cctype>
#include <chrono>
#include <unordered_set>

#include "adarag/text.hpp"

namespace adarag::strategy {

using Clock = std::chrono::steady_clock;

namespace {
constexpr std::string_view kNoHitsNote = "no documents retrieved; answered without context";
}

AnswerTrace answer_non_retrieval(const QAExample& q, llm::Gateway& gateway,
                                 const llm::GenParams& params, const llm::PromptOptions& popts) {
    AnswerTrace trace;
    trace.question_id = q.id;
    trace.strategy = StrategyKind::non_retrieval;
    const auto start = Clock::now();
    const std::string prompt = llm::render_prompt(llm::PromptKind::non_retrieval, q.question, {}, {}, popts);
    try {
        auto result = gateway.complete(prompt, params);
        trace.answer = text::trim(result.text);
    } catch (const llm::GatewayError& e) {
        trace.error = e.what();
        trace.answer.clear();
    }
    trace.elapsed = Clock::now() - start;
    return trace;
}

AnswerTrace answer_single_retrieval(const QAExample& q, const bm25::InvertedIndex& index,
                                    const corpus::CorpusHandle& docs, llm::Gateway& gateway,
                                    int k, const llm::GenParams& params,
                                    const llm::PromptOptions& popts) {
    AnswerTrace trace;
    trace.question_id = q.id;
    trace.strategy = StrategyKind::single_retrieval;
    const auto start = Clock::now();

    const auto hits = index.search(q.question, k);
    trace.retrieval_count = 1;

    std::vector<Document> contexts;
    contexts.reserve(hits.size());
    for (const auto& hit : hits) {
        trace.retrieved_doc_ids.push_back(hit.doc_id);
        contexts.push_back(docs.get_document(hit.doc_id));
    }

    std::string prompt;
    if (contexts.empty()) {
        trace.reasoning.emplace_back(kNoHitsNote);
        prompt = llm::render_prompt(llm::PromptKind::non_retrieval, q.question, {}, {}, popts);
    } else {
        prompt = llm::render_prompt(llm::PromptKind::single_retrieval, q.question, contexts, {}, popts);
    }

    try {
        auto result = gateway.complete(prompt, params);
        trace.answer = text::trim(result.text);
    } catch (const llm::GatewayError& e) {
        trace.error = e.what();
        trace.answer.clear();
    }
    trace.elapsed = Clock::now() - start;
    return trace;
}

AnswerTrace answer_multi_retrieval(const QAExample& q, const bm25::InvertedIndex& index,
                                   const corpus::CorpusHandle& docs, llm::Gateway& gateway,
                                   const MultiConfig& cfg, const llm::GenParams& params,
                                   const llm::PromptOptions& popts) {
    if (cfg.max_cycles < 1) throw ContractError("multi retrieval: max_cycles must be >= 1");
    if (cfg.per_step_k < 1) throw ContractError("multi retrieval: per_step_k must be >= 1");

    AnswerTrace trace;
    trace.question_id = q.id;
    trace.strategy = StrategyKind::multi_retrieval;
    const auto start = Clock::now();

    std::vector<Document> accumulated;
    std::unordered_set<std::string> seen;
    std::string query = q.question;

    try {
        for (int cycle = 1; cycle <= cfg.max_cycles; ++cycle) {
            trace.cycles = cycle;
            trace.retrieval_count = cycle;

            // Retrieve-step: the latest reasoning sentence is the refined
            // query after the first cycle.
            const auto hits = index.search(query, cfg.per_step_k);
            for (const auto& hit : hits) {
                if (seen.insert(hit.doc_id).second) {
                    trace.retrieved_doc_ids.push_back(hit.doc_id);
                    accumulated.push_back(docs.get_document(hit.doc_id));
                }
            }

            // Reason-step over question + accumulated docs + prior reasoning.
            const std::string prompt = llm::render_prompt(llm::PromptKind::multi_reason,
                                                          q.question, accumulated,
                                                          trace.reasoning, popts);
            auto result = gateway.complete(prompt, params);
            trace.reasoning.push_back(result.text);

            if (detect_termination(result.text, cfg.termination_keyword)) break;
            query = result.text;
        }
        if (!trace.reasoning.empty()) {
            trace.answer = extract_final_answer(trace.reasoning.back(), cfg.termination_keyword);
        }
    } catch (const llm::GatewayError& e) {
        trace.error = e.what();
        trace.answer.clear();
    }
    trace.elapsed = Clock::now() - start;
    return trace;
}

bool detect_termination(std::string_view reason_text, std::string_view keyword) {
    return text::ifind(reason_text, keyword) != std::string_view::npos;
}

std::string extract_final_answer(std::string_view reason_text, std::string_view keyword) {
    const size_t pos = text::ifind(reason_text, keyword);
    if (pos == std::string_view::npos) return text::trim(reason_text);

    size_t cursor = pos + keyword.size();
    while (cursor < reason_text.size() &&
           std::isalpha(static_cast<unsigned char>(reason_text[cursor]))) {
        ++cursor;  // inflection suffix, e.g. "jawabannya"
    }
    while (cursor < reason_text.size() &&
           (reason_text[cursor] == ' ' || reason_text[cursor] == '\t')) {
        ++cursor;
    }
    if (cursor < reason_text.size() && reason_text[cursor] == ':') {
        size_t line_end = reason_text.find('\n', cursor);
        if (line_end == std::string_view::npos) line_end = reason_text.size();
        return text::trim(reason_text.substr(cursor + 1, line_end - cursor - 1));
    }

    size_t line_start = reason_text.rfind('\n', pos);
    line_start = (line_start == std::string_view::npos) ? 0 : line_start + 1;
    return text::trim(reason_text.substr(line_start));
}

}  // namespace adarag::strategy
