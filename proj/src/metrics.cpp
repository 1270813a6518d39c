#include "adarag/metrics.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "adarag/text.hpp"

namespace adarag::metrics {

std::string normalize_answer(std::string_view txt) {
    const std::string composed = text::nfc_latin(txt);
    std::string replaced;
    replaced.reserve(composed.size());
    size_t pos = 0;
    while (pos < composed.size()) {
        uint32_t cp = text::decode_utf8(composed, pos);
        switch (text::classify_codepoint(cp)) {
            case text::CharClass::word:
            case text::CharClass::mark:
                text::encode_utf8(text::to_lower(cp), replaced);
                break;
            case text::CharClass::punct_symbol:
            case text::CharClass::space:
                replaced.push_back(' ');
                break;
        }
    }
    return text::collapse_whitespace(replaced);
}

namespace {

std::vector<std::string> split_tokens(const std::string& normalized) {
    std::vector<std::string> out;
    std::istringstream iss(normalized);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

double f1_single(const std::vector<std::string>& pred_toks,
                 const std::vector<std::string>& gold_toks) {
    if (pred_toks.empty() && gold_toks.empty()) return 1.0;
    if (pred_toks.empty() || gold_toks.empty()) return 0.0;
    std::unordered_map<std::string, int> gold_counts;
    for (const auto& t : gold_toks) ++gold_counts[t];
    int overlap = 0;
    for (const auto& t : pred_toks) {
        auto it = gold_counts.find(t);
        if (it != gold_counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    if (overlap == 0) return 0.0;
    const double precision = static_cast<double>(overlap) / static_cast<double>(pred_toks.size());
    const double recall = static_cast<double>(overlap) / static_cast<double>(gold_toks.size());
    return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

bool exact_match(const std::string& pred, const std::vector<std::string>& golds) {
    if (golds.empty()) throw ContractError("exact_match: golds must be non-empty");
    const std::string p = normalize_answer(pred);
    return std::any_of(golds.begin(), golds.end(),
                       [&](const std::string& g) { return normalize_answer(g) == p; });
}

double token_f1(const std::string& pred, const std::vector<std::string>& golds) {
    if (golds.empty()) throw ContractError("token_f1: golds must be non-empty");
    const auto pred_toks = split_tokens(normalize_answer(pred));
    double best = 0.0;
    for (const auto& g : golds) {
        best = std::max(best, f1_single(pred_toks, split_tokens(normalize_answer(g))));
    }
    return best;
}

EvalSummary aggregate(const std::vector<EvalRecord>& records) {
    if (records.empty()) throw ContractError("aggregate: records must be non-empty");
    EvalSummary s;
    s.total = static_cast<int>(records.size());
    double f1_sum = 0.0;
    double step_sum = 0.0;
    double time_sum = 0.0;
    for (const auto& r : records) {
        if (r.em) ++s.em_count;
        f1_sum += r.f1;
        step_sum += static_cast<double>(r.steps);
        time_sum += r.elapsed.count();
    }
    const double n = static_cast<double>(s.total);
    s.accuracy = static_cast<double>(s.em_count) / n;
    s.f1_mean = f1_sum / n;
    s.step_mean = step_sum / n;
    s.time_mean = time_sum / n;
    return s;
}

}  // namespace adarag::metrics
