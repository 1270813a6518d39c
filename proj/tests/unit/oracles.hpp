#pragma once

// Test-only oracles, written independently of the library's
// implementation paths:
//  - exhaustive BM25 scoring over whitespace-pretokenized documents
//  - naive token-multiset F1
//  - the labeling rules restated directly from their three-bullet form
// Generators constrain inputs to space-separated lowercase alphanumeric
// tokens so the oracles stay independent of the library tokenizer.

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace oracle {

struct Doc {
    std::string id;
    std::vector<std::string> tokens;  // title+text pretokenized
};

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream iss(s);
    std::vector<std::string> out;
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

inline double bm25_score(const std::vector<Doc>& docs, const std::vector<std::string>& query,
                         size_t doc_idx, double k1, double b) {
    const double n = static_cast<double>(docs.size());
    double total_len = 0.0;
    for (const auto& d : docs) total_len += static_cast<double>(d.tokens.size());
    const double avgdl = total_len / n;
    const double dl = static_cast<double>(docs[doc_idx].tokens.size());

    double score = 0.0;
    for (const auto& term : query) {
        size_t df = 0;
        for (const auto& d : docs) {
            if (std::find(d.tokens.begin(), d.tokens.end(), term) != d.tokens.end()) ++df;
        }
        if (df == 0) continue;
        const size_t tf =
            static_cast<size_t>(std::count(docs[doc_idx].tokens.begin(),
                                           docs[doc_idx].tokens.end(), term));
        if (tf == 0) continue;
        const double idf = std::log(1.0 + (n - static_cast<double>(df) + 0.5) /
                                              (static_cast<double>(df) + 0.5));
        const double tfd = static_cast<double>(tf);
        score += idf * (tfd * (k1 + 1.0)) / (tfd + k1 * (1.0 - b + b * dl / avgdl));
    }
    return score;
}

struct Ranked {
    std::string id;
    double score;
};

/// Exhaustive scorer over every document, sorted (score desc, id asc),
/// positive scores only, truncated to k.
inline std::vector<Ranked> bm25_search(const std::vector<Doc>& docs,
                                       const std::vector<std::string>& query, size_t k,
                                       double k1, double b) {
    std::vector<Ranked> all;
    for (size_t i = 0; i < docs.size(); ++i) {
        const double s = bm25_score(docs, query, i, k1, b);
        if (s > 0.0) all.push_back({docs[i].id, s});
    }
    std::sort(all.begin(), all.end(), [](const Ranked& a, const Ranked& b2) {
        if (a.score != b2.score) return a.score > b2.score;
        return a.id < b2.id;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

/// Naive multiset-overlap F1 over pretokenized answers.
inline double token_f1(std::vector<std::string> pred, std::vector<std::string> gold) {
    if (pred.empty() && gold.empty()) return 1.0;
    if (pred.empty() || gold.empty()) return 0.0;
    size_t overlap = 0;
    std::vector<std::string> pool = gold;
    for (const auto& p : pred) {
        auto it = std::find(pool.begin(), pool.end(), p);
        if (it != pool.end()) {
            pool.erase(it);
            ++overlap;
        }
    }
    if (overlap == 0) return 0.0;
    const double precision = static_cast<double>(overlap) / static_cast<double>(pred.size());
    const double recall = static_cast<double>(overlap) / static_cast<double>(gold.size());
    return 2.0 * precision * recall / (precision + recall);
}

/// The labeling rules taken bullet by bullet: A when non-retrieval gets
/// an exact match or a strictly higher F1 than single; else B when single
/// gets an exact match or a strictly higher F1 than multi; else C (multi
/// exact match or nothing above held).
inline char label_rules(bool em_non, bool em_single, bool em_multi, double f1_non,
                        double f1_single, double f1_multi) {
    const bool rule_a = em_non || (f1_non > f1_single);
    if (rule_a) return 'A';
    const bool rule_b = em_single || (f1_single > f1_multi);
    if (rule_b) return 'B';
    if (em_multi) return 'C';
    return 'C';  // none of the conditions held
}

}  // namespace oracle
