#pragma once

// Immutable inverted index with Okapi BM25 ranking.
//
// Scoring uses the Lucene-style non-negative idf:
//   idf(t)    = ln(1 + (N - df + 0.5) / (df + 0.5))
//   score(q,d)= sum over query tokens t of
//               idf(t) * tf * (k1+1) / (tf + k1 * (1 - b + b * dl/avgdl))
// Defaults k1=1.2, b=0.75 (the ElasticSearch/Lucene defaults).
//
// Tokenization lowercases and splits on any non-alphanumeric character
// (see text::classify_codepoint for the non-ASCII approximation); no
// stemming, no stopword removal. Ties are broken by ascending doc id so
// rankings are deterministic.
//
// build_index is single-writer; the finished index is immutable and safe
// for unlimited concurrent search calls. The search counter is the only
// mutable member and is atomic.

#include <atomic>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "adarag/corpus.hpp"
#include "adarag/types.hpp"

namespace adarag::bm25 {

struct Bm25Params {
    double k1 = 1.2;   // term-frequency saturation, > 0
    double b = 0.75;   // length normalization, in [0,1]
};

struct RetrievalHit {
    std::string doc_id;
    double score = 0.0;  // >= 0; non-increasing by rank
    int rank = 0;        // 1..n, no gaps
};

/// Lowercased tokens split on any non-alphanumeric character.
std::vector<std::string> tokenize(std::string_view txt);

/// Strips the query symbols {* ! . " ` #}, collapses whitespace runs to
/// one space and trims. '?' is kept.
std::string preprocess_query(std::string_view question);

class InvertedIndex {
public:
    InvertedIndex() = default;
    InvertedIndex(InvertedIndex&& other) noexcept;
    InvertedIndex& operator=(InvertedIndex&& other) noexcept;
    InvertedIndex(const InvertedIndex&) = delete;
    InvertedIndex& operator=(const InvertedIndex&) = delete;

    /// Number of indexed documents.
    size_t doc_count() const { return doc_ids_.size(); }
    double avg_doc_length() const { return avg_doc_length_; }
    const Bm25Params& params() const { return params_; }

    /// Token count of a document (title + text). Throws NotFoundError.
    uint32_t doc_length(const std::string& doc_id) const;

    /// Number of documents containing `term` (0 when unindexed).
    size_t term_doc_frequency(const std::string& term) const;

    /// Term frequency of `term` in `doc_id` (0 when absent).
    uint32_t term_frequency(const std::string& term, const std::string& doc_id) const;

    /// BM25 score of `doc_id` for the given token sequence. Duplicate
    /// tokens contribute once per occurrence. Throws NotFoundError for an
    /// unknown doc id.
    double score(const std::vector<std::string>& query_tokens, const std::string& doc_id) const;

    /// Preprocesses + tokenizes `query`, then returns up to `k` hits with
    /// positive score ordered by (score desc, doc_id asc). A query that
    /// tokenizes to nothing yields an empty result.
    std::vector<RetrievalHit> search(std::string_view query, int k) const;

    /// Total search() invocations since construction/reset (instrumentation
    /// for step accounting).
    uint64_t search_count() const { return search_count_.load(std::memory_order_relaxed); }
    void reset_search_count() const { search_count_.store(0, std::memory_order_relaxed); }

    /// Binary snapshot, version-tagged. A loaded snapshot reproduces
    /// identical search results.
    void save(const std::string& path) const;
    static InvertedIndex load(const std::string& path);

private:
    friend InvertedIndex build_index(const corpus::CorpusHandle&, const Bm25Params&);

    struct PostingBlock {
        std::vector<uint32_t> slots;  // ascending document slots
        std::vector<double> tf;       // term frequency per posting
        std::vector<double> norm;     // k1 * (1 - b + b * dl/avgdl) per posting
    };

    void finalize();  // computes avgdl and per-posting norms

    Bm25Params params_;
    std::vector<std::string> doc_ids_;               // slot -> id
    std::unordered_map<std::string, uint32_t> slot_; // id -> slot
    std::vector<uint32_t> doc_lengths_;              // slot -> token count
    double avg_doc_length_ = 0.0;
    std::unordered_map<std::string, PostingBlock> postings_;
    mutable std::atomic<uint64_t> search_count_{0};
};

/// Indexes title and text concatenated. Throws ContractError on an empty
/// corpus or invalid params.
InvertedIndex build_index(const corpus::CorpusHandle& corpus, const Bm25Params& params = {});

}  // namespace adarag::bm25
