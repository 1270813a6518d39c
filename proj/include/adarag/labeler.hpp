#pragma once

// Complexity labeling and class balancing.
//
// Labels are decided stepwise from the three strategies' scores:
//   A when the non-retrieval answer is an exact match or beats the
//     single-retrieval F1 (strict);
//   else B when the single-retrieval answer is an exact match or beats
//     the multi-retrieval F1 (strict);
//   else C.
// Rows from the multi-hop dataset tag are assigned C directly, without
// running any strategy.
//
// Balancing doubles the smallest class via synonym augmentation and
// undersamples the others to the doubled size; a set whose class counts
// are already all equal is left untouched.

#include <cstdint>
#include <string>
#include <vector>

#include "adarag/bm25.hpp"
#include "adarag/corpus.hpp"
#include "adarag/gateway.hpp"
#include "adarag/strategies.hpp"
#include "adarag/types.hpp"

namespace adarag::labeling {

struct LabelSignals {
    bool em_non = false;
    bool em_single = false;
    bool em_multi = false;
    double f1_non = 0.0;
    double f1_single = 0.0;
    double f1_multi = 0.0;
};

/// Total over the whole signal space; comparisons are strict.
ComplexityLabel decide_label(const LabelSignals& s);

struct LabelConfig {
    int single_k = 3;
    strategy::MultiConfig multi;
    llm::GenParams params;
    llm::PromptOptions prompt;
    std::string checkpoint_path;   // empty = no checkpointing
    int checkpoint_every = 50;     // completions between checkpoint flushes
    int parallelism = 1;
    std::string multi_hop_tag = "hotpotqa-id";  // dataset assigned C directly
};

struct LabelResult {
    std::vector<QAExample> labeled;          // input order, labels set
    std::vector<std::string> diagnostics;    // per-question strategy failures etc.
    size_t resumed = 0;                      // questions restored from the checkpoint
};

/// Runs all three strategies per question (except multi-hop-tagged rows
/// and rows already in the checkpoint) and applies decide_label. The
/// checkpoint is a JSONL file of {"id","label"} appended as questions
/// complete, so interrupted runs resume.
LabelResult label_dataset(const std::vector<QAExample>& examples,
                          const bm25::InvertedIndex& index, const corpus::CorpusHandle& docs,
                          llm::Gateway& gateway, const LabelConfig& cfg);

struct SynonymMap {
    // word -> alternatives; loaders reject entries that only map a word
    // to itself.
    std::unordered_map<std::string, std::vector<std::string>> entries;

    bool empty() const { return entries.empty(); }
};

/// JSON object file {word: [synonym, ...]}.
SynonymMap load_synonyms(const std::string& path);

struct AugmentResult {
    std::string text;
    std::vector<size_t> substituted_positions;  // byte offsets of replaced words
    bool substituted = false;                   // false = flagged no-op
};

/// Replaces up to two mappable words with seeded-random synonyms. The
/// same (question, map, seed) always yields the same output.
AugmentResult synonym_augment(const std::string& question, const SynonymMap& synonyms,
                              uint64_t seed);

/// Balances a labeled set: with m the smallest class size, the smallest
/// class is doubled to 2m (one augmented variant per original, id suffix
/// "-aug"); larger classes are seeded-undersampled to 2m; classes between
/// m and 2m are topped up with augmented variants of seeded-chosen rows.
/// The result is shuffled with the same seed. Equal class counts are a
/// no-op. Throws ContractError on an unlabeled row or an empty class
/// (naming the class).
std::vector<QAExample> balance_labeled(const std::vector<QAExample>& labeled,
                                       const SynonymMap& synonyms, uint64_t seed,
                                       std::vector<std::string>* diagnostics = nullptr);

}  // namespace adarag::labeling
