#pragma once

// Runs a dataset through a chosen method with bounded parallelism,
// collects per-question EvalRecords in input order, aggregates, and
// renders reports in the standard table shape:
//   Method | LLM Model | Exact Match | Accuracy | F1 Mean | Step Mean | Time Mean
//
// Gateway failures are already absorbed by the strategies and score as
// wrong answers (em=false, f1=0) so denominators always equal the
// dataset size. Any other exception escaping a worker is an
// infrastructure failure: the run aborts, persists the completed records
// plus a resume token, and throws RunAborted naming the file.

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "adarag/corpus.hpp"
#include "adarag/metrics.hpp"
#include "adarag/router.hpp"
#include "adarag/strategies.hpp"

namespace adarag::eval {

enum class Method { none, single, multi, adaptive };

std::string method_name(Method m);                 // none|single|multi|adaptive
std::string method_display_name(Method m);         // "Non Retrieval", ...
std::optional<Method> method_from_string(const std::string& s);

/// Aborted run; the message names the partial-records file (when one was
/// written).
class RunAborted : public Error {
public:
    using Error::Error;
};

struct HarnessDeps {
    const bm25::InvertedIndex* index = nullptr;      // single/multi/adaptive
    const corpus::CorpusHandle* corpus = nullptr;    // single/multi/adaptive
    llm::Gateway* gateway = nullptr;                 // required
    llm::GenParams params;
    llm::PromptOptions prompt;
    int single_k = 3;
    strategy::MultiConfig multi;
    const routing::RouterConfig* router = nullptr;   // adaptive only
};

struct RunConfig {
    Method method = Method::single;
    std::string model_name;
    std::string dataset;
    int parallelism = 4;
    uint64_t seed = 0;
    std::string partial_path;   // where aborted runs persist progress ("" = don't)
    std::string resume_path;    // partial file to resume from ("" = fresh run)
};

struct EvalRun {
    Method method = Method::single;
    std::string model_name;
    std::string dataset;
    std::vector<metrics::EvalRecord> records;   // input order
    metrics::EvalSummary summary;               // aggregate(records)
    int64_t started_at_ms = 0;                  // epoch milliseconds
    int64_t finished_at_ms = 0;
    std::string config_fingerprint;
};

/// Fingerprint of everything that shapes results (method, model, dataset,
/// retrieval/multi settings, seed) — resume tokens must match it.
std::string config_fingerprint(const RunConfig& run, const HarnessDeps& deps);

EvalRun run_evaluation(const std::vector<QAExample>& examples, const RunConfig& run,
                       const HarnessDeps& deps);

enum class ReportFormat { markdown, csv, json };

std::optional<ReportFormat> report_format_from_string(const std::string& s);

/// One row per run; display values at 3 decimals, csv/json carry full
/// precision alongside.
std::string emit_report(const std::vector<EvalRun>& runs, ReportFormat format);

/// Full-run JSON persistence; loading reproduces records and summary
/// exactly.
void save_run(const EvalRun& run, const std::string& path);
EvalRun load_run(const std::string& path);

}  // namespace adarag::eval
