#include "adarag/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "adarag/rng.hpp"

namespace adarag::eval {

using nlohmann::json;

std::string method_name(Method m) {
    switch (m) {
        case Method::none: return "none";
        case Method::single: return "single";
        case Method::multi: return "multi";
        case Method::adaptive: return "adaptive";
    }
    return "unknown";
}

std::string method_display_name(Method m) {
    switch (m) {
        case Method::none: return "Non Retrieval";
        case Method::single: return "Single Retrieval";
        case Method::multi: return "Multi Retrieval";
        case Method::adaptive: return "Adaptive Retrieval";
    }
    return "Unknown";
}

std::optional<Method> method_from_string(const std::string& s) {
    if (s == "none") return Method::none;
    if (s == "single") return Method::single;
    if (s == "multi") return Method::multi;
    if (s == "adaptive") return Method::adaptive;
    return std::nullopt;
}

std::optional<ReportFormat> report_format_from_string(const std::string& s) {
    if (s == "markdown") return ReportFormat::markdown;
    if (s == "csv") return ReportFormat::csv;
    if (s == "json") return ReportFormat::json;
    return std::nullopt;
}

std::string config_fingerprint(const RunConfig& run, const HarnessDeps& deps) {
    json canon;
    canon["method"] = method_name(run.method);
    canon["model"] = run.model_name;
    canon["dataset"] = run.dataset;
    canon["seed"] = run.seed;
    canon["single_k"] = deps.single_k;
    canon["multi"] = {{"max_cycles", deps.multi.max_cycles},
                      {"keyword", deps.multi.termination_keyword},
                      {"per_step_k", deps.multi.per_step_k}};
    canon["gen"] = {{"model", deps.params.model}, {"temperature", deps.params.temperature}};
    const std::string s = canon.dump();
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(rng::fnv1a(s.data(), s.size())));
    return std::string(buf);
}

// ---------------------------------------------------------------------------
// Record / run serialization
// ---------------------------------------------------------------------------

namespace {

StrategyKind strategy_from_name(const std::string& s) {
    if (s == "non_retrieval") return StrategyKind::non_retrieval;
    if (s == "single_retrieval") return StrategyKind::single_retrieval;
    if (s == "multi_retrieval") return StrategyKind::multi_retrieval;
    throw Error("unknown strategy name: " + s);
}

json record_to_json(const metrics::EvalRecord& r) {
    return json{{"question_id", r.question_id},
                {"em", r.em},
                {"f1", r.f1},
                {"steps", r.steps},
                {"elapsed_seconds", r.elapsed.count()},
                {"strategy", strategy_name(r.strategy)}};
}

metrics::EvalRecord record_from_json(const json& j) {
    metrics::EvalRecord r;
    r.question_id = j.at("question_id").get<std::string>();
    r.em = j.at("em").get<bool>();
    r.f1 = j.at("f1").get<double>();
    r.steps = j.at("steps").get<int>();
    r.elapsed = std::chrono::duration<double>(j.at("elapsed_seconds").get<double>());
    r.strategy = strategy_from_name(j.at("strategy").get<std::string>());
    return r;
}

json summary_to_json(const metrics::EvalSummary& s) {
    return json{{"total", s.total},       {"em_count", s.em_count}, {"accuracy", s.accuracy},
                {"f1_mean", s.f1_mean},   {"step_mean", s.step_mean},
                {"time_mean", s.time_mean}};
}

metrics::EvalSummary summary_from_json(const json& j) {
    metrics::EvalSummary s;
    s.total = j.at("total").get<int>();
    s.em_count = j.at("em_count").get<int>();
    s.accuracy = j.at("accuracy").get<double>();
    s.f1_mean = j.at("f1_mean").get<double>();
    s.step_mean = j.at("step_mean").get<double>();
    s.time_mean = j.at("time_mean").get<double>();
    return s;
}

constexpr const char* kRunFormat = "adarag-eval-run";
constexpr const char* kPartialFormat = "adarag-partial-run";

void write_partial(const std::string& path, const std::string& fingerprint,
                   const std::vector<std::optional<metrics::EvalRecord>>& slots) {
    json doc;
    doc["format"] = kPartialFormat;
    doc["version"] = 1;
    doc["fingerprint"] = fingerprint;
    json records = json::array();
    for (const auto& slot : slots) {
        if (slot) records.push_back(record_to_json(*slot));
    }
    doc["records"] = std::move(records);
    std::ofstream out(path, std::ios::binary);
    if (out) out << doc.dump(2);
}

int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

}  // namespace

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

EvalRun run_evaluation(const std::vector<QAExample>& examples, const RunConfig& run,
                       const HarnessDeps& deps) {
    if (examples.empty()) throw ContractError("run_evaluation: dataset is empty");
    if (deps.gateway == nullptr) throw ContractError("run_evaluation: gateway not configured");
    const bool needs_retrieval = run.method != Method::none;
    if (needs_retrieval && (deps.index == nullptr || deps.corpus == nullptr)) {
        throw ContractError("run_evaluation: method needs an index and corpus");
    }
    if (run.method == Method::adaptive && deps.router == nullptr) {
        throw ContractError("run_evaluation: adaptive method needs a router config");
    }
    {
        std::unordered_set<std::string> ids;
        for (const auto& ex : examples) {
            if (!ids.insert(ex.id).second) {
                throw IngestError("duplicate question id in dataset: " + ex.id);
            }
        }
    }

    const std::string fingerprint = config_fingerprint(run, deps);

    std::unordered_map<std::string, metrics::EvalRecord> resumed;
    if (!run.resume_path.empty()) {
        std::ifstream in(run.resume_path, std::ios::binary);
        if (!in) throw Error("cannot open resume file: " + run.resume_path);
        json doc = json::parse(in, nullptr, false);
        if (doc.is_discarded() || doc.value("format", "") != std::string(kPartialFormat)) {
            throw Error("not a partial-run file: " + run.resume_path);
        }
        if (doc.value("fingerprint", "") != fingerprint) {
            throw Error("resume token does not match this run's configuration");
        }
        for (const auto& rec : doc.at("records")) {
            auto r = record_from_json(rec);
            resumed.emplace(r.question_id, std::move(r));
        }
    }

    EvalRun result;
    result.method = run.method;
    result.model_name = run.model_name;
    result.dataset = run.dataset;
    result.config_fingerprint = fingerprint;
    result.started_at_ms = now_ms();

    const size_t n = examples.size();
    std::vector<std::optional<metrics::EvalRecord>> slots(n);

    const auto eval_one = [&](size_t i) {
        const QAExample& ex = examples[i];
        if (auto it = resumed.find(ex.id); it != resumed.end()) {
            slots[i] = it->second;
            return;
        }
        const auto start = std::chrono::steady_clock::now();
        strategy::AnswerTrace trace;
        switch (run.method) {
            case Method::none:
                trace = strategy::answer_non_retrieval(ex, *deps.gateway, deps.params, deps.prompt);
                break;
            case Method::single:
                trace = strategy::answer_single_retrieval(ex, *deps.index, *deps.corpus,
                                                          *deps.gateway, deps.single_k,
                                                          deps.params, deps.prompt);
                break;
            case Method::multi:
                trace = strategy::answer_multi_retrieval(ex, *deps.index, *deps.corpus,
                                                         *deps.gateway, deps.multi, deps.params,
                                                         deps.prompt);
                break;
            case Method::adaptive:
                trace = routing::answer_adaptive(ex, *deps.index, *deps.corpus, *deps.gateway,
                                                 *deps.router, deps.params);
                break;
        }
        metrics::EvalRecord rec;
        rec.question_id = ex.id;
        rec.em = metrics::exact_match(trace.answer, ex.answers);
        rec.f1 = metrics::token_f1(trace.answer, ex.answers);
        rec.steps = trace.retrieval_count;
        rec.elapsed = std::chrono::steady_clock::now() - start;
        rec.strategy = trace.strategy;
        slots[i] = std::move(rec);
    };

    const int workers =
        std::max(1, std::min<int>(run.parallelism, static_cast<int>(n)));
    std::exception_ptr failure;
    if (workers == 1) {
        try {
            for (size_t i = 0; i < n; ++i) eval_one(i);
        } catch (...) {
            failure = std::current_exception();
        }
    } else {
        std::atomic<size_t> next{0};
        std::atomic<bool> stop{false};
        std::mutex failure_mu;
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    if (stop.load(std::memory_order_relaxed)) return;
                    const size_t i = next.fetch_add(1);
                    if (i >= n) return;
                    try {
                        eval_one(i);
                    } catch (...) {
                        stop.store(true, std::memory_order_relaxed);
                        std::lock_guard<std::mutex> lk(failure_mu);
                        if (!failure) failure = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    if (failure) {
        std::string where;
        if (!run.partial_path.empty()) {
            write_partial(run.partial_path, fingerprint, slots);
            where = "; partial records persisted to " + run.partial_path;
        }
        size_t done = 0;
        for (const auto& slot : slots) done += slot.has_value() ? 1 : 0;
        try {
            std::rethrow_exception(failure);
        } catch (const std::exception& e) {
            throw RunAborted("evaluation aborted after " + std::to_string(done) + "/" +
                             std::to_string(n) + " questions: " + e.what() + where);
        }
    }

    result.records.reserve(n);
    for (auto& slot : slots) result.records.push_back(std::move(*slot));
    result.summary = metrics::aggregate(result.records);
    result.finished_at_ms = now_ms();
    return result;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

namespace {

std::string fmt3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return std::string(buf);
}

std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

}  // namespace

std::string emit_report(const std::vector<EvalRun>& runs, ReportFormat format) {
    if (runs.empty()) throw ContractError("emit_report: no runs");

    if (format == ReportFormat::markdown) {
        // Group runs per dataset, preserving first appearance order.
        std::vector<std::string> datasets;
        for (const auto& run : runs) {
            if (std::find(datasets.begin(), datasets.end(), run.dataset) == datasets.end()) {
                datasets.push_back(run.dataset);
            }
        }
        std::string out;
        for (size_t d = 0; d < datasets.size(); ++d) {
            if (d > 0) out += "\n";
            out += "### " + datasets[d] + "\n\n";
            out += "| Method | LLM Model | Exact Match | Accuracy | F1 Mean | Step Mean | Time Mean |\n";
            out += "|---|---|---|---|---|---|---|\n";
            for (const auto& run : runs) {
                if (run.dataset != datasets[d]) continue;
                out += "| " + method_display_name(run.method) + " | " + run.model_name + " | " +
                       std::to_string(run.summary.em_count) + " | " + fmt3(run.summary.accuracy) +
                       " | " + fmt3(run.summary.f1_mean) + " | " + fmt3(run.summary.step_mean) +
                       " | " + fmt3(run.summary.time_mean) + " |\n";
            }
        }
        return out;
    }

    if (format == ReportFormat::csv) {
        std::string out =
            "method,llm_model,exact_match,accuracy,f1_mean,step_mean,time_mean,dataset,"
            "accuracy_full,f1_mean_full,step_mean_full,time_mean_full\n";
        for (const auto& run : runs) {
            out += method_display_name(run.method) + "," + run.model_name + "," +
                   std::to_string(run.summary.em_count) + "," + fmt3(run.summary.accuracy) + "," +
                   fmt3(run.summary.f1_mean) + "," + fmt3(run.summary.step_mean) + "," +
                   fmt3(run.summary.time_mean) + "," + run.dataset + "," +
                   fmt_full(run.summary.accuracy) + "," + fmt_full(run.summary.f1_mean) + "," +
                   fmt_full(run.summary.step_mean) + "," + fmt_full(run.summary.time_mean) + "\n";
        }
        return out;
    }

    json rows = json::array();
    for (const auto& run : runs) {
        json row;
        row["method"] = method_display_name(run.method);
        row["llm_model"] = run.model_name;
        row["dataset"] = run.dataset;
        row["exact_match"] = run.summary.em_count;
        row["display"] = {{"accuracy", fmt3(run.summary.accuracy)},
                          {"f1_mean", fmt3(run.summary.f1_mean)},
                          {"step_mean", fmt3(run.summary.step_mean)},
                          {"time_mean", fmt3(run.summary.time_mean)}};
        row["summary"] = summary_to_json(run.summary);
        rows.push_back(std::move(row));
    }
    return rows.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Run persistence
// ---------------------------------------------------------------------------

void save_run(const EvalRun& run, const std::string& path) {
    json doc;
    doc["format"] = kRunFormat;
    doc["version"] = 1;
    doc["method"] = method_name(run.method);
    doc["model_name"] = run.model_name;
    doc["dataset"] = run.dataset;
    doc["config_fingerprint"] = run.config_fingerprint;
    doc["started_at_ms"] = run.started_at_ms;
    doc["finished_at_ms"] = run.finished_at_ms;
    json records = json::array();
    for (const auto& r : run.records) records.push_back(record_to_json(r));
    doc["records"] = std::move(records);
    doc["summary"] = summary_to_json(run.summary);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open run file for write: " + path);
    out << doc.dump(2);
    if (!out) throw Error("I/O error while writing run: " + path);
}

EvalRun load_run(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open run file: " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || doc.value("format", "") != std::string(kRunFormat)) {
        throw Error("not an eval-run file: " + path);
    }
    EvalRun run;
    const auto method = method_from_string(doc.at("method").get<std::string>());
    if (!method) throw Error("unknown method in run file: " + path);
    run.method = *method;
    run.model_name = doc.value("model_name", std::string{});
    run.dataset = doc.value("dataset", std::string{});
    run.config_fingerprint = doc.value("config_fingerprint", std::string{});
    run.started_at_ms = doc.value("started_at_ms", int64_t{0});
    run.finished_at_ms = doc.value("finished_at_ms", int64_t{0});
    for (const auto& rec : doc.at("records")) run.records.push_back(record_from_json(rec));
    run.summary = summary_from_json(doc.at("summary"));
    return run;
}

}  // namespace adarag::eval
