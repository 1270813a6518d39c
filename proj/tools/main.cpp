// adarag — adaptive retrieval QA engine CLI.
//
// Subcommands: index build, label run, label balance, classifier train,
// classifier eval, eval run, report. Exit codes: 0 success, 1 operational
// error, 2 usage error. Diagnostics go to stderr; data goes to stdout or
// --out.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "adarag/classifier.hpp"
#include "adarag/config.hpp"
#include "adarag/corpus.hpp"
#include "adarag/harness.hpp"
#include "adarag/labeler.hpp"
#include "adarag/router.hpp"

namespace {

constexpr const char* kVersion = "adarag 0.1.0";

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using adarag::config::AppConfig;

struct CommonOpts {
    std::string config_path;
    uint64_t seed = 0;
    std::optional<int> parallelism;
    std::optional<std::string> base_url;
    std::optional<std::string> model;
    std::optional<std::string> gateway_kind;
    std::optional<std::string> script;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file");
    cmd->add_option("--seed", opts.seed, "Seed for all randomized steps");
    cmd->add_option("--parallelism", opts.parallelism, "Concurrent questions (default 4)");
    cmd->add_option("--base-url", opts.base_url, "LLM endpoint base URL");
    cmd->add_option("--model", opts.model, "LLM model name");
    cmd->add_option("--gateway", opts.gateway_kind, "Gateway kind: http|scripted");
    cmd->add_option("--script", opts.script, "Script file for the scripted gateway");
}

AppConfig effective_config(const CommonOpts& opts) {
    AppConfig cfg = adarag::config::load_app_config(opts.config_path, adarag::config::system_env());
    if (opts.base_url) cfg.llm.base_url = *opts.base_url;
    if (opts.model) cfg.llm.model = *opts.model;
    if (opts.gateway_kind) cfg.llm.gateway = *opts.gateway_kind;
    if (opts.script) cfg.llm.script = *opts.script;
    if (cfg.llm.gateway != "http" && cfg.llm.gateway != "scripted") {
        throw UsageError("--gateway must be http or scripted");
    }
    return cfg;
}

std::unique_ptr<adarag::llm::Gateway> make_gateway(const AppConfig& cfg) {
    if (cfg.llm.gateway == "scripted") {
        if (cfg.llm.script.empty()) {
            throw UsageError("scripted gateway needs --script (or llm.script in the config)");
        }
        return std::make_unique<adarag::llm::ScriptedGateway>(
            adarag::llm::load_script_file(cfg.llm.script));
    }
    adarag::llm::HttpGatewayConfig gw;
    gw.base_url = cfg.llm.base_url;
    gw.api_key = adarag::config::resolve_api_key(cfg, adarag::config::system_env());
    gw.in_flight = cfg.llm.in_flight;
    return std::make_unique<adarag::llm::HttpGateway>(gw);
}

adarag::llm::GenParams gen_params(const AppConfig& cfg) {
    adarag::llm::GenParams params;
    params.model = cfg.llm.model;
    params.temperature = cfg.llm.temperature;
    params.timeout = std::chrono::milliseconds(cfg.llm.timeout_ms);
    params.max_retries = cfg.llm.max_retries;
    return params;
}

adarag::strategy::MultiConfig multi_config(const AppConfig& cfg) {
    adarag::strategy::MultiConfig multi;
    multi.max_cycles = cfg.multi.max_cycles;
    multi.termination_keyword = cfg.multi.termination_keyword;
    multi.per_step_k = cfg.retrieval.multi_per_step_k;
    return multi;
}

void report_rejections(const std::vector<adarag::corpus::Rejection>& rejections,
                       const std::string& what) {
    for (const auto& r : rejections) {
        std::cerr << what << " line " << r.line << " rejected: " << r.reason << "\n";
    }
    if (!rejections.empty()) {
        std::cerr << what << ": " << rejections.size() << " row(s) rejected\n";
    }
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw adarag::Error("cannot open output file: " + out_path);
    out << content;
    if (!out) throw adarag::Error("I/O error while writing: " + out_path);
}

adarag::bm25::InvertedIndex open_index(const std::string& index_path,
                                       const adarag::corpus::CorpusHandle& corpus,
                                       const AppConfig& cfg) {
    if (!index_path.empty()) return adarag::bm25::InvertedIndex::load(index_path);
    return adarag::bm25::build_index(corpus, {cfg.retrieval.k1, cfg.retrieval.b});
}

// ---------------------------------------------------------------------------
// Handlers
// ---------------------------------------------------------------------------

int run_index_build(const std::string& corpus_path, const std::string& out_path,
                    const CommonOpts& common, std::optional<double> k1, std::optional<double> b) {
    AppConfig cfg = effective_config(common);
    if (k1) cfg.retrieval.k1 = *k1;
    if (b) cfg.retrieval.b = *b;
    auto corpus = adarag::corpus::ingest_corpus_file(corpus_path);
    report_rejections(corpus.rejections(), "corpus");
    auto index = adarag::bm25::build_index(corpus, {cfg.retrieval.k1, cfg.retrieval.b});
    index.save(out_path);
    std::cerr << "indexed " << index.doc_count() << " documents (avg length "
              << index.avg_doc_length() << " tokens) -> " << out_path << "\n";
    return 0;
}

int run_label(const std::string& corpus_path, const std::string& index_path,
              const std::string& dataset_path, const std::string& dataset_name,
              const std::string& out_path, const std::string& checkpoint_path,
              const CommonOpts& common) {
    AppConfig cfg = effective_config(common);
    auto corpus = adarag::corpus::ingest_corpus_file(corpus_path);
    report_rejections(corpus.rejections(), "corpus");
    auto index = open_index(index_path, corpus, cfg);
    auto qa = adarag::corpus::ingest_qa_dataset_file(dataset_path, dataset_name);
    report_rejections(qa.rejections, "dataset");

    auto gateway = make_gateway(cfg);
    adarag::labeling::LabelConfig lc;
    lc.single_k = cfg.retrieval.single_k;
    lc.multi = multi_config(cfg);
    lc.params = gen_params(cfg);
    lc.checkpoint_path = checkpoint_path;
    lc.parallelism = common.parallelism.value_or(1);

    auto result = adarag::labeling::label_dataset(qa.examples, index, corpus, *gateway, lc);
    for (const auto& d : result.diagnostics) std::cerr << d << "\n";
    if (result.resumed > 0) {
        std::cerr << "resumed " << result.resumed << " question(s) from checkpoint\n";
    }
    adarag::corpus::write_qa_dataset_file(out_path, result.labeled);
    std::cerr << "labeled " << result.labeled.size() << " question(s) -> " << out_path << "\n";
    return 0;
}

int run_balance(const std::string& in_path, const std::string& synonyms_path,
                const std::string& out_path, const CommonOpts& common) {
    auto qa = adarag::corpus::ingest_qa_dataset_file(in_path, "");
    report_rejections(qa.rejections, "dataset");
    auto synonyms = adarag::labeling::load_synonyms(synonyms_path);
    std::vector<std::string> diagnostics;
    auto balanced = adarag::labeling::balance_labeled(qa.examples, synonyms, common.seed,
                                                      &diagnostics);
    for (const auto& d : diagnostics) std::cerr << d << "\n";
    adarag::corpus::write_qa_dataset_file(out_path, balanced);
    std::cerr << "balanced " << qa.examples.size() << " -> " << balanced.size()
              << " question(s) -> " << out_path << "\n";
    return 0;
}

int run_train(const std::string& train_path, const std::string& out_path, int epochs,
              const CommonOpts& common) {
    auto qa = adarag::corpus::ingest_qa_dataset_file(train_path, "");
    report_rejections(qa.rejections, "dataset");
    auto model = adarag::classifier::train(qa.examples, epochs, common.seed);
    adarag::classifier::save_model(model, out_path);
    std::cerr << "trained on " << qa.examples.size() << " question(s), " << epochs
              << " epoch(s), final loss "
              << (model.training_loss.empty() ? 0.0 : model.training_loss.back()) << " -> "
              << out_path << "\n";
    return 0;
}

int run_classifier_eval(const std::string& model_path, const std::string& test_path,
                        const std::string& out_path, const std::string& name) {
    auto model = adarag::classifier::load_model(model_path);
    auto qa = adarag::corpus::ingest_qa_dataset_file(test_path, "");
    report_rejections(qa.rejections, "dataset");
    auto report = adarag::classifier::evaluate_classifier(model, qa.examples);
    write_output(out_path, adarag::classifier::format_report(report, name));
    return 0;
}

int run_eval(const std::string& method_str, const std::string& corpus_path,
             const std::string& index_path, const std::string& dataset_path,
             const std::string& dataset_name, const std::string& out_path,
             const std::string& model_name_flag, const std::string& classifier_model,
             const std::string& fixed_label, const std::string& partial_path,
             const std::string& resume_path, const CommonOpts& common) {
    const auto method = adarag::eval::method_from_string(method_str);
    if (!method) throw UsageError("--method must be one of none|single|multi|adaptive");
    AppConfig cfg = effective_config(common);
    if (*method != adarag::eval::Method::none && corpus_path.empty()) {
        throw UsageError("--corpus is required for retrieval methods");
    }

    adarag::corpus::CorpusHandle corpus;
    std::optional<adarag::bm25::InvertedIndex> index;
    if (!corpus_path.empty()) {
        corpus = adarag::corpus::ingest_corpus_file(corpus_path);
        report_rejections(corpus.rejections(), "corpus");
        index = open_index(index_path, corpus, cfg);
    }

    auto qa = adarag::corpus::ingest_qa_dataset_file(dataset_path, dataset_name);
    report_rejections(qa.rejections, "dataset");

    auto gateway = make_gateway(cfg);

    std::unique_ptr<adarag::routing::QuestionClassifier> question_classifier;
    adarag::routing::RouterConfig router;
    if (*method == adarag::eval::Method::adaptive) {
        std::string mode = cfg.classifier.mode;
        if (!fixed_label.empty()) mode = "fixed";
        if (!classifier_model.empty()) mode = "builtin";
        if (mode == "builtin") {
            const std::string path =
                classifier_model.empty() ? cfg.classifier.model_path : classifier_model;
            if (path.empty()) {
                throw UsageError("adaptive method needs --classifier-model (or classifier.model_path)");
            }
            question_classifier = std::make_unique<adarag::routing::BuiltinClassifier>(
                adarag::classifier::load_model(path));
        } else if (mode == "remote") {
            if (cfg.classifier.endpoint.empty()) {
                throw UsageError("remote classifier needs classifier.endpoint in the config");
            }
            question_classifier = std::make_unique<adarag::routing::RemoteClassifier>(
                cfg.classifier.endpoint, std::chrono::milliseconds(cfg.llm.timeout_ms));
        } else {
            const std::string label_str =
                fixed_label.empty() ? cfg.classifier.fixed_label : fixed_label;
            auto label = adarag::label_from_string(label_str);
            if (!label) throw UsageError("--fixed-label must be A, B or C");
            question_classifier = std::make_unique<adarag::routing::FixedClassifier>(*label);
        }
        router.classifier = question_classifier.get();
        router.single_k = cfg.retrieval.single_k;
        router.multi = multi_config(cfg);
    }

    adarag::eval::HarnessDeps deps;
    deps.index = index ? &*index : nullptr;
    deps.corpus = corpus_path.empty() ? nullptr : &corpus;
    deps.gateway = gateway.get();
    deps.params = gen_params(cfg);
    deps.single_k = cfg.retrieval.single_k;
    deps.multi = multi_config(cfg);
    deps.router = (*method == adarag::eval::Method::adaptive) ? &router : nullptr;

    adarag::eval::RunConfig run;
    run.method = *method;
    run.model_name = model_name_flag.empty() ? cfg.llm.model : model_name_flag;
    run.dataset = dataset_name.empty()
                      ? (qa.examples.empty() ? std::string{} : qa.examples.front().dataset)
                      : dataset_name;
    run.parallelism = common.parallelism.value_or(4);
    run.seed = common.seed;
    run.partial_path = partial_path;
    run.resume_path = resume_path;

    auto result = adarag::eval::run_evaluation(qa.examples, run, deps);

    std::string run_path = out_path;
    if (run_path.empty()) {
        std::filesystem::create_directories(cfg.paths.out_dir);
        run_path = (std::filesystem::path(cfg.paths.out_dir) /
                    ("run-" + adarag::eval::method_name(*method) + "-" +
                     (run.dataset.empty() ? "dataset" : run.dataset) + ".json"))
                       .string();
    }
    adarag::eval::save_run(result, run_path);
    std::cerr << "run saved to " << run_path << "\n";
    std::cout << adarag::eval::emit_report({result}, adarag::eval::ReportFormat::markdown);
    return 0;
}

int run_report(const std::vector<std::string>& run_paths, const std::string& format_str,
               const std::string& out_path) {
    const auto format = adarag::eval::report_format_from_string(format_str);
    if (!format) throw UsageError("--format must be markdown, csv or json");
    std::vector<adarag::eval::EvalRun> runs;
    runs.reserve(run_paths.size());
    for (const auto& p : run_paths) runs.push_back(adarag::eval::load_run(p));
    write_output(out_path, adarag::eval::emit_report(runs, *format));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive retrieval question answering over a BM25 corpus index"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // index build
    auto* index_cmd = app.add_subcommand("index", "Inverted index operations");
    index_cmd->require_subcommand(1);
    auto* index_build = index_cmd->add_subcommand("build", "Build and save a BM25 index");
    std::string ib_corpus, ib_out;
    std::optional<double> ib_k1, ib_b;
    CommonOpts ib_common;
    index_build->add_option("--corpus", ib_corpus, "Corpus JSONL file")->required();
    index_build->add_option("--out", ib_out, "Index snapshot path")->required();
    index_build->add_option("--k1", ib_k1, "BM25 k1 (default 1.2)");
    index_build->add_option("--b", ib_b, "BM25 b (default 0.75)");
    add_common(index_build, ib_common);

    // label run / label balance
    auto* label_cmd = app.add_subcommand("label", "Complexity labeling pipeline");
    label_cmd->require_subcommand(1);
    auto* label_run = label_cmd->add_subcommand("run", "Label a dataset by running all strategies");
    std::string lr_corpus, lr_index, lr_dataset, lr_dataset_name, lr_out, lr_checkpoint;
    CommonOpts lr_common;
    label_run->add_option("--corpus", lr_corpus, "Corpus JSONL file")->required();
    label_run->add_option("--index", lr_index, "Prebuilt index snapshot (else built on the fly)");
    label_run->add_option("--dataset", lr_dataset, "QA JSONL file")->required();
    label_run->add_option("--dataset-name", lr_dataset_name, "Dataset tag for the rows");
    label_run->add_option("--out", lr_out, "Labeled output JSONL")->required();
    label_run->add_option("--checkpoint", lr_checkpoint, "Checkpoint file for resumable labeling");
    add_common(label_run, lr_common);

    auto* label_balance = label_cmd->add_subcommand("balance", "Balance a labeled dataset");
    std::string lb_in, lb_synonyms, lb_out;
    CommonOpts lb_common;
    label_balance->add_option("--in", lb_in, "Labeled QA JSONL")->required();
    label_balance->add_option("--synonyms", lb_synonyms, "Synonym map JSON file")->required();
    label_balance->add_option("--out", lb_out, "Balanced output JSONL")->required();
    add_common(label_balance, lb_common);

    // classifier train / eval
    auto* clf_cmd = app.add_subcommand("classifier", "Built-in question classifier");
    clf_cmd->require_subcommand(1);
    auto* clf_train = clf_cmd->add_subcommand("train", "Train the built-in classifier");
    std::string ct_train, ct_out;
    int ct_epochs = 30;
    CommonOpts ct_common;
    clf_train->add_option("--train", ct_train, "Labeled QA JSONL")->required();
    clf_train->add_option("--out", ct_out, "Model output path")->required();
    clf_train->add_option("--epochs", ct_epochs, "Training epochs (default 30)");
    add_common(clf_train, ct_common);

    auto* clf_eval = clf_cmd->add_subcommand("eval", "Evaluate a trained classifier");
    std::string ce_model, ce_test, ce_out, ce_name = "builtin";
    clf_eval->add_option("--model", ce_model, "Model path")->required();
    clf_eval->add_option("--test", ce_test, "Labeled QA JSONL")->required();
    clf_eval->add_option("--out", ce_out, "Write the report here instead of stdout");
    clf_eval->add_option("--name", ce_name, "Model display name");

    // eval run
    auto* eval_cmd = app.add_subcommand("eval", "Evaluation runs");
    eval_cmd->require_subcommand(1);
    auto* eval_run = eval_cmd->add_subcommand("run", "Run a dataset through a method");
    std::string er_method, er_corpus, er_index, er_dataset, er_dataset_name, er_out;
    std::string er_model_name, er_classifier_model, er_fixed_label, er_partial, er_resume;
    CommonOpts er_common;
    eval_run->add_option("--method", er_method, "none|single|multi|adaptive")->required();
    eval_run->add_option("--corpus", er_corpus, "Corpus JSONL file");
    eval_run->add_option("--index", er_index, "Prebuilt index snapshot");
    eval_run->add_option("--dataset", er_dataset, "QA JSONL file")->required();
    eval_run->add_option("--dataset-name", er_dataset_name, "Dataset tag");
    eval_run->add_option("--out", er_out, "Run JSON output path");
    eval_run->add_option("--model-name", er_model_name, "Model name for the report row");
    eval_run->add_option("--classifier-model", er_classifier_model,
                         "Built-in classifier model (adaptive)");
    eval_run->add_option("--fixed-label", er_fixed_label, "Route every question as A, B or C");
    eval_run->add_option("--partial", er_partial, "Persist partial records here on abort");
    eval_run->add_option("--resume", er_resume, "Resume from a partial-run file");
    add_common(eval_run, er_common);

    // report
    auto* report_cmd = app.add_subcommand("report", "Render saved runs as a table");
    std::vector<std::string> rp_runs;
    std::string rp_format = "markdown", rp_out;
    report_cmd->add_option("--run", rp_runs, "Run JSON file (repeatable)")->required();
    report_cmd->add_option("--format", rp_format, "markdown|csv|json");
    report_cmd->add_option("--out", rp_out, "Write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message and usage hint to stderr
        return 2;
    }

    try {
        if (index_build->parsed()) {
            return run_index_build(ib_corpus, ib_out, ib_common, ib_k1, ib_b);
        }
        if (label_run->parsed()) {
            return run_label(lr_corpus, lr_index, lr_dataset, lr_dataset_name, lr_out,
                             lr_checkpoint, lr_common);
        }
        if (label_balance->parsed()) {
            return run_balance(lb_in, lb_synonyms, lb_out, lb_common);
        }
        if (clf_train->parsed()) {
            return run_train(ct_train, ct_out, ct_epochs, ct_common);
        }
        if (clf_eval->parsed()) {
            return run_classifier_eval(ce_model, ce_test, ce_out, ce_name);
        }
        if (eval_run->parsed()) {
            return run_eval(er_method, er_corpus, er_index, er_dataset, er_dataset_name, er_out,
                            er_model_name, er_classifier_model, er_fixed_label, er_partial,
                            er_resume, er_common);
        }
        if (report_cmd->parsed()) {
            return run_report(rp_runs, rp_format, rp_out);
        }
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
