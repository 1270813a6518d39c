#pragma once

// The adaptive composition: classify a question's complexity, dispatch to
// the matching strategy (A -> non-retrieval, B -> single, C -> multi) and
// return the routed trace. Classifier failures fall back to a configured
// strategy (single retrieval by default — the strongest single method)
// with a diagnostic.
//
// The routing decision and classifier probabilities are recorded at the
// head of the trace's reasoning, prefixed with kRouterNotePrefix; the
// strategy-produced trace content is otherwise identical to a direct
// strategy invocation.

#include <memory>
#include <string>

#include "adarag/classifier.hpp"
#include "adarag/strategies.hpp"

namespace adarag::routing {

inline constexpr std::string_view kRouterNotePrefix = "router: ";

/// Complexity source used by the router.
class QuestionClassifier {
public:
    virtual ~QuestionClassifier() = default;
    virtual classifier::Prediction classify(const std::string& question) = 0;
};

/// Wraps the built-in linear model.
class BuiltinClassifier : public QuestionClassifier {
public:
    explicit BuiltinClassifier(classifier::LinearModel model) : model_(std::move(model)) {}
    classifier::Prediction classify(const std::string& question) override {
        return classifier::predict(model_, question);
    }
    const classifier::LinearModel& model() const { return model_; }

private:
    classifier::LinearModel model_;
};

/// Calls the remote classifier wire contract.
class RemoteClassifier : public QuestionClassifier {
public:
    RemoteClassifier(std::string endpoint, std::chrono::milliseconds timeout)
        : endpoint_(std::move(endpoint)), timeout_(timeout) {}
    classifier::Prediction classify(const std::string& question) override {
        return classifier::remote_predict(endpoint_, question, timeout_);
    }

private:
    std::string endpoint_;
    std::chrono::milliseconds timeout_;
};

/// Fixed-label override (probability 1 on the label).
class FixedClassifier : public QuestionClassifier {
public:
    explicit FixedClassifier(ComplexityLabel label) : label_(label) {}
    classifier::Prediction classify(const std::string&) override {
        classifier::Prediction p;
        p.label = label_;
        p.probs = {0.0, 0.0, 0.0};
        p.probs[static_cast<size_t>(label_)] = 1.0;
        return p;
    }

private:
    ComplexityLabel label_;
};

struct RouterConfig {
    QuestionClassifier* classifier = nullptr;  // required
    int single_k = 3;
    strategy::MultiConfig multi;
    StrategyKind fallback_strategy = StrategyKind::single_retrieval;
    llm::PromptOptions prompt;
};

struct RouteDecision {
    StrategyKind strategy;
    std::optional<classifier::Prediction> prediction;  // absent on fallback
    std::string note;                                  // the reasoning-head line
};

/// Total: classifier failures yield the fallback strategy.
RouteDecision route_decision(const std::string& question, const RouterConfig& cfg);

/// The label-to-strategy mapping alone.
StrategyKind route(const std::string& question, const RouterConfig& cfg);

strategy::AnswerTrace answer_adaptive(const QAExample& q, const bm25::InvertedIndex& index,
                                      const corpus::CorpusHandle& docs, llm::Gateway& gateway,
                                      const RouterConfig& cfg, const llm::GenParams& params);

}  // namespace adarag::routing
