#include "adarag/router.hpp"

#include <sstream>

namespace adarag::routing {

namespace {

StrategyKind strategy_for(ComplexityLabel label) {
    switch (label) {
        case ComplexityLabel::A: return StrategyKind::non_retrieval;
        case ComplexityLabel::B: return StrategyKind::single_retrieval;
        case ComplexityLabel::C: return StrategyKind::multi_retrieval;
    }
    return StrategyKind::single_retrieval;
}

std::string format_note(const classifier::Prediction& p, StrategyKind chosen) {
    std::ostringstream oss;
    oss.setf(std::ios::fixed);
    oss.precision(6);
    oss << kRouterNotePrefix << "label=" << label_to_char(p.label) << " p[A]=" << p.probs[0]
        << " p[B]=" << p.probs[1] << " p[C]=" << p.probs[2] << " -> " << strategy_name(chosen);
    return oss.str();
}

}  // namespace

RouteDecision route_decision(const std::string& question, const RouterConfig& cfg) {
    if (cfg.classifier == nullptr) throw ContractError("router: no classifier configured");
    RouteDecision decision;
    try {
        const auto prediction = cfg.classifier->classify(question);
        decision.strategy = strategy_for(prediction.label);
        decision.prediction = prediction;
        decision.note = format_note(prediction, decision.strategy);
    } catch (const std::runtime_error& e) {
        decision.strategy = cfg.fallback_strategy;
        decision.note = std::string(kRouterNotePrefix) + "classifier failed (" + e.what() +
                        "); fallback -> " + strategy_name(decision.strategy);
    }
    return decision;
}

StrategyKind route(const std::string& question, const RouterConfig& cfg) {
    return route_decision(question, cfg).strategy;
}

strategy::AnswerTrace answer_adaptive(const QAExample& q, const bm25::InvertedIndex& index,
                                      const corpus::CorpusHandle& docs, llm::Gateway& gateway,
                                      const RouterConfig& cfg, const llm::GenParams& params) {
    const auto decision = route_decision(q.question, cfg);

    strategy::AnswerTrace trace;
    switch (decision.strategy) {
        case StrategyKind::non_retrieval:
            trace = strategy::answer_non_retrieval(q, gateway, params, cfg.prompt);
            break;
        case StrategyKind::single_retrieval:
            trace = strategy::answer_single_retrieval(q, index, docs, gateway, cfg.single_k,
                                                      params, cfg.prompt);
            break;
        case StrategyKind::multi_retrieval:
            trace = strategy::answer_multi_retrieval(q, index, docs, gateway, cfg.multi, params,
                                                     cfg.prompt);
            break;
    }
    trace.reasoning.insert(trace.reasoning.begin(), decision.note);
    return trace;
}

}  // namespace adarag::routing
