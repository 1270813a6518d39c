#include <doctest.h>

#include <sstream>

#include "adarag/router.hpp"
#include "helpers.hpp"

using namespace adarag;

namespace {

struct Fixture {
    corpus::CorpusHandle docs;
    bm25::InvertedIndex index;

    Fixture() {
        std::istringstream in(
            R"({"id":"d1","title":"","text":"apel merah"})"
            "\n"
            R"({"id":"d2","title":"","text":"jeruk manis"})"
            "\n");
        docs = corpus::ingest_corpus(in);
        index = bm25::build_index(docs);
    }
};

llm::GenParams params() {
    llm::GenParams p;
    p.model = "scripted";
    p.max_retries = 0;
    return p;
}

}  // namespace

TEST_CASE("route maps labels onto strategies") {
    routing::FixedClassifier a(ComplexityLabel::A);
    routing::FixedClassifier b(ComplexityLabel::B);
    routing::FixedClassifier c(ComplexityLabel::C);
    routing::RouterConfig cfg;

    cfg.classifier = &a;
    CHECK(routing::route("q", cfg) == StrategyKind::non_retrieval);
    cfg.classifier = &b;
    CHECK(routing::route("q", cfg) == StrategyKind::single_retrieval);
    cfg.classifier = &c;
    CHECK(routing::route("q", cfg) == StrategyKind::multi_retrieval);
}

TEST_CASE("classifier failure falls back with a diagnostic") {
    routing::RemoteClassifier dead("http://127.0.0.1:1", std::chrono::milliseconds(200));
    routing::RouterConfig cfg;
    cfg.classifier = &dead;
    auto decision = routing::route_decision("q", cfg);
    CHECK(decision.strategy == StrategyKind::single_retrieval);
    CHECK_FALSE(decision.prediction.has_value());
    CHECK(decision.note.find("classifier failed") != std::string::npos);
    CHECK(decision.note.rfind(routing::kRouterNotePrefix, 0) == 0);

    cfg.fallback_strategy = StrategyKind::non_retrieval;
    CHECK(routing::route("q", cfg) == StrategyKind::non_retrieval);
}

TEST_CASE("answer_adaptive composes the routed strategy with a router head") {
    Fixture fx;
    routing::FixedClassifier fixed_a(ComplexityLabel::A);
    routing::RouterConfig cfg;
    cfg.classifier = &fixed_a;

    llm::ScriptedGateway gw({llm::reply_any("X")});
    auto ex = testutil::qa("q1", "apel?", {"X"});
    auto trace = routing::answer_adaptive(ex, fx.index, fx.docs, gw, cfg, params());
    CHECK(trace.strategy == StrategyKind::non_retrieval);
    CHECK(trace.retrieval_count == 0);
    CHECK(trace.answer == "X");
    REQUIRE(!trace.reasoning.empty());
    CHECK(trace.reasoning[0].rfind(routing::kRouterNotePrefix, 0) == 0);
    CHECK(trace.reasoning[0].find("label=A") != std::string::npos);
    CHECK(trace.reasoning[0].find("p[A]=1.000000") != std::string::npos);
}

TEST_CASE("adaptive trace equals the pure strategy trace minus the router head") {
    Fixture fx;
    auto ex = testutil::qa("q1", "apel?", {"merah"});

    for (auto label : {ComplexityLabel::A, ComplexityLabel::B, ComplexityLabel::C}) {
        routing::FixedClassifier fixed(label);
        routing::RouterConfig cfg;
        cfg.classifier = &fixed;
        cfg.single_k = 2;
        cfg.multi.per_step_k = 2;

        const auto make_script = [] {
            return std::vector<llm::ScriptEntry>{llm::reply_any("Jawaban: merah")};
        };

        llm::ScriptedGateway gw_adaptive(make_script());
        auto adaptive = routing::answer_adaptive(ex, fx.index, fx.docs, gw_adaptive, cfg, params());

        llm::ScriptedGateway gw_pure(make_script());
        strategy::AnswerTrace pure;
        switch (label) {
            case ComplexityLabel::A:
                pure = strategy::answer_non_retrieval(ex, gw_pure, params());
                break;
            case ComplexityLabel::B:
                pure = strategy::answer_single_retrieval(ex, fx.index, fx.docs, gw_pure, 2,
                                                         params());
                break;
            case ComplexityLabel::C:
                pure = strategy::answer_multi_retrieval(ex, fx.index, fx.docs, gw_pure,
                                                        cfg.multi, params());
                break;
        }

        CHECK(adaptive.strategy == pure.strategy);
        CHECK(adaptive.answer == pure.answer);
        CHECK(adaptive.retrieval_count == pure.retrieval_count);
        CHECK(adaptive.cycles == pure.cycles);
        CHECK(adaptive.retrieved_doc_ids == pure.retrieved_doc_ids);
        REQUIRE(!adaptive.reasoning.empty());
        std::vector<std::string> tail(adaptive.reasoning.begin() + 1, adaptive.reasoning.end());
        CHECK(tail == pure.reasoning);
    }
}

TEST_CASE("adaptive step counts stay within the multi cycle bound") {
    Fixture fx;
    routing::FixedClassifier fixed_c(ComplexityLabel::C);
    routing::RouterConfig cfg;
    cfg.classifier = &fixed_c;

    llm::ScriptEntry nostop;
    nostop.response = "kata kunci lagi";
    nostop.repeat = -1;
    llm::ScriptedGateway gw({nostop});
    auto ex = testutil::qa("q1", "apel?", {"merah"});
    auto trace = routing::answer_adaptive(ex, fx.index, fx.docs, gw, cfg, params());
    CHECK(trace.retrieval_count >= 0);
    CHECK(trace.retrieval_count <= cfg.multi.max_cycles);
    CHECK(trace.retrieval_count == 5);
}

TEST_CASE("router requires a classifier") {
    routing::RouterConfig cfg;
    CHECK_THROWS_AS(routing::route("q", cfg), ContractError);
}
