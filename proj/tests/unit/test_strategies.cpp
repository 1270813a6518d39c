#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "adarag/rng.hpp"
#include "adarag/strategies.hpp"
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
            R"({"id":"d2","title":"","text":"apel apel hijau"})"
            "\n"
            R"({"id":"d3","title":"","text":"jeruk manis"})"
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

QAExample question(const std::string& text) { return testutil::qa("q1", text, {"gold"}); }

}  // namespace

TEST_CASE("non-retrieval passes the reply through and never touches the index") {
    llm::ScriptedGateway gw({llm::reply_any("Soekarno")});
    auto trace = strategy::answer_non_retrieval(question("Siapa presiden pertama?"), gw, params());
    CHECK(trace.answer == "Soekarno");
    CHECK(trace.strategy == StrategyKind::non_retrieval);
    CHECK(trace.retrieval_count == 0);
    CHECK(trace.cycles == 0);
    CHECK(trace.retrieved_doc_ids.empty());
    CHECK_FALSE(trace.error.has_value());
}

TEST_CASE("non-retrieval prompt carries the short-answer instruction") {
    llm::ScriptedGateway gw({llm::reply_when("Berikan jawaban yang singkat.", "ya")});
    auto trace = strategy::answer_non_retrieval(question("Siapa?"), gw, params());
    CHECK(trace.answer == "ya");  // matcher proves the instruction was in the prompt
}

TEST_CASE("non-retrieval absorbs gateway failures into the trace") {
    llm::ScriptEntry fail;
    fail.kind = llm::ScriptEntry::Kind::transport_error;
    fail.repeat = -1;
    llm::ScriptedGateway gw({fail});
    auto trace = strategy::answer_non_retrieval(question("Siapa?"), gw, params());
    CHECK(trace.answer == "");
    REQUIRE(trace.error.has_value());
    CHECK(trace.retrieval_count == 0);
}

TEST_CASE("single retrieval records hits in rank order") {
    Fixture fx;
    llm::ScriptedGateway gw({llm::reply_any("merah")});
    auto trace = strategy::answer_single_retrieval(question("apel"), fx.index, fx.docs, gw, 2,
                                                   params());
    CHECK(trace.answer == "merah");
    CHECK(trace.strategy == StrategyKind::single_retrieval);
    CHECK(trace.retrieval_count == 1);
    CHECK(trace.retrieved_doc_ids == std::vector<std::string>{"d2", "d1"});
    CHECK_FALSE(trace.error.has_value());
}

TEST_CASE("single retrieval with no hits degrades to the no-context prompt") {
    Fixture fx;
    // the matcher proves no context block is present
    llm::ScriptedGateway gw({llm::reply_when("Berikan jawaban yang singkat.", "tanpa konteks")});
    auto trace = strategy::answer_single_retrieval(question("pisang"), fx.index, fx.docs, gw, 3,
                                                   params());
    CHECK(trace.retrieval_count == 1);  // an empty retrieval still counts as one operation
    CHECK(trace.retrieved_doc_ids.empty());
    CHECK(trace.answer == "tanpa konteks");
    REQUIRE(!trace.reasoning.empty());
    CHECK(trace.reasoning[0].find("no documents retrieved") != std::string::npos);
}

TEST_CASE("single retrieval absorbs gateway failure after searching") {
    Fixture fx;
    llm::ScriptEntry fail;
    fail.kind = llm::ScriptEntry::Kind::transport_error;
    fail.repeat = -1;
    llm::ScriptedGateway gw({fail});
    auto trace = strategy::answer_single_retrieval(question("apel"), fx.index, fx.docs, gw, 2,
                                                   params());
    CHECK(trace.answer == "");
    CHECK(trace.error.has_value());
    CHECK(trace.retrieval_count == 1);
}

TEST_CASE("multi retrieval terminates on the keyword at cycle one") {
    Fixture fx;
    llm::ScriptedGateway gw({llm::reply_any("Jawaban: Paris")});
    strategy::MultiConfig cfg;
    auto trace = strategy::answer_multi_retrieval(question("apel"), fx.index, fx.docs, gw, cfg,
                                                  params());
    CHECK(trace.cycles == 1);
    CHECK(trace.retrieval_count == 1);
    CHECK(trace.answer == "Paris");
    CHECK(trace.reasoning.size() == 1);
}

TEST_CASE("multi retrieval runs the full cycle budget without the keyword") {
    Fixture fx;
    llm::ScriptEntry keywordless;
    keywordless.response = "kata kunci: apel hijau";
    keywordless.repeat = -1;
    llm::ScriptedGateway gw({keywordless});
    strategy::MultiConfig cfg;  // max_cycles 5
    auto trace = strategy::answer_multi_retrieval(question("apel"), fx.index, fx.docs, gw, cfg,
                                                  params());
    CHECK(trace.cycles == 5);
    CHECK(trace.retrieval_count == 5);
    CHECK(trace.reasoning.size() == 5);
    // fallback answer: the whole last reasoning output, trimmed
    CHECK(trace.answer == "kata kunci: apel hijau");
    CHECK(gw.calls() == 5);
}

TEST_CASE("multi retrieval uses the latest reasoning as the next query") {
    Fixture fx;
    // cycle 1 answers with a new query steering retrieval to jeruk; the
    // second reason-step prompt must therefore include d3.
    llm::ScriptedGateway gw({
        llm::reply_any("jeruk manis segar"),
        llm::reply_when("jeruk manis", "Jadi, Jawaban: 1804"),
    });
    strategy::MultiConfig cfg;
    cfg.per_step_k = 1;
    auto trace = strategy::answer_multi_retrieval(question("apel"), fx.index, fx.docs, gw, cfg,
                                                  params());
    CHECK(trace.cycles == 2);
    CHECK(trace.retrieval_count == 2);
    CHECK(trace.answer == "1804");
    // first-retrieval order, deduplicated: apel doc then jeruk doc
    CHECK(trace.retrieved_doc_ids == std::vector<std::string>{"d2", "d3"});
}

TEST_CASE("multi retrieval deduplicates repeatedly retrieved documents") {
    Fixture fx;
    llm::ScriptedGateway gw({
        llm::reply_any("apel apel"),          // same docs again next cycle
        llm::reply_any("Jawaban: apel"),
    });
    strategy::MultiConfig cfg;
    cfg.per_step_k = 2;
    auto trace = strategy::answer_multi_retrieval(question("apel"), fx.index, fx.docs, gw, cfg,
                                                  params());
    CHECK(trace.cycles == 2);
    CHECK(trace.retrieved_doc_ids == std::vector<std::string>{"d2", "d1"});
}

TEST_CASE("multi retrieval stops querying the index after the terminating cycle") {
    Fixture fx;
    llm::ScriptedGateway gw({llm::reply_any("Jawaban: cukup")});
    strategy::MultiConfig cfg;
    fx.index.reset_search_count();
    auto trace = strategy::answer_multi_retrieval(question("apel"), fx.index, fx.docs, gw, cfg,
                                                  params());
    CHECK(trace.cycles == 1);
    CHECK(fx.index.search_count() == 1);
}

TEST_CASE("multi retrieval keeps partial reasoning when the gateway dies mid-loop") {
    Fixture fx;
    llm::ScriptEntry fail;
    fail.kind = llm::ScriptEntry::Kind::transport_error;
    fail.repeat = -1;
    llm::ScriptedGateway gw({llm::reply_any("kata kunci apel"), fail});
    strategy::MultiConfig cfg;
    auto trace = strategy::answer_multi_retrieval(question("apel"), fx.index, fx.docs, gw, cfg,
                                                  params());
    CHECK(trace.answer == "");
    REQUIRE(trace.error.has_value());
    CHECK(trace.reasoning.size() == 1);
    CHECK(trace.cycles == 2);
    CHECK(trace.retrieval_count == 2);
}

TEST_CASE("detect_termination is a case-insensitive substring check") {
    CHECK(strategy::detect_termination("Jawaban: X", "Jawaban"));
    CHECK(strategy::detect_termination("jawabannya adalah X", "Jawaban"));
    CHECK(strategy::detect_termination("JAWABAN - X", "Jawaban"));
    CHECK_FALSE(strategy::detect_termination("Kata kunci: Armenia, kontes 2015", "Jawaban"));
    CHECK_FALSE(strategy::detect_termination("", "Jawaban"));
}

TEST_CASE("extract_final_answer follows the colon and line rules") {
    CHECK(strategy::extract_final_answer("Jawaban: Paris", "Jawaban") == "Paris");
    CHECK(strategy::extract_final_answer("Langkah 1... Jawaban: 25 Desember 1991.", "Jawaban") ==
          "25 Desember 1991.");
    CHECK(strategy::extract_final_answer("tidak cukup informasi", "Jawaban") ==
          "tidak cukup informasi");
    // inflection suffix before the colon
    CHECK(strategy::extract_final_answer("Jawabannya: Soekarno", "Jawaban") == "Soekarno");
    // no colon: the rest of the text from the keyword's line start
    CHECK(strategy::extract_final_answer("Langkah 1.\njawaban mungkin Paris", "Jawaban") ==
          "jawaban mungkin Paris");
    // colon answer is cut at the end of its line
    CHECK(strategy::extract_final_answer("Jawaban: Paris\nLangkah lanjut", "Jawaban") == "Paris");
}

TEST_CASE("multi retrieval halts within the cycle bound for arbitrary scripts") {
    Fixture fx;
    rng::SplitMix64 gen(3);
    const std::vector<std::string> replies = {"Jawaban: a", "kata kunci b", "jeruk",
                                              "JAWABAN akhir", "tidak tahu"};
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<llm::ScriptEntry> script;
        for (int i = 0; i < 6; ++i) {
            script.push_back(llm::reply_any(replies[gen.bounded(replies.size())]));
        }
        llm::ScriptedGateway gw(script);
        strategy::MultiConfig cfg;
        auto trace = strategy::answer_multi_retrieval(question("apel"), fx.index, fx.docs, gw,
                                                      cfg, params());
        CHECK(trace.cycles >= 1);
        CHECK(trace.cycles <= cfg.max_cycles);
        CHECK(trace.cycles == trace.retrieval_count);
        // no duplicates in retrieved ids
        auto ids = trace.retrieved_doc_ids;
        std::sort(ids.begin(), ids.end());
        CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
    }
}
