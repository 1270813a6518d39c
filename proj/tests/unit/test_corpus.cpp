#include <doctest.h>

#include <sstream>

#include "adarag/corpus.hpp"
#include "helpers.hpp"

using namespace adarag;

namespace {

std::istringstream stream(const std::string& s) { return std::istringstream(s); }

const char* kThreeDocs =
    R"({"id":"d1","title":"Apel","text":"apel merah"})"
    "\n"
    R"({"id":"d2","title":"","text":"apel apel hijau"})"
    "\n"
    R"({"id":"d3","title":"Jeruk","text":"jeruk manis"})"
    "\n";

}  // namespace

TEST_CASE("ingest_corpus counts well-formed lines") {
    auto in = stream(kThreeDocs);
    auto handle = corpus::ingest_corpus(in);
    CHECK(handle.doc_count() == 3);
    CHECK(handle.rejections().empty());
}

TEST_CASE("ingest_corpus empty stream yields an empty handle") {
    auto in = stream("");
    CHECK(corpus::ingest_corpus(in).doc_count() == 0);
}

TEST_CASE("ingest_corpus rejects duplicate ids naming the id") {
    auto in = stream(
        R"({"id":"d1","title":"","text":"a"})"
        "\n"
        R"({"id":"d1","title":"","text":"b"})"
        "\n");
    CHECK_THROWS_WITH_AS(corpus::ingest_corpus(in), doctest::Contains("d1"), IngestError);
}

TEST_CASE("ingest_corpus names the line of a malformed row") {
    auto in = stream(
        R"({"id":"d1","title":"","text":"a"})"
        "\n"
        "{not json\n");
    CHECK_THROWS_WITH_AS(corpus::ingest_corpus(in), doctest::Contains("line 2"), IngestError);

    auto in2 = stream(R"({"id":"d1","title":""})"
                      "\n");
    CHECK_THROWS_WITH_AS(corpus::ingest_corpus(in2), doctest::Contains("text"), IngestError);
}

TEST_CASE("ingest_corpus drops invalid-utf8 lines but keeps the file") {
    std::string bad_line = "{\"id\":\"dx\",\"title\":\"\",\"text\":\"bad \xFF\xFE\"}\n";
    auto in = stream(std::string(kThreeDocs) + bad_line);
    auto handle = corpus::ingest_corpus(in);
    CHECK(handle.doc_count() == 3);
    REQUIRE(handle.rejections().size() == 1);
    CHECK(handle.rejections()[0].line == 4);
}

TEST_CASE("get_document round-trips and reports unknown ids") {
    auto in = stream(kThreeDocs);
    auto handle = corpus::ingest_corpus(in);
    const auto& d2 = handle.get_document("d2");
    CHECK(d2.title == "");
    CHECK(d2.text == "apel apel hijau");
    CHECK_THROWS_AS(handle.get_document("zzz"), NotFoundError);
}

TEST_CASE("corpus ingestion is deterministic") {
    auto in1 = stream(kThreeDocs);
    auto in2 = stream(kThreeDocs);
    auto a = corpus::ingest_corpus(in1);
    auto b = corpus::ingest_corpus(in2);
    REQUIRE(a.doc_count() == b.doc_count());
    for (size_t i = 0; i < a.doc_count(); ++i) {
        CHECK(a.documents()[i].id == b.documents()[i].id);
        CHECK(a.documents()[i].text == b.documents()[i].text);
    }
}

TEST_CASE("ingest_qa_dataset keeps valid rows and rejects invariant violations") {
    auto in = stream(
        R"({"id":"q1","question":"Siapa?","answers":["Soekarno"]})"
        "\n"
        R"({"id":"q2","question":"Kapan?","answers":[]})"
        "\n"
        R"({"id":"q3","question":"","answers":["x"]})"
        "\n"
        R"({"id":"q4","question":"Dimana?","answers":["Jakarta","DKI"]})"
        "\n");
    auto result = corpus::ingest_qa_dataset(in, "indoqa");
    REQUIRE(result.examples.size() == 2);
    CHECK(result.examples[0].id == "q1");
    CHECK(result.examples[1].id == "q4");
    CHECK(result.examples[0].dataset == "indoqa");
    CHECK(result.rejections.size() == 2);
    // every row either made it or is listed in rejections
    CHECK(result.examples.size() + result.rejections.size() == 4);
}

TEST_CASE("ingest_qa_dataset errors when no valid rows remain") {
    auto empty = stream("");
    CHECK_THROWS_AS(corpus::ingest_qa_dataset(empty, "x"), IngestError);

    auto all_bad = stream(R"({"id":"q1","question":"","answers":["x"]})"
                          "\n");
    CHECK_THROWS_WITH_AS(corpus::ingest_qa_dataset(all_bad, "x"),
                         doctest::Contains("no valid rows"), IngestError);
}

TEST_CASE("ingest_qa_dataset parses optional labels and rejects bad ones") {
    auto in = stream(
        R"({"id":"q1","question":"a?","answers":["x"],"label":"B"})"
        "\n"
        R"({"id":"q2","question":"b?","answers":["y"],"label":"D"})"
        "\n");
    auto result = corpus::ingest_qa_dataset(in, "t");
    REQUIRE(result.examples.size() == 1);
    CHECK(result.examples[0].label == ComplexityLabel::B);
    CHECK(result.rejections.size() == 1);
}

TEST_CASE("qa round-trip through write_qa_dataset") {
    auto ex = testutil::qa("q9", "Apa itu?", {"sebuah hal", "hal"}, "qasina");
    ex.label = ComplexityLabel::C;
    std::ostringstream out;
    corpus::write_qa_dataset(out, {ex});
    auto in = stream(out.str());
    auto back = corpus::ingest_qa_dataset(in, "");
    REQUIRE(back.examples.size() == 1);
    CHECK(back.examples[0].id == "q9");
    CHECK(back.examples[0].question == "Apa itu?");
    CHECK(back.examples[0].answers == std::vector<std::string>{"sebuah hal", "hal"});
    CHECK(back.examples[0].dataset == "qasina");
    CHECK(back.examples[0].label == ComplexityLabel::C);
}

TEST_CASE("ingest_qa_dataset file errors") {
    CHECK_THROWS_AS(corpus::ingest_qa_dataset_file("/nonexistent/q.jsonl", "x"), IngestError);
}
