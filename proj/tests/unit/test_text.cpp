#include <doctest.h>

#include "adarag/text.hpp"

using namespace adarag;

TEST_CASE("utf8 validation") {
    CHECK(text::is_valid_utf8("plain ascii"));
    CHECK(text::is_valid_utf8("caf\xC3\xA9"));
    CHECK(text::is_valid_utf8(""));
    CHECK_FALSE(text::is_valid_utf8("\xFF\xFE"));
    CHECK_FALSE(text::is_valid_utf8("broken \xC3"));          // truncated sequence
    CHECK_FALSE(text::is_valid_utf8("over \xC0\xAF long"));   // overlong encoding
    // A literal replacement character is still valid input.
    CHECK(text::is_valid_utf8("ok \xEF\xBF\xBD here"));
}

TEST_CASE("utf8 decode round-trips") {
    const std::string samples[] = {"a", "\xC3\xA9", "\xE2\x82\xAC", "\xF0\x9F\x99\x82"};
    for (const auto& s : samples) {
        size_t pos = 0;
        uint32_t cp = text::decode_utf8(s, pos);
        CHECK(pos == s.size());
        std::string back;
        text::encode_utf8(cp, back);
        CHECK(back == s);
    }
}

TEST_CASE("nfc composes combining marks in the latin subset") {
    // e + combining acute -> é
    CHECK(text::nfc_latin("caf\x65\xCC\x81") == "caf\xC3\xA9");
    // already composed text passes through
    CHECK(text::nfc_latin("caf\xC3\xA9") == "caf\xC3\xA9");
    // unknown mark combinations keep the mark
    const std::string odd = "x\xCC\xB1";  // combining macron below, no table entry
    CHECK(text::nfc_latin(odd) == odd);
}

TEST_CASE("trim and collapse") {
    CHECK(text::trim("  a b\t") == "a b");
    CHECK(text::trim("") == "");
    CHECK(text::trim_right(" x  \n") == " x");
    CHECK(text::collapse_whitespace("  a   b ") == "a b");
    CHECK(text::collapse_whitespace("a\n\tb") == "a b");
}

TEST_CASE("case-insensitive find") {
    CHECK(text::ifind("Jadi, Jawaban: X", "jawaban") == 6);
    CHECK(text::ifind("JAWABANNYA", "Jawaban") == 0);
    CHECK(text::ifind("kata kunci", "jawaban") == std::string_view::npos);
    CHECK(text::ifind("abc", "") == 0);
}
