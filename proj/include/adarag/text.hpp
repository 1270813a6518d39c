#pragma once

// UTF-8 text helpers shared by tokenization, query preprocessing and
// answer normalization. Classification is table-free: ASCII is exact;
// non-ASCII codepoints are word characters unless they fall in the
// common punctuation/symbol blocks listed in classify_codepoint().
// Case folding covers ASCII and the Latin-1 letter range, which is all
// the corpora here use.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace adarag::text {

inline constexpr uint32_t kReplacementChar = 0xFFFD;

/// Decodes one UTF-8 sequence starting at `pos`. Advances `pos` past the
/// sequence (always at least one byte). Invalid sequences decode to
/// kReplacementChar one byte at a time.
uint32_t decode_utf8(std::string_view s, size_t& pos);

/// Appends the UTF-8 encoding of `cp` to `out`.
void encode_utf8(uint32_t cp, std::string& out);

/// True iff `s` is well-formed UTF-8.
bool is_valid_utf8(std::string_view s);

enum class CharClass {
    word,         // letters and digits; contributes to tokens
    mark,         // combining marks (kept attached, never split on)
    punct_symbol, // punctuation and symbols
    space,        // whitespace
};

CharClass classify_codepoint(uint32_t cp);

/// Lowercases ASCII A-Z and the Latin-1 uppercase letters; other
/// codepoints pass through.
uint32_t to_lower(uint32_t cp);

/// Canonical composition (NFC) for the Latin subset: a base ASCII letter
/// followed by a combining diacritical mark in U+0300..U+0327 composes
/// into the precomposed Latin-1 / Latin Extended-A letter when one
/// exists. Marks with no composition stay as-is.
std::string nfc_latin(std::string_view s);

/// Trims ASCII whitespace from both ends.
std::string trim(std::string_view s);

/// Trims trailing ASCII whitespace only.
std::string trim_right(std::string_view s);

/// Collapses runs of ASCII whitespace to one space and trims the ends.
std::string collapse_whitespace(std::string_view s);

/// ASCII-lowercased copy (bytewise; multibyte sequences untouched).
std::string ascii_lower(std::string_view s);

/// Case-insensitive (ASCII fold) substring search; npos when absent.
size_t ifind(std::string_view haystack, std::string_view needle);

}  // namespace adarag::text
