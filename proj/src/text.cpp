#include "adarag/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace adarag::text {

uint32_t decode_utf8(std::string_view s, size_t& pos) {
    const auto byte = [&](size_t i) { return static_cast<uint8_t>(s[i]); };
    uint8_t b0 = byte(pos);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    size_t len = 0;
    uint32_t cp = 0;
    uint32_t min_cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2; cp = b0 & 0x1F; min_cp = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3; cp = b0 & 0x0F; min_cp = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4; cp = b0 & 0x07; min_cp = 0x10000;
    } else {
        ++pos;
        return kReplacementChar;
    }
    if (pos + len > s.size()) {
        ++pos;
        return kReplacementChar;
    }
    for (size_t i = 1; i < len; ++i) {
        uint8_t bi = byte(pos + i);
        if ((bi & 0xC0) != 0x80) {
            ++pos;
            return kReplacementChar;
        }
        cp = (cp << 6) | (bi & 0x3F);
    }
    // Overlong encodings, surrogates and out-of-range values are invalid.
    if (cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++pos;
        return kReplacementChar;
    }
    pos += len;
    return cp;
}

void encode_utf8(uint32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_valid_utf8(std::string_view s) {
    size_t pos = 0;
    while (pos < s.size()) {
        size_t before = pos;
        uint32_t cp = decode_utf8(s, pos);
        if (cp == kReplacementChar && !(pos - before == 3 && s.substr(before, 3) == "\xEF\xBF\xBD")) {
            return false;
        }
    }
    return true;
}

CharClass classify_codepoint(uint32_t cp) {
    if (cp < 0x80) {
        if (std::isalnum(static_cast<int>(cp))) return CharClass::word;
        if (std::isspace(static_cast<int>(cp))) return CharClass::space;
        return CharClass::punct_symbol;
    }
    // Combining diacritical marks.
    if (cp >= 0x0300 && cp <= 0x036F) return CharClass::mark;
    // Latin-1 punctuation/symbols and the multiplication/division signs.
    if (cp >= 0x00A0 && cp <= 0x00BF) return CharClass::punct_symbol;
    if (cp == 0x00D7 || cp == 0x00F7) return CharClass::punct_symbol;
    // General punctuation, supplemental punctuation, CJK symbols block.
    if (cp >= 0x2000 && cp <= 0x206F) {
        // U+2000..U+200A are spaces.
        if (cp <= 0x200A) return CharClass::space;
        return CharClass::punct_symbol;
    }
    if (cp >= 0x2070 && cp <= 0x2BFF) return CharClass::punct_symbol;  // symbols, arrows, math
    if (cp >= 0x2E00 && cp <= 0x2E7F) return CharClass::punct_symbol;
    if (cp >= 0x3000 && cp <= 0x303F) return cp == 0x3000 ? CharClass::space : CharClass::punct_symbol;
    if (cp == kReplacementChar) return CharClass::punct_symbol;
    return CharClass::word;
}

uint32_t to_lower(uint32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    // Latin-1: U+00C0..U+00DE map to +32, except the multiplication sign.
    if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 32;
    return cp;
}

namespace {

// Composition table: (base ASCII letter, combining mark) -> precomposed.
struct Composition {
    char base;
    uint32_t mark;
    uint32_t composed;
};

// Covers Latin-1 Supplement plus the c-caron/s-caron/z-caron family;
// enough for machine-translated Latin-script text.
constexpr std::array<Composition, 60> kCompositions{{
    {'A', 0x300, 0x00C0}, {'A', 0x301, 0x00C1}, {'A', 0x302, 0x00C2},
    {'A', 0x303, 0x00C3}, {'A', 0x308, 0x00C4}, {'A', 0x30A, 0x00C5},
    {'C', 0x327, 0x00C7}, {'C', 0x30C, 0x010C},
    {'E', 0x300, 0x00C8}, {'E', 0x301, 0x00C9}, {'E', 0x302, 0x00CA},
    {'E', 0x308, 0x00CB},
    {'I', 0x300, 0x00CC}, {'I', 0x301, 0x00CD}, {'I', 0x302, 0x00CE},
    {'I', 0x308, 0x00CF},
    {'N', 0x303, 0x00D1},
    {'O', 0x300, 0x00D2}, {'O', 0x301, 0x00D3}, {'O', 0x302, 0x00D4},
    {'O', 0x303, 0x00D5}, {'O', 0x308, 0x00D6},
    {'S', 0x30C, 0x0160},
    {'U', 0x300, 0x00D9}, {'U', 0x301, 0x00DA}, {'U', 0x302, 0x00DB},
    {'U', 0x308, 0x00DC},
    {'Y', 0x301, 0x00DD},
    {'Z', 0x30C, 0x017D},
    {'a', 0x300, 0x00E0}, {'a', 0x301, 0x00E1}, {'a', 0x302, 0x00E2},
    {'a', 0x303, 0x00E3}, {'a', 0x308, 0x00E4}, {'a', 0x30A, 0x00E5},
    {'c', 0x327, 0x00E7}, {'c', 0x30C, 0x010D},
    {'e', 0x300, 0x00E8}, {'e', 0x301, 0x00E9}, {'e', 0x302, 0x00EA},
    {'e', 0x308, 0x00EB},
    {'i', 0x300, 0x00EC}, {'i', 0x301, 0x00ED}, {'i', 0x302, 0x00EE},
    {'i', 0x308, 0x00EF},
    {'n', 0x303, 0x00F1},
    {'o', 0x300, 0x00F2}, {'o', 0x301, 0x00F3}, {'o', 0x302, 0x00F4},
    {'o', 0x303, 0x00F5}, {'o', 0x308, 0x00F6},
    {'s', 0x30C, 0x0161},
    {'u', 0x300, 0x00F9}, {'u', 0x301, 0x00FA}, {'u', 0x302, 0x00FB},
    {'u', 0x308, 0x00FC},
    {'y', 0x301, 0x00FD}, {'y', 0x308, 0x00FF},
    {'z', 0x30C, 0x017E},
}};

uint32_t compose(uint32_t base, uint32_t mark) {
    if (base >= 0x80) return 0;
    for (const auto& c : kCompositions) {
        if (static_cast<uint32_t>(c.base) == base && c.mark == mark) return c.composed;
    }
    return 0;
}

}  // namespace

std::string nfc_latin(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::vector<uint32_t> cps;
    size_t pos = 0;
    while (pos < s.size()) cps.push_back(decode_utf8(s, pos));
    for (size_t i = 0; i < cps.size(); ++i) {
        uint32_t cp = cps[i];
        while (i + 1 < cps.size()) {
            uint32_t composed = compose(cp, cps[i + 1]);
            if (composed == 0) break;
            cp = composed;
            ++i;
        }
        encode_utf8(cp, out);
    }
    return out;
}

std::string trim(std::string_view s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string trim_right(std::string_view s) {
    size_t e = s.size();
    while (e > 0 && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(0, e));
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = false;
    for (char ch : s) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out.push_back(' ');
        in_space = false;
        out.push_back(ch);
    }
    return out;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

size_t ifind(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return 0;
    if (needle.size() > haystack.size()) return std::string_view::npos;
    const auto lower = [](unsigned char c) { return std::tolower(c); };
    for (size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        size_t j = 0;
        while (j < needle.size() &&
               lower(static_cast<unsigned char>(haystack[i + j])) ==
                   lower(static_cast<unsigned char>(needle[j]))) {
            ++j;
        }
        if (j == needle.size()) return i;
    }
    return std::string_view::npos;
}

}  // namespace adarag::text
