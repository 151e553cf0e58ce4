#include "udseg/unicode.hpp"

#include <algorithm>

namespace udseg {

namespace {

struct CodepointRange {
    char32_t lo;
    char32_t hi;
};

#include "unicode_tables.inc"

template <std::size_t N>
bool in_ranges(const CodepointRange (&ranges)[N], char32_t cp) {
    auto it = std::upper_bound(ranges, ranges + N, cp,
                               [](char32_t v, const CodepointRange& r) { return v < r.lo; });
    return it != ranges && (it - 1)->hi >= cp;
}

}  // namespace

bool is_punctuation(char32_t cp) { return in_ranges(kPunctRanges, cp); }

bool is_whitespace(char32_t cp) { return in_ranges(kSpaceRanges, cp); }

std::vector<Codepoint> decode_utf8(std::string_view text) {
    std::vector<Codepoint> out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const unsigned char b0 = static_cast<unsigned char>(text[i]);
        std::size_t len = 0;
        char32_t cp = 0;
        if (b0 < 0x80) {
            len = 1;
            cp = b0;
        } else if ((b0 >> 5) == 0x6) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 >> 4) == 0xE) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 >> 3) == 0x1E) {
            len = 4;
            cp = b0 & 0x07;
        }
        bool ok = len > 0 && i + len <= text.size();
        for (std::size_t k = 1; ok && k < len; ++k) {
            const unsigned char bk = static_cast<unsigned char>(text[i + k]);
            if ((bk >> 6) != 0x2) {
                ok = false;
            } else {
                cp = (cp << 6) | (bk & 0x3F);
            }
        }
        if (ok && len == 2 && cp < 0x80) ok = false;
        if (ok && len == 3 && cp < 0x800) ok = false;
        if (ok && len == 4 && cp < 0x10000) ok = false;
        if (ok && (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) ok = false;
        if (!ok) {
            out.push_back({0xFFFD, i, 1});
            ++i;
        } else {
            out.push_back({cp, i, len});
            i += len;
        }
    }
    return out;
}

std::string encode_utf8(char32_t cp) {
    std::string s;
    if (cp < 0x80) {
        s += static_cast<char>(cp);
    } else if (cp < 0x800) {
        s += static_cast<char>(0xC0 | (cp >> 6));
        s += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        s += static_cast<char>(0xE0 | (cp >> 12));
        s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        s += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        s += static_cast<char>(0xF0 | (cp >> 18));
        s += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        s += static_cast<char>(0x80 | (cp & 0x3F));
    }
    return s;
}

std::size_t codepoint_count(std::string_view text) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < text.size();) {
        const unsigned char b = static_cast<unsigned char>(text[i]);
        if (b < 0x80 || (b >> 6) == 0x3) {
            // lead byte (ASCII or multibyte start)
            ++n;
            i += 1;
            while (i < text.size() && (static_cast<unsigned char>(text[i]) >> 6) == 0x2) ++i;
        } else {
            // stray continuation byte counts as one replacement unit
            ++n;
            ++i;
        }
    }
    return n;
}

}  // namespace udseg
