#ifndef UDSEG_UNICODE_HPP
#define UDSEG_UNICODE_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace udseg {

// One decoded Unicode scalar value and the byte span it occupies in the
// source string. Invalid UTF-8 bytes decode to U+FFFD one byte at a time.
struct Codepoint {
    char32_t value;
    std::size_t offset;  // byte offset in the source
    std::size_t length;  // byte length (>= 1)
};

std::vector<Codepoint> decode_utf8(std::string_view text);

std::string encode_utf8(char32_t cp);

// Unicode general category P*.
bool is_punctuation(char32_t cp);

// Unicode White_Space property.
bool is_whitespace(char32_t cp);

// Number of Unicode scalar values in a UTF-8 string.
std::size_t codepoint_count(std::string_view text);

}  // namespace udseg

#endif
