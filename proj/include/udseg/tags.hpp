#ifndef UDSEG_TAGS_HPP
#define UDSEG_TAGS_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "udseg/conllu.hpp"

namespace udseg {

// Boundary tags. MB/MI/ME/MS are the overlined variants marking the spans
// of non-segmental multiword tokens; X marks units outside all tokens.
enum class Tag : std::uint8_t { B, I, E, S, X, MB, MI, ME, MS };

inline bool is_overlined(Tag t) { return t >= Tag::MB; }

// Debug spelling: overlined tags are written with a trailing '*'.
std::string_view tag_name(Tag t);
Tag tag_from_name(std::string_view name);

enum class UnitMode { Character, Syllable };

std::string_view unit_mode_name(UnitMode m);
UnitMode unit_mode_from_name(std::string_view name);

// The basic elements tags are predicted over: single Unicode scalars in
// character mode, space-delimited syllables with punctuation pre-split in
// syllable mode. Byte spans into `raw` make the original text recoverable.
struct UnitSequence {
    UnitMode mode = UnitMode::Character;
    std::string raw;
    std::vector<std::string> units;
    std::vector<std::pair<std::size_t, std::size_t>> spans;  // byte [begin, end)

    std::size_t size() const { return units.size(); }
};

UnitSequence unitize(std::string_view raw_text, UnitMode mode);

using TagSequence = std::vector<Tag>;

struct EncodeError : DataError {
    using DataError::DataError;
};

// Gold tags for a sentence over its unit sequence. The units must come
// from the sentence's reconstructed text.
TagSequence encode_tags(const Sentence& sentence, const UnitSequence& units);

// A decoded stretch of units: a word, or a non-segmental multiword token
// surface awaiting transduction.
struct Segment {
    std::string surface;
    std::size_t begin = 0;  // byte span in the raw text
    std::size_t end = 0;
    bool is_mwt = false;
};

struct DecodeResult {
    std::vector<Segment> segments;

    std::vector<std::string> words() const;
    std::vector<std::string> mwt_surfaces() const;
};

// Inverse of encoding. Invalid tag sequences are repaired first, so this
// never fails on equal-length input.
DecodeResult decode_tags(const UnitSequence& units, const TagSequence& tags);

// Deterministic left-to-right repair into a structurally valid sequence:
// I/E with no open span act as B/S, spans left open at X or end-of-input
// are closed on the previous unit, and a plain/overlined switch inside an
// open span closes it first. Idempotent.
TagSequence repair_tags(const TagSequence& tags);

// Debug text format: one 'unit<TAB>tag' line per unit and a blank line
// after the sentence.
std::string to_debug_text(const UnitSequence& units, const TagSequence& tags);

}  // namespace udseg

#endif
