#include "udseg/tags.hpp"

#include <stdexcept>

#include "udseg/unicode.hpp"

namespace udseg {

namespace {

constexpr std::string_view kTagNames[] = {"B", "I", "E", "S", "X", "B*", "I*", "E*", "S*"};

Tag make_tag(char base, bool overlined) {
    switch (base) {
        case 'B': return overlined ? Tag::MB : Tag::B;
        case 'I': return overlined ? Tag::MI : Tag::I;
        case 'E': return overlined ? Tag::ME : Tag::E;
        case 'S': return overlined ? Tag::MS : Tag::S;
        default: throw std::logic_error("make_tag: bad base");
    }
}

char base_of(Tag t) {
    switch (t) {
        case Tag::B:
        case Tag::MB: return 'B';
        case Tag::I:
        case Tag::MI: return 'I';
        case Tag::E:
        case Tag::ME: return 'E';
        case Tag::S:
        case Tag::MS: return 'S';
        case Tag::X: return 'X';
    }
    return '?';
}

}  // namespace

std::string_view tag_name(Tag t) { return kTagNames[static_cast<std::size_t>(t)]; }

Tag tag_from_name(std::string_view name) {
    for (std::size_t i = 0; i < 9; ++i)
        if (kTagNames[i] == name) return static_cast<Tag>(i);
    throw DataError("unknown tag name '" + std::string(name) + "'");
}

std::string_view unit_mode_name(UnitMode m) {
    return m == UnitMode::Character ? "character" : "syllable";
}

UnitMode unit_mode_from_name(std::string_view name) {
    if (name == "character") return UnitMode::Character;
    if (name == "syllable") return UnitMode::Syllable;
    throw DataError("unknown unit mode '" + std::string(name) + "'");
}

UnitSequence unitize(std::string_view raw_text, UnitMode mode) {
    UnitSequence out;
    out.mode = mode;
    out.raw = std::string(raw_text);
    const auto cps = decode_utf8(raw_text);
    if (mode == UnitMode::Character) {
        out.units.reserve(cps.size());
        for (const auto& cp : cps) {
            out.units.push_back(out.raw.substr(cp.offset, cp.length));
            out.spans.emplace_back(cp.offset, cp.offset + cp.length);
        }
        return out;
    }
    // Syllable mode: whitespace separates groups; leading/trailing
    // punctuation of each group becomes its own unit.
    std::size_t i = 0;
    auto push_units = [&](std::size_t cb, std::size_t ce) {
        out.units.push_back(out.raw.substr(cps[cb].offset,
                                           cps[ce - 1].offset + cps[ce - 1].length -
                                               cps[cb].offset));
        out.spans.emplace_back(cps[cb].offset, cps[ce - 1].offset + cps[ce - 1].length);
    };
    while (i < cps.size()) {
        if (is_whitespace(cps[i].value)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < cps.size() && !is_whitespace(cps[j].value)) ++j;
        std::size_t lo = i, hi = j;  // [lo, hi) codepoints of the group
        while (lo < hi && is_punctuation(cps[lo].value)) {
            push_units(lo, lo + 1);
            ++lo;
        }
        std::size_t trail = hi;
        while (trail > lo && is_punctuation(cps[trail - 1].value)) --trail;
        if (lo < trail) push_units(lo, trail);
        for (std::size_t k = trail; k < hi; ++k) push_units(k, k + 1);
        i = j;
    }
    return out;
}

TagSequence encode_tags(const Sentence& sentence, const UnitSequence& units) {
    const std::string& raw = units.raw;
    TagSequence tags(units.size(), Tag::X);

    // byte offset -> unit index, for aligning token spans to units
    auto unit_starting_at = [&](std::size_t byte, std::size_t hint) {
        for (std::size_t u = hint; u < units.spans.size(); ++u) {
            if (units.spans[u].first == byte) return u;
            if (units.spans[u].first > byte) break;
        }
        return units.spans.size();
    };

    const auto cps = decode_utf8(raw);
    auto skip_whitespace = [&](std::size_t byte) {
        for (const auto& cp : cps) {
            if (cp.offset < byte) continue;
            if (!is_whitespace(cp.value)) return cp.offset;
        }
        return raw.size();
    };

    std::size_t pos = 0;
    std::size_t unit_hint = 0;
    for (std::size_t ti = 0; ti < sentence.tokens.size(); ++ti) {
        const Token& tok = sentence.tokens[ti];
        std::size_t at = skip_whitespace(pos);
        if (raw.compare(at, tok.form.size(), tok.form) != 0) {
            // tolerate stray material outside tokens; it stays tagged X
            at = raw.find(tok.form, at);
            if (at == std::string::npos)
                throw EncodeError("token " + std::to_string(ti + 1) + " '" + tok.form +
                                  "' not found in raw text");
        }
        const std::size_t t_end = at + tok.form.size();

        std::size_t u_first = unit_starting_at(at, unit_hint);
        if (u_first == units.size())
            throw EncodeError("token " + std::to_string(ti + 1) + " '" + tok.form +
                              "' does not start on a unit boundary");
        std::size_t u_last = u_first;
        while (u_last + 1 < units.size() && units.spans[u_last + 1].second <= t_end &&
               units.spans[u_last + 1].first >= at)
            ++u_last;
        if (units.spans[u_last].second != t_end)
            throw EncodeError("token " + std::to_string(ti + 1) + " '" + tok.form +
                              "' does not end on a unit boundary");

        if (tok.is_non_segmental_mwt()) {
            if (u_first == u_last) {
                tags[u_first] = Tag::MS;
            } else {
                tags[u_first] = Tag::MB;
                for (std::size_t u = u_first + 1; u < u_last; ++u) tags[u] = Tag::MI;
                tags[u_last] = Tag::ME;
            }
        } else {
            // plain token or segmental multiword token: tag each word span
            std::size_t w_begin = at;
            std::size_t u = u_first;
            for (const std::string& w : tok.word_forms) {
                const std::size_t w_end = w_begin + w.size();
                if (u > u_last || units.spans[u].first != w_begin)
                    throw EncodeError("token " + std::to_string(ti + 1) + " '" + tok.form +
                                      "': word '" + w + "' does not start on a unit boundary");
                std::size_t wu_first = u;
                while (u <= u_last && units.spans[u].second <= w_end) ++u;
                if (u == wu_first)
                    throw EncodeError("token " + std::to_string(ti + 1) + " '" + tok.form +
                                      "': word '" + w + "' splits a unit");
                const std::size_t wu_last = u - 1;
                if (units.spans[wu_last].second != w_end)
                    throw EncodeError("token " + std::to_string(ti + 1) + " '" + tok.form +
                                      "': word '" + w + "' does not end on a unit boundary");
                if (wu_first == wu_last) {
                    tags[wu_first] = Tag::S;
                } else {
                    tags[wu_first] = Tag::B;
                    for (std::size_t k = wu_first + 1; k < wu_last; ++k) tags[k] = Tag::I;
                    tags[wu_last] = Tag::E;
                }
                w_begin = w_end;
            }
        }
        pos = t_end;
        unit_hint = u_last + 1;
    }
    return tags;
}

TagSequence repair_tags(const TagSequence& tags) {
    TagSequence out;
    out.reserve(tags.size());
    bool open = false;
    bool open_ovl = false;
    std::size_t open_start = 0;

    auto close_open = [&]() {
        if (!open) return;
        const std::size_t last = out.size() - 1;
        if (last == open_start)
            out[last] = open_ovl ? Tag::MS : Tag::S;
        else
            out[last] = open_ovl ? Tag::ME : Tag::E;
        open = false;
    };

    for (Tag t : tags) {
        if (t == Tag::X) {
            close_open();
            out.push_back(Tag::X);
            continue;
        }
        const bool ovl = is_overlined(t);
        if (open && ovl != open_ovl) close_open();
        const char base = base_of(t);
        if (!open) {
            if (base == 'B' || base == 'I') {
                out.push_back(make_tag('B', ovl));
                open = true;
                open_ovl = ovl;
                open_start = out.size() - 1;
            } else {
                out.push_back(make_tag('S', ovl));
            }
        } else {
            switch (base) {
                case 'I': out.push_back(make_tag('I', ovl)); break;
                case 'E':
                    out.push_back(make_tag('E', ovl));
                    open = false;
                    break;
                case 'B':
                    close_open();
                    out.push_back(make_tag('B', ovl));
                    open = true;
                    open_ovl = ovl;
                    open_start = out.size() - 1;
                    break;
                case 'S':
                    close_open();
                    out.push_back(make_tag('S', ovl));
                    break;
            }
        }
    }
    close_open();
    return out;
}

DecodeResult decode_tags(const UnitSequence& units, const TagSequence& tags) {
    if (units.size() != tags.size())
        throw DataError("decode_tags: unit/tag length mismatch");
    const TagSequence fixed = repair_tags(tags);
    DecodeResult res;
    std::size_t i = 0;
    auto emit = [&](std::size_t first, std::size_t last, bool mwt) {
        Segment seg;
        seg.begin = units.spans[first].first;
        seg.end = units.spans[last].second;
        seg.surface = units.raw.substr(seg.begin, seg.end - seg.begin);
        seg.is_mwt = mwt;
        res.segments.push_back(std::move(seg));
    };
    while (i < fixed.size()) {
        const Tag t = fixed[i];
        if (t == Tag::X) {
            ++i;
            continue;
        }
        const bool ovl = is_overlined(t);
        if (base_of(t) == 'S') {
            emit(i, i, ovl);
            ++i;
            continue;
        }
        // repaired sequences always have a matching E for each B
        std::size_t j = i;
        while (base_of(fixed[j]) != 'E') ++j;
        emit(i, j, ovl);
        i = j + 1;
    }
    return res;
}

std::vector<std::string> DecodeResult::words() const {
    std::vector<std::string> out;
    for (const auto& s : segments)
        if (!s.is_mwt) out.push_back(s.surface);
    return out;
}

std::vector<std::string> DecodeResult::mwt_surfaces() const {
    std::vector<std::string> out;
    for (const auto& s : segments)
        if (s.is_mwt) out.push_back(s.surface);
    return out;
}

std::string to_debug_text(const UnitSequence& units, const TagSequence& tags) {
    std::string out;
    for (std::size_t i = 0; i < units.size(); ++i) {
        out += units.units[i];
        out += '\t';
        out += tag_name(tags[i]);
        out += '\n';
    }
    out += '\n';
    return out;
}

}  // namespace udseg
