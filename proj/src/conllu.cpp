#include "udseg/conllu.hpp"

#include <fstream>
#include <sstream>

namespace udseg {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

bool misc_space_after(const std::string& misc) {
    std::size_t pos = 0;
    while (pos <= misc.size()) {
        std::size_t bar = misc.find('|', pos);
        if (bar == std::string::npos) bar = misc.size();
        if (misc.compare(pos, bar - pos, "SpaceAfter=No") == 0) return false;
        pos = bar + 1;
    }
    return true;
}

std::string join_space_after(const std::vector<Token>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        out += tokens[i].form;
        if (i + 1 < tokens.size() && tokens[i].space_after) out += ' ';
    }
    return out;
}

struct PendingSentence {
    Sentence s;
    std::size_t first_line = 0;
    bool any = false;
};

// Derives tokens/words from the verbatim lines and validates id structure.
void finalize(PendingSentence& p, Document& doc) {
    Sentence& s = p.s;
    auto fail = [&](const std::string& what) {
        throw DataError("sentence at line " + std::to_string(p.first_line) + ": " + what);
    };
    struct RangeInfo {
        int start, end;
        std::size_t line_idx;
    };
    std::vector<RangeInfo> ranges;
    std::vector<std::size_t> word_line_of;  // word id (1-based) -> index into s.lines
    int next_word_id = 1;

    for (std::size_t li = 0; li < s.lines.size(); ++li) {
        const std::string& id = s.lines[li].cols[0];
        std::size_t dash = id.find('-');
        std::size_t dot = id.find('.');
        if (dash != std::string::npos) {
            std::string_view a(id.data(), dash), b(id.data() + dash + 1, id.size() - dash - 1);
            if (!all_digits(a) || !all_digits(b)) fail("malformed range id '" + id + "'");
            int ia = std::stoi(std::string(a)), ib = std::stoi(std::string(b));
            if (ib <= ia) fail("empty or inverted range '" + id + "'");
            if (ia != next_word_id) fail("range '" + id + "' does not start at the next word id");
            if (!ranges.empty() && ia <= ranges.back().end)
                fail("overlapping ranges at '" + id + "'");
            ranges.push_back({ia, ib, li});
        } else if (dot != std::string::npos) {
            // empty node: preserved verbatim, excluded from words
            continue;
        } else {
            if (!all_digits(id)) fail("bad token id '" + id + "'");
            int iv = std::stoi(id);
            if (iv != next_word_id) fail("non-monotone word id '" + id + "'");
            word_line_of.push_back(li);
            s.words.push_back(s.lines[li].cols[1]);
            ++next_word_id;
        }
    }
    const int n_words = next_word_id - 1;
    for (const auto& r : ranges)
        if (r.end > n_words) fail("range covers missing word ids");

    std::size_t ri = 0;
    for (int id = 1; id <= n_words;) {
        if (ri < ranges.size() && ranges[ri].start == id) {
            const auto& r = ranges[ri];
            Token t;
            t.id_start = r.start;
            t.id_end = r.end;
            t.form = s.lines[r.line_idx].cols[1];
            t.is_multiword_range = true;
            t.space_after = misc_space_after(s.lines[r.line_idx].cols[9]);
            for (int w = r.start; w <= r.end; ++w) t.word_forms.push_back(s.words[w - 1]);
            s.tokens.push_back(std::move(t));
            id = r.end + 1;
            ++ri;
        } else {
            Token t;
            t.id_start = t.id_end = id;
            t.form = s.words[id - 1];
            t.space_after = misc_space_after(s.lines[word_line_of[id - 1]].cols[9]);
            t.word_forms.push_back(t.form);
            s.tokens.push_back(std::move(t));
            ++id;
        }
    }
    for (const auto& t : s.tokens)
        if (t.form.empty()) fail("empty token form");

    if (s.text_comment && !s.tokens.empty()) {
        if (join_space_after(s.tokens) != *s.text_comment)
            doc.warnings.push_back("sentence at line " + std::to_string(p.first_line) +
                                   ": '# text' disagrees with SpaceAfter reconstruction; "
                                   "'# text' wins");
    }
    doc.sentences.push_back(std::move(s));
    p = PendingSentence{};
}

}  // namespace

Document parse_document(std::string_view input, std::string source_name) {
    Document doc;
    doc.source_name = std::move(source_name);
    PendingSentence pending;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < input.size()) {
        std::size_t nl = input.find('\n', pos);
        const bool last = nl == std::string_view::npos;
        std::string_view line = input.substr(pos, last ? input.size() - pos : nl - pos);
        pos = last ? input.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        if (line.empty()) {
            if (pending.any) finalize(pending, doc);
            continue;
        }
        if (!pending.any) {
            pending.any = true;
            pending.first_line = line_no;
        }
        if (line[0] == '#') {
            pending.s.comments.emplace_back(line);
            constexpr std::string_view kText = "# text =";
            if (line.substr(0, kText.size()) == kText) {
                std::string_view v = line.substr(kText.size());
                if (!v.empty() && v.front() == ' ') v.remove_prefix(1);
                pending.s.text_comment = std::string(v);
            }
            continue;
        }
        TokenLine tl;
        std::size_t col = 0, start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == '\t') {
                if (col >= 10)
                    throw ParseError("line " + std::to_string(line_no) +
                                     ": expected 10 columns, got more");
                tl.cols[col++] = std::string(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (col != 10)
            throw ParseError("line " + std::to_string(line_no) + ": expected 10 columns, got " +
                             std::to_string(col));
        pending.s.lines.push_back(std::move(tl));
    }
    if (pending.any) finalize(pending, doc);
    return doc;
}

Document parse_document_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open input file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_document(buf.str(), path);
}

std::string serialize_document(const Document& doc) {
    std::string out;
    for (const auto& s : doc.sentences) {
        for (const auto& c : s.comments) {
            out += c;
            out += '\n';
        }
        for (const auto& l : s.lines) {
            for (std::size_t i = 0; i < l.cols.size(); ++i) {
                if (i) out += '\t';
                out += l.cols[i];
            }
            out += '\n';
        }
        out += '\n';
    }
    return out;
}

std::string reconstruct_text(const Sentence& sentence) {
    if (sentence.text_comment) return *sentence.text_comment;
    return join_space_after(sentence.tokens);
}

Sentence make_sentence(std::vector<Token> tokens, std::optional<std::string> text_comment) {
    Sentence s;
    if (text_comment) {
        s.comments.push_back("# text = " + *text_comment);
        s.text_comment = std::move(text_comment);
    }
    int next_id = 1;
    for (auto& t : tokens) {
        t.id_start = next_id;
        t.id_end = t.is_multiword_range ? next_id + static_cast<int>(t.word_forms.size()) - 1
                                        : next_id;
        TokenLine base;
        base.cols.fill("_");
        if (t.is_multiword_range) {
            TokenLine range = base;
            range.cols[0] = std::to_string(t.id_start) + "-" + std::to_string(t.id_end);
            range.cols[1] = t.form;
            range.cols[9] = t.space_after ? "_" : "SpaceAfter=No";
            s.lines.push_back(std::move(range));
            for (std::size_t i = 0; i < t.word_forms.size(); ++i) {
                TokenLine wl = base;
                wl.cols[0] = std::to_string(t.id_start + static_cast<int>(i));
                wl.cols[1] = t.word_forms[i];
                s.lines.push_back(std::move(wl));
                s.words.push_back(t.word_forms[i]);
            }
        } else {
            if (t.word_forms.empty()) t.word_forms.push_back(t.form);
            TokenLine wl = base;
            wl.cols[0] = std::to_string(t.id_start);
            wl.cols[1] = t.form;
            wl.cols[9] = t.space_after ? "_" : "SpaceAfter=No";
            s.lines.push_back(std::move(wl));
            s.words.push_back(t.form);
        }
        next_id = t.id_end + 1;
        s.tokens.push_back(std::move(t));
    }
    return s;
}

}  // namespace udseg
