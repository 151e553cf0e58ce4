#ifndef UDSEG_CONLLU_HPP
#define UDSEG_CONLLU_HPP

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace udseg {

// Malformed input (bad column count, bad ids); carries a line number.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structurally invalid but well-formed input (overlapping ranges, missing
// covered ids), and other data-level failures.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A surface token: either a plain word or a multiword range line.
struct Token {
    int id_start = 0;
    int id_end = 0;
    std::string form;
    bool is_multiword_range = false;
    bool space_after = true;
    std::vector<std::string> word_forms;  // covered words; {form} for plain tokens

    bool is_segmental() const {
        std::size_t n = 0;
        for (const auto& w : word_forms) n += w.size();
        if (n != form.size()) return false;
        std::size_t off = 0;
        for (const auto& w : word_forms) {
            if (form.compare(off, w.size(), w) != 0) return false;
            off += w.size();
        }
        return true;
    }
    bool is_non_segmental_mwt() const { return is_multiword_range && !is_segmental(); }
};

// One 10-column token line kept verbatim for round-tripping.
struct TokenLine {
    std::array<std::string, 10> cols;
};

struct Sentence {
    std::vector<std::string> comments;   // verbatim, including '# text = ...'
    std::vector<TokenLine> lines;        // original order: words, ranges, empty nodes
    std::vector<Token> tokens;           // derived surface tokens in order
    std::vector<std::string> words;      // derived word forms (ranges expanded)
    std::optional<std::string> text_comment;  // value of '# text = ...'
};

struct Document {
    std::vector<Sentence> sentences;
    std::string source_name;
    std::vector<std::string> warnings;
};

Document parse_document(std::string_view input, std::string source_name = "");
Document parse_document_file(const std::string& path);

std::string serialize_document(const Document& doc);

// Raw character stream of a sentence: the '# text' comment when stored,
// otherwise token forms joined by a space wherever space_after is set
// (never after the last token).
std::string reconstruct_text(const Sentence& sentence);

// Builds a full sentence (lines included) from surface tokens. Unset
// columns are '_'; MISC carries SpaceAfter=No where applicable.
Sentence make_sentence(std::vector<Token> tokens, std::optional<std::string> text_comment);

}  // namespace udseg

#endif
