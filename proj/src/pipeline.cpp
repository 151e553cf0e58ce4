#include "udseg/pipeline.hpp"

namespace udseg {

Sentence segment_sentence(const Segmenter& seg, const std::string& raw) {
    const DecodeResult dec = predict_sentence(seg.model, raw);
    std::vector<Token> tokens;
    for (std::size_t i = 0; i < dec.segments.size(); ++i) {
        const Segment& s = dec.segments[i];
        const bool glued =
            i + 1 < dec.segments.size() && dec.segments[i + 1].begin == s.end;
        Token t;
        t.space_after = !glued;
        if (s.is_mwt) {
            std::vector<std::string> components = seg.transduce_surface(s.surface);
            if (components.size() >= 2) {
                t.form = s.surface;
                t.is_multiword_range = true;
                t.word_forms = std::move(components);
            } else {
                // a single component cannot form a range line
                t.form = components.empty() ? s.surface : components[0];
                t.word_forms = {t.form};
            }
        } else {
            t.form = s.surface;
            t.word_forms = {t.form};
        }
        tokens.push_back(std::move(t));
    }
    return make_sentence(std::move(tokens), raw);
}

Document segment_document(const Segmenter& seg, const std::vector<std::string>& raw_sentences) {
    Document doc;
    for (const auto& raw : raw_sentences) doc.sentences.push_back(segment_sentence(seg, raw));
    return doc;
}

}  // namespace udseg
