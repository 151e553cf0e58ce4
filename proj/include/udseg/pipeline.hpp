#ifndef UDSEG_PIPELINE_HPP
#define UDSEG_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "udseg/seg_model.hpp"
#include "udseg/transducer.hpp"

namespace udseg {

// Everything a trained model directory holds: the main network plus the
// transduction dictionary and optional encoder-decoder.
struct Segmenter {
    SegModel model;
    TransductionTable table;
    TransductionPolicy policy;
    std::optional<TransducerModel> encdec;

    std::vector<std::string> transduce_surface(const std::string& surface) const {
        return transduce(policy, table, encdec ? &*encdec : nullptr, surface);
    }
    TransduceFn transduce_fn() const {
        return [this](const std::string& s) { return transduce_surface(s); };
    }
};

// Segments one raw sentence and builds the CoNLL-U sentence: plain words
// as simple tokens, transduced multiword tokens as range lines.
Sentence segment_sentence(const Segmenter& seg, const std::string& raw);

Document segment_document(const Segmenter& seg, const std::vector<std::string>& raw_sentences);

}  // namespace udseg

#endif
