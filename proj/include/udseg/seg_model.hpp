#ifndef UDSEG_SEG_MODEL_HPP
#define UDSEG_SEG_MODEL_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "udseg/conllu.hpp"
#include "udseg/crf.hpp"
#include "udseg/optim.hpp"
#include "udseg/rnn.hpp"
#include "udseg/tags.hpp"
#include "udseg/vocab.hpp"

namespace udseg {

// Sentences longer than this many units are cut into pieces for both
// training and decoding, and reassembled afterwards.
inline constexpr std::size_t kMaxSequenceUnits = 300;

// Bucket upper bounds for length-grouped batching.
inline constexpr std::size_t kBucketBounds[] = {10, 20, 40, 80, 140, 200, 300};

// The BiGRU-CRF segmentation network and everything learned with it.
struct SegModel {
    Vocab vocab;
    UnitMode unit_mode = UnitMode::Character;
    bool uses_ngrams = false;
    std::vector<Tag> tagset;
    TrainConfig cfg;

    Parameter emb_uni, emb_bi, emb_tri;  // (V x E) each
    GruCell gru_fwd, gru_bwd;
    Parameter proj_w, proj_b;  // (2S x K), (K)
    Parameter trans;           // (K+2) x (K+2)

    void init(Vocab vocab, UnitMode mode, bool ngrams, std::vector<Tag> tagset, TrainConfig cfg);

    int tag_id(Tag t) const;
    std::size_t n_tags() const { return tagset.size(); }
    std::size_t input_width() const {
        return static_cast<std::size_t>(cfg.char_embedding_size) * (uses_ngrams ? 3 : 1);
    }

    // Parameters in their declared serialization order.
    std::vector<std::pair<std::string, Parameter*>> parameters();
};

// The five plain tags, or all nine when the training data contains any
// non-segmental multiword token.
std::vector<Tag> select_tagset(const Document& train);

std::vector<UnitSequence> unitize_corpus(const Document& docs, UnitMode mode);

// One training sequence: a (piece of a) sentence with gold tag ids.
struct EncodedSentence {
    UnitIndices idx;
    std::vector<int> tags;
    std::size_t size() const { return idx.size(); }
};

// Unitizes, encodes and truncates gold sentences. Sentences that cannot
// be aligned are skipped with a note in `warnings`.
std::vector<EncodedSentence> encode_corpus(const Document& docs, const SegModel& model,
                                           std::vector<std::string>* warnings);

// Per-position input representation (unigram or concatenated 3-gram view
// of the pivot unit); width E or 3E.
Tensor represent(const SegModel& model, const std::vector<std::string>& units, std::size_t i);

// Forward + backward over one mini-batch; gradients accumulate into the
// model parameters. Returns the mean per-sentence loss.
double accumulate_batch_gradients(SegModel& model, const std::vector<const EncodedSentence*>& batch,
                                  double dropout_rate, Rng* dropout_rng);

// Loss only (no dropout, no gradients).
double compute_batch_loss(SegModel& model, const std::vector<const EncodedSentence*>& batch);

// One optimization step: gradients, global-norm clipping, Adagrad.
double train_step(SegModel& model, const std::vector<const EncodedSentence*>& batch, double lr,
                  double dropout_rate, Rng& dropout_rng);

// Emission scores for one sequence, inference path (no recorder).
Tensor emissions_plain(const SegModel& model, const UnitIndices& idx);

// Maps a non-segmental surface to component words during evaluation.
using TransduceFn = std::function<std::vector<std::string>(const std::string&)>;

struct EpochStat {
    int epoch = 0;
    double dev_f1 = 0.0;
    double mean_loss = 0.0;
};

struct TrainResult {
    std::vector<EpochStat> log;
    int best_epoch = -1;
    double best_f1 = 0.0;
};

// Full training loop: shuffle, bucket, batch, Adagrad with decay and
// clipping, per-epoch dev F1, best-epoch weight selection (ties go to the
// earlier epoch). `transduce` resolves mwt surfaces during dev scoring;
// when null they count as single words.
TrainResult train_main(SegModel& model, const Document& train, const Document& dev,
                       const TransduceFn& transduce);

// Unitize -> BiGRU -> Viterbi -> repair -> decode, with long inputs cut
// and reassembled at the recorded points.
DecodeResult predict_sentence(const SegModel& model, const std::string& raw_text);
std::vector<DecodeResult> predict(const SegModel& model, const std::vector<std::string>& raw_sentences);

}  // namespace udseg

#endif
