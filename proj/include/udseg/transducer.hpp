#ifndef UDSEG_TRANSDUCER_HPP
#define UDSEG_TRANSDUCER_HPP

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "udseg/conllu.hpp"
#include "udseg/optim.hpp"
#include "udseg/rnn.hpp"

namespace udseg {

// Surface -> component-words dictionary built from the training data.
// When a surface was seen with several transductions the most frequent
// one is stored; ties go to the lexicographically smallest sequence.
struct TransductionTable {
    std::map<std::string, std::map<std::vector<std::string>, std::size_t>> counts;
    std::map<std::string, std::vector<std::string>> chosen;

    std::size_t unique_surfaces() const { return counts.size(); }
    const std::vector<std::string>* find(const std::string& surface) const {
        auto it = chosen.find(surface);
        return it == chosen.end() ? nullptr : &it->second;
    }
    // share of surfaces with exactly one transduction alternative
    double single_transduction_rate() const;
};

TransductionTable build_table(const Document& train);

struct TransductionPolicy {
    bool has_encdec = false;
};

// Encoder-decoder training pays off only for productive languages: more
// unique non-segmental multiword tokens than the threshold (200).
TransductionPolicy decide_policy(const TransductionTable& table, std::size_t threshold = 200);

using MwtPair = std::pair<std::string, std::vector<std::string>>;

// Attention encoder-decoder over characters with LSTM cells shared
// between encoder and decoder by default.
struct TransducerModel {
    // ids: 0 UNK, 1 start, 2 stop, 3 separator, then alphabet
    static constexpr int kUnk = 0, kStart = 1, kStop = 2, kSep = 3, kFirstChar = 4;

    std::vector<std::string> alphabet;  // id - kFirstChar -> character
    std::unordered_map<std::string, int> char_ids;
    int state_size = 200;
    bool share_weights = true;

    Parameter emb;          // (V x E)
    LstmCell enc;
    LstmCell dec_separate;  // used only when !share_weights
    Parameter att_w, att_u, att_b, att_v;  // (S x S), (S x S), (S), (S)
    Parameter out_w, out_b;                // (2S x V), (V)

    LstmCell& dec() { return share_weights ? enc : dec_separate; }
    const LstmCell& dec() const { return share_weights ? enc : dec_separate; }
    std::size_t vocab_size() const { return alphabet.size() + kFirstChar; }
    int char_id(const std::string& c) const {
        auto it = char_ids.find(c);
        return it == char_ids.end() ? kUnk : it->second;
    }
    void rebuild_char_ids();

    std::vector<std::pair<std::string, Parameter*>> parameters();
};

TransducerModel init_transducer(const std::vector<MwtPair>& pairs, const TrainConfig& cfg,
                                bool share_weights = true);

// Allocates a model with a fixed alphabet (used when loading from disk).
TransducerModel make_transducer(std::vector<std::string> alphabet, int emb_size, int state_size,
                                bool share_weights, std::uint64_t seed);

struct EncdecResult {
    std::vector<double> val_acc_log;  // one entry per epoch
    int best_epoch = -1;
    double best_val_acc = 0.0;
};

// Teacher-forced cross-entropy training with Adagrad; 5% of the pairs
// (seeded shuffle, at least one) are held out, and the epoch with the
// best validation exact-match is kept.
EncdecResult train_encdec(TransducerModel& model, const std::vector<MwtPair>& pairs,
                          const TrainConfig& cfg);

// Teacher-forced loss of a single pair (exposed for oracle tests).
double encdec_pair_loss(TransducerModel& model, const MwtPair& pair, bool backward);

// Greedy decoding capped at 3*|input|+5 steps; falls back to the surface
// itself when the output has no non-empty component.
std::vector<std::string> decode_encdec(const TransducerModel& model, const std::string& surface);

// Dictionary first, encoder-decoder on a miss, identity otherwise.
std::vector<std::string> transduce(const TransductionPolicy& policy, const TransductionTable& table,
                                   const TransducerModel* model, const std::string& surface);

}  // namespace udseg

#endif
