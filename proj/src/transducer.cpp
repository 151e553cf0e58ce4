#include "udseg/transducer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "udseg/autodiff.hpp"
#include "udseg/unicode.hpp"

namespace udseg {

double TransductionTable::single_transduction_rate() const {
    if (counts.empty()) return 1.0;
    std::size_t single = 0;
    for (const auto& [surface, alts] : counts)
        if (alts.size() == 1) ++single;
    return static_cast<double>(single) / static_cast<double>(counts.size());
}

TransductionTable build_table(const Document& train) {
    TransductionTable table;
    for (const auto& s : train.sentences)
        for (const auto& t : s.tokens)
            if (t.is_non_segmental_mwt()) ++table.counts[t.form][t.word_forms];
    for (const auto& [surface, alts] : table.counts) {
        const std::vector<std::string>* best = nullptr;
        std::size_t best_n = 0;
        for (const auto& [components, n] : alts) {
            // map order is lexicographic, so '>' keeps the smallest on ties
            if (best == nullptr || n > best_n) {
                best = &components;
                best_n = n;
            }
        }
        table.chosen.emplace(surface, *best);
    }
    return table;
}

TransductionPolicy decide_policy(const TransductionTable& table, std::size_t threshold) {
    return {table.unique_surfaces() > threshold};
}

void TransducerModel::rebuild_char_ids() {
    char_ids.clear();
    for (std::size_t i = 0; i < alphabet.size(); ++i)
        char_ids.emplace(alphabet[i], static_cast<int>(i) + kFirstChar);
}

std::vector<std::pair<std::string, Parameter*>> TransducerModel::parameters() {
    std::vector<std::pair<std::string, Parameter*>> out;
    out.emplace_back("encdec.emb", &emb);
    out.emplace_back("encdec.enc.wx", &enc.wx);
    out.emplace_back("encdec.enc.uh", &enc.uh);
    out.emplace_back("encdec.enc.b", &enc.b);
    if (!share_weights) {
        out.emplace_back("encdec.dec.wx", &dec_separate.wx);
        out.emplace_back("encdec.dec.uh", &dec_separate.uh);
        out.emplace_back("encdec.dec.b", &dec_separate.b);
    }
    out.emplace_back("encdec.att_w", &att_w);
    out.emplace_back("encdec.att_u", &att_u);
    out.emplace_back("encdec.att_b", &att_b);
    out.emplace_back("encdec.att_v", &att_v);
    out.emplace_back("encdec.out_w", &out_w);
    out.emplace_back("encdec.out_b", &out_b);
    return out;
}

namespace {

std::vector<std::string> chars_of(const std::string& s) {
    std::vector<std::string> out;
    for (const auto& cp : decode_utf8(s)) out.push_back(s.substr(cp.offset, cp.length));
    return out;
}

std::vector<int> input_ids(const TransducerModel& m, const std::string& surface) {
    std::vector<int> ids;
    for (const auto& c : chars_of(surface)) ids.push_back(m.char_id(c));
    return ids;
}

// components joined by the separator, with the stop symbol appended
std::vector<int> target_ids(const TransducerModel& m, const std::vector<std::string>& components) {
    std::vector<int> ids;
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (i) ids.push_back(TransducerModel::kSep);
        for (const auto& c : chars_of(components[i])) ids.push_back(m.char_id(c));
    }
    ids.push_back(TransducerModel::kStop);
    return ids;
}

}  // namespace

TransducerModel make_transducer(std::vector<std::string> alphabet, int emb_size, int state_size,
                                bool share_weights, std::uint64_t seed) {
    TransducerModel m;
    m.state_size = state_size;
    m.share_weights = share_weights;
    m.alphabet = std::move(alphabet);
    m.rebuild_char_ids();

    Rng rng(seed ^ 0xEDCDECULL);
    const auto e = static_cast<std::size_t>(emb_size);
    const auto s = static_cast<std::size_t>(state_size);
    const std::size_t v = m.vocab_size();
    m.emb = Parameter(glorot_init({v, e}, rng));
    m.enc.init(e, s, rng);
    if (!share_weights) m.dec_separate.init(e, s, rng);
    m.att_w = Parameter(glorot_init({s, s}, rng));
    m.att_u = Parameter(glorot_init({s, s}, rng));
    m.att_b = Parameter(glorot_init({s}, rng));
    m.att_v = Parameter(glorot_init({s, 1}, rng));
    m.out_w = Parameter(glorot_init({2 * s, v}, rng));
    m.out_b = Parameter(glorot_init({v}, rng));
    return m;
}

TransducerModel init_transducer(const std::vector<MwtPair>& pairs, const TrainConfig& cfg,
                                bool share_weights) {
    std::set<std::string> chars;
    for (const auto& [surface, components] : pairs) {
        for (const auto& c : chars_of(surface)) chars.insert(c);
        for (const auto& w : components)
            for (const auto& c : chars_of(w)) chars.insert(c);
    }
    return make_transducer(std::vector<std::string>(chars.begin(), chars.end()),
                           cfg.char_embedding_size, cfg.rnn_state_size, share_weights, cfg.seed);
}

double encdec_pair_loss(TransducerModel& model, const MwtPair& pair, bool backward) {
    const std::vector<int> in_ids = input_ids(model, pair.first);
    const std::vector<int> tgt = target_ids(model, pair.second);
    if (in_ids.empty() || tgt.empty()) return 0.0;
    const auto s = static_cast<std::size_t>(model.state_size);

    Tape tape;
    Var emb = tape.param(model.emb);
    LstmCellVars enc = LstmCellVars::bind(tape, model.enc);
    LstmCellVars dec = model.share_weights ? enc : LstmCellVars::bind(tape, model.dec_separate);
    Var att_w = tape.param(model.att_w);
    Var att_u = tape.param(model.att_u);
    Var att_b = tape.param(model.att_b);
    Var att_v = tape.param(model.att_v);
    Var out_w = tape.param(model.out_w);
    Var out_b = tape.param(model.out_b);

    Var h = tape.input(Tensor({1, s}));
    Var c = tape.input(Tensor({1, s}));
    std::vector<Var> enc_states;
    for (int id : in_ids) {
        Var x = tape.gather_rows(emb, {id});
        lstm_step(tape, enc, x, h, c);
        enc_states.push_back(h);
    }
    Var enc_matrix = tape.concat_rows(enc_states);        // (n x S)
    Var we = tape.matmul(enc_matrix, att_w);              // (n x S)

    std::vector<Var> logit_rows;
    int prev = TransducerModel::kStart;
    for (std::size_t t = 0; t < tgt.size(); ++t) {
        Var x = tape.gather_rows(emb, {prev});
        lstm_step(tape, dec, x, h, c);
        Var scores = tape.transpose(
            tape.matmul(tape.tanh_(tape.add_rowvec(tape.add_rowvec(we, tape.matmul(h, att_u)), att_b)),
                        att_v));                          // (1 x n)
        Var attn = tape.softmax_rows(scores);
        Var ctx = tape.matmul(attn, enc_matrix);          // (1 x S)
        logit_rows.push_back(tape.add_rowvec(tape.matmul(tape.concat_cols({h, ctx}), out_w), out_b));
        prev = tgt[t];  // teacher forcing
    }
    Var loss = tape.cross_entropy_rows(tape.concat_rows(logit_rows), tgt);
    if (backward) tape.backward(loss);
    return tape.val(loss)[0];
}

std::vector<std::string> decode_encdec(const TransducerModel& model, const std::string& surface) {
    const std::vector<int> in_ids = input_ids(model, surface);
    if (in_ids.empty()) return {surface};
    const auto s = static_cast<std::size_t>(model.state_size);
    const auto e = model.emb.value.cols();
    const std::size_t v = model.vocab_size();

    auto embed = [&](int id) {
        Tensor x({1, e});
        for (std::size_t j = 0; j < e; ++j) x[j] = model.emb.value.at(id, j);
        return x;
    };

    Tensor h({1, s}), c({1, s});
    Tensor enc_matrix({in_ids.size(), s});
    for (std::size_t i = 0; i < in_ids.size(); ++i) {
        Tensor x = embed(in_ids[i]);
        lstm_step_plain(model.enc, x, h, c);
        for (std::size_t j = 0; j < s; ++j) enc_matrix.at(i, j) = h[j];
    }
    Tensor we = matmul(enc_matrix, model.att_w.value);  // (n x S)

    const std::size_t max_steps = 3 * in_ids.size() + 5;
    std::vector<int> out_ids;
    int prev = TransducerModel::kStart;
    Tensor scores({in_ids.size(), 1});
    for (std::size_t step = 0; step < max_steps; ++step) {
        Tensor x = embed(prev);
        lstm_step_plain(model.dec(), x, h, c);
        Tensor q = matmul(h, model.att_u.value);  // (1 x S)
        Tensor act = we;
        add_rowvec_inplace(act, q);
        add_rowvec_inplace(act, model.att_b.value);
        tanh_inplace(act);
        matmul_into(act, model.att_v.value, scores);  // (n x 1)
        // softmax over encoder positions
        double mx = scores[0];
        for (std::size_t i = 1; i < scores.numel(); ++i) mx = std::max(mx, scores[i]);
        double sum = 0.0;
        for (std::size_t i = 0; i < scores.numel(); ++i) {
            scores[i] = std::exp(scores[i] - mx);
            sum += scores[i];
        }
        Tensor ctx({1, s});
        for (std::size_t i = 0; i < in_ids.size(); ++i) {
            const double a = scores[i] / sum;
            for (std::size_t j = 0; j < s; ++j) ctx[j] += a * enc_matrix.at(i, j);
        }
        Tensor hc({1, 2 * s});
        for (std::size_t j = 0; j < s; ++j) {
            hc[j] = h[j];
            hc[s + j] = ctx[j];
        }
        Tensor logits({1, v});
        matmul_into(hc, model.out_w.value, logits);
        add_rowvec_inplace(logits, model.out_b.value);
        int arg = 0;
        for (std::size_t k = 1; k < v; ++k)
            if (logits[k] > logits[arg]) arg = static_cast<int>(k);
        if (arg == TransducerModel::kStop) break;
        out_ids.push_back(arg);
        prev = arg;
    }

    std::vector<std::string> components(1);
    for (int id : out_ids) {
        if (id == TransducerModel::kSep) {
            components.emplace_back();
        } else if (id >= TransducerModel::kFirstChar) {
            components.back() += model.alphabet[static_cast<std::size_t>(id) -
                                                TransducerModel::kFirstChar];
        }
        // UNK/start contribute nothing
    }
    components.erase(std::remove_if(components.begin(), components.end(),
                                    [](const std::string& w) { return w.empty(); }),
                     components.end());
    if (components.empty()) return {surface};
    return components;
}

EncdecResult train_encdec(TransducerModel& model, const std::vector<MwtPair>& pairs,
                          const TrainConfig& cfg) {
    if (pairs.size() < 20)
        throw DataError("train_encdec: fewer than 20 unique pairs; use the dictionary alone");

    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng split_rng(cfg.seed ^ 0x5B117ULL);
    split_rng.shuffle(order);
    const std::size_t n_val = std::max<std::size_t>(1, pairs.size() / 20);
    std::vector<std::size_t> val_idx(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());
    order.resize(order.size() - n_val);

    auto validation_acc = [&]() {
        std::size_t exact = 0;
        for (std::size_t i : val_idx)
            if (decode_encdec(model, pairs[i].first) == pairs[i].second) ++exact;
        return static_cast<double>(exact) / static_cast<double>(val_idx.size());
    };

    EncdecResult result;
    const auto params = model.parameters();
    std::vector<Tensor> best;
    auto snapshot = [&]() {
        best.clear();
        for (const auto& [name, p] : params) best.push_back(p->value);
    };
    auto restore = [&]() {
        for (std::size_t i = 0; i < params.size(); ++i) params[i].second->value = best[i];
    };

    Rng root(cfg.seed ^ 0xACCE55ULL);
    for (int epoch = 0; epoch < cfg.encdec_epochs; ++epoch) {
        Rng rng = root.fork(static_cast<std::uint64_t>(epoch));
        rng.shuffle(order);
        const double lr = lr_schedule(epoch, cfg.initial_lr_encdec, cfg.decay_rate);
        for (std::size_t i = 0; i < order.size(); i += cfg.batch_size) {
            const std::size_t n = std::min<std::size_t>(cfg.batch_size, order.size() - i);
            for (std::size_t k = 0; k < n; ++k) encdec_pair_loss(model, pairs[order[i + k]], true);
            std::vector<Tensor*> grads;
            for (auto& [name, p] : params) grads.push_back(&p->gradient);
            for (Tensor* g : grads) scale_inplace(*g, 1.0 / static_cast<double>(n));
            clip_global_norm(grads, cfg.grad_clip_norm);
            for (auto& [name, p] : params) adagrad_step(*p, lr);
        }
        const double acc = validation_acc();
        result.val_acc_log.push_back(acc);
        if (result.best_epoch < 0 || acc > result.best_val_acc) {
            result.best_epoch = epoch;
            result.best_val_acc = acc;
            snapshot();
        }
    }
    if (result.best_epoch >= 0) restore();
    return result;
}

std::vector<std::string> transduce(const TransductionPolicy& policy, const TransductionTable& table,
                                   const TransducerModel* model, const std::string& surface) {
    if (const auto* hit = table.find(surface)) return *hit;
    if (policy.has_encdec && model != nullptr) return decode_encdec(*model, surface);
    return {surface};
}

}  // namespace udseg
