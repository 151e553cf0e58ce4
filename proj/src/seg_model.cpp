#include "udseg/seg_model.hpp"

#include <algorithm>
#include <cmath>

#include "udseg/evaluator.hpp"

namespace udseg {

void SegModel::init(Vocab v, UnitMode mode, bool ngrams, std::vector<Tag> tags, TrainConfig c) {
    vocab = std::move(v);
    unit_mode = mode;
    uses_ngrams = ngrams;
    tagset = std::move(tags);
    cfg = c;

    Rng rng(cfg.seed);
    const auto e = static_cast<std::size_t>(cfg.char_embedding_size);
    const auto s = static_cast<std::size_t>(cfg.rnn_state_size);
    const std::size_t k = tagset.size();

    emb_uni = Parameter(glorot_init({vocab.unigrams.table_size(), e}, rng));
    if (uses_ngrams) {
        emb_bi = Parameter(glorot_init({vocab.bigrams.table_size(), e}, rng));
        emb_tri = Parameter(glorot_init({vocab.trigrams.table_size(), e}, rng));
    } else {
        emb_bi = Parameter();
        emb_tri = Parameter();
    }
    gru_fwd.init(input_width(), s, rng);
    gru_bwd.init(input_width(), s, rng);
    proj_w = Parameter(glorot_init({2 * s, k}, rng));
    proj_b = Parameter(glorot_init({k}, rng));
    trans = Parameter(glorot_init({k + 2, k + 2}, rng));
}

int SegModel::tag_id(Tag t) const {
    for (std::size_t i = 0; i < tagset.size(); ++i)
        if (tagset[i] == t) return static_cast<int>(i);
    return -1;
}

std::vector<std::pair<std::string, Parameter*>> SegModel::parameters() {
    std::vector<std::pair<std::string, Parameter*>> out;
    out.emplace_back("main.emb_uni", &emb_uni);
    if (uses_ngrams) {
        out.emplace_back("main.emb_bi", &emb_bi);
        out.emplace_back("main.emb_tri", &emb_tri);
    }
    auto add_gru = [&](const std::string& prefix, GruCell& g) {
        out.emplace_back(prefix + ".wx_zr", &g.wx_zr);
        out.emplace_back(prefix + ".uh_zr", &g.uh_zr);
        out.emplace_back(prefix + ".b_zr", &g.b_zr);
        out.emplace_back(prefix + ".wx_h", &g.wx_h);
        out.emplace_back(prefix + ".uh_h", &g.uh_h);
        out.emplace_back(prefix + ".b_h", &g.b_h);
    };
    add_gru("main.gru_fwd", gru_fwd);
    add_gru("main.gru_bwd", gru_bwd);
    out.emplace_back("main.proj_w", &proj_w);
    out.emplace_back("main.proj_b", &proj_b);
    out.emplace_back("main.trans", &trans);
    return out;
}

std::vector<Tag> select_tagset(const Document& train) {
    bool any_mwt = false;
    for (const auto& s : train.sentences)
        for (const auto& t : s.tokens)
            if (t.is_non_segmental_mwt()) any_mwt = true;
    std::vector<Tag> tags = {Tag::B, Tag::I, Tag::E, Tag::S, Tag::X};
    if (any_mwt) {
        tags.push_back(Tag::MB);
        tags.push_back(Tag::MI);
        tags.push_back(Tag::ME);
        tags.push_back(Tag::MS);
    }
    return tags;
}

std::vector<UnitSequence> unitize_corpus(const Document& docs, UnitMode mode) {
    std::vector<UnitSequence> out;
    out.reserve(docs.sentences.size());
    for (const auto& s : docs.sentences) out.push_back(unitize(reconstruct_text(s), mode));
    return out;
}

std::vector<EncodedSentence> encode_corpus(const Document& docs, const SegModel& model,
                                           std::vector<std::string>* warnings) {
    std::vector<EncodedSentence> pieces;
    for (std::size_t si = 0; si < docs.sentences.size(); ++si) {
        const Sentence& sent = docs.sentences[si];
        if (sent.tokens.empty()) continue;
        UnitSequence units = unitize(reconstruct_text(sent), model.unit_mode);
        TagSequence tags;
        try {
            tags = encode_tags(sent, units);
        } catch (const EncodeError& e) {
            if (warnings)
                warnings->push_back("sentence " + std::to_string(si + 1) + " skipped: " + e.what());
            continue;
        }
        bool ok = true;
        std::vector<int> tag_ids(tags.size());
        for (std::size_t i = 0; i < tags.size(); ++i) {
            const int id = model.tag_id(tags[i]);
            if (id < 0) {
                ok = false;
                break;
            }
            tag_ids[i] = id;
        }
        if (!ok) {
            if (warnings)
                warnings->push_back("sentence " + std::to_string(si + 1) +
                                    " skipped: tag outside the model tagset");
            continue;
        }
        for (std::size_t off = 0; off < units.size(); off += kMaxSequenceUnits) {
            const std::size_t len = std::min(kMaxSequenceUnits, units.size() - off);
            std::vector<std::string> piece_units(units.units.begin() + off,
                                                 units.units.begin() + off + len);
            EncodedSentence enc;
            enc.idx = index_units(model.vocab, piece_units);
            enc.tags.assign(tag_ids.begin() + off, tag_ids.begin() + off + len);
            pieces.push_back(std::move(enc));
        }
    }
    return pieces;
}

Tensor represent(const SegModel& model, const std::vector<std::string>& units, std::size_t i) {
    const auto e = static_cast<std::size_t>(model.cfg.char_embedding_size);
    Tensor out({1, model.input_width()});
    const int u = model.vocab.unigrams.lookup(units[i]);
    for (std::size_t c = 0; c < e; ++c) out[c] = model.emb_uni.value.at(u, c);
    if (model.uses_ngrams) {
        const int b = model.vocab.bigrams.lookup(Vocab::bigram_key(units, i));
        const int t = model.vocab.trigrams.lookup(Vocab::trigram_key(units, i));
        for (std::size_t c = 0; c < e; ++c) out[e + c] = model.emb_bi.value.at(b, c);
        for (std::size_t c = 0; c < e; ++c) out[2 * e + c] = model.emb_tri.value.at(t, c);
    }
    return out;
}

namespace {

// Recorded forward pass over a padded batch; returns the total loss node.
Var batch_loss_graph(Tape& tape, SegModel& model, const std::vector<const EncodedSentence*>& batch,
                     double dropout_rate, Rng* dropout_rng) {
    const std::size_t b = batch.size();
    std::size_t max_len = 0;
    for (const auto* s : batch) max_len = std::max(max_len, s->size());

    Var emb_uni = tape.param(model.emb_uni);
    Var emb_bi, emb_tri;
    if (model.uses_ngrams) {
        emb_bi = tape.param(model.emb_bi);
        emb_tri = tape.param(model.emb_tri);
    }
    GruCellVars fwd = GruCellVars::bind(tape, model.gru_fwd);
    GruCellVars bwd = GruCellVars::bind(tape, model.gru_bwd);
    Var proj_w = tape.param(model.proj_w);
    Var proj_b = tape.param(model.proj_b);
    Var trans = tape.param(model.trans);

    const auto s_size = static_cast<std::size_t>(model.cfg.rnn_state_size);
    const bool training = dropout_rng != nullptr && dropout_rate > 0.0;

    // per-timestep inputs (B x width) and masks
    std::vector<Var> xs(max_len);
    std::vector<std::vector<double>> keep(max_len, std::vector<double>(b, 0.0));
    std::vector<std::vector<double>> drop(max_len, std::vector<double>(b, 1.0));
    for (std::size_t t = 0; t < max_len; ++t) {
        std::vector<int> uni(b, Vocab::kUnk), bi(b, Vocab::kUnk), tri(b, Vocab::kUnk);
        for (std::size_t i = 0; i < b; ++i) {
            if (t < batch[i]->size()) {
                uni[i] = batch[i]->idx.uni[t];
                if (model.uses_ngrams) {
                    bi[i] = batch[i]->idx.bi[t];
                    tri[i] = batch[i]->idx.tri[t];
                }
                keep[t][i] = 1.0;
                drop[t][i] = 0.0;
            }
        }
        Var x = model.uses_ngrams
                    ? tape.concat_cols({tape.gather_rows(emb_uni, uni),
                                        tape.gather_rows(emb_bi, bi),
                                        tape.gather_rows(emb_tri, tri)})
                    : tape.gather_rows(emb_uni, uni);
        if (training) x = tape.mul_const(x, dropout_mask({b, model.input_width()}, dropout_rate, *dropout_rng));
        xs[t] = x;
    }

    Tensor zero_state({b, s_size});
    std::vector<Var> hf(max_len), hb(max_len);
    Var h = tape.input(zero_state);
    for (std::size_t t = 0; t < max_len; ++t) {
        h = gru_step(tape, fwd, xs[t], h);
        hf[t] = h;
    }
    h = tape.input(zero_state);
    for (std::size_t t = max_len; t-- > 0;) {
        Var h_new = gru_step(tape, bwd, xs[t], h);
        // padded rows carry the previous state through
        h = tape.add(tape.scale_rows(h_new, keep[t]), tape.scale_rows(h, drop[t]));
        hb[t] = h;
    }

    std::vector<Var> em(max_len);
    for (std::size_t t = 0; t < max_len; ++t) {
        Var u = tape.concat_cols({hf[t], hb[t]});
        if (training) u = tape.mul_const(u, dropout_mask({b, 2 * s_size}, dropout_rate, *dropout_rng));
        em[t] = tape.add_rowvec(tape.matmul(u, proj_w), proj_b);
    }

    Var total;
    bool first = true;
    for (std::size_t i = 0; i < b; ++i) {
        const std::size_t len = batch[i]->size();
        std::vector<Var> rows;
        rows.reserve(len);
        for (std::size_t t = 0; t < len; ++t)
            rows.push_back(tape.gather_rows(em[t], {static_cast<int>(i)}));
        Var emissions = tape.concat_rows(rows);
        Var nll = crf_neg_log_likelihood(tape, emissions, trans, batch[i]->tags);
        total = first ? nll : tape.add(total, nll);
        first = false;
    }
    return tape.affine(total, 1.0 / static_cast<double>(b), 0.0);
}

}  // namespace

double accumulate_batch_gradients(SegModel& model, const std::vector<const EncodedSentence*>& batch,
                                  double dropout_rate, Rng* dropout_rng) {
    Tape tape;
    Var loss = batch_loss_graph(tape, model, batch, dropout_rate, dropout_rng);
    tape.backward(loss);
    return tape.val(loss)[0];
}

double compute_batch_loss(SegModel& model, const std::vector<const EncodedSentence*>& batch) {
    Tape tape;
    Var loss = batch_loss_graph(tape, model, batch, 0.0, nullptr);
    return tape.val(loss)[0];
}

double train_step(SegModel& model, const std::vector<const EncodedSentence*>& batch, double lr,
                  double dropout_rate, Rng& dropout_rng) {
    const double loss = accumulate_batch_gradients(model, batch, dropout_rate, &dropout_rng);
    std::vector<Tensor*> grads;
    for (auto& [name, p] : model.parameters()) grads.push_back(&p->gradient);
    clip_global_norm(grads, model.cfg.grad_clip_norm);
    for (auto& [name, p] : model.parameters()) adagrad_step(*p, lr);
    return loss;
}

Tensor emissions_plain(const SegModel& model, const UnitIndices& idx) {
    const std::size_t len = idx.size();
    const auto e = static_cast<std::size_t>(model.cfg.char_embedding_size);
    const auto s = static_cast<std::size_t>(model.cfg.rnn_state_size);
    const std::size_t w = model.input_width();

    std::vector<Tensor> xs;
    xs.reserve(len);
    for (std::size_t t = 0; t < len; ++t) {
        Tensor x({1, w});
        for (std::size_t c = 0; c < e; ++c) x[c] = model.emb_uni.value.at(idx.uni[t], c);
        if (model.uses_ngrams) {
            for (std::size_t c = 0; c < e; ++c) x[e + c] = model.emb_bi.value.at(idx.bi[t], c);
            for (std::size_t c = 0; c < e; ++c) x[2 * e + c] = model.emb_tri.value.at(idx.tri[t], c);
        }
        xs.push_back(std::move(x));
    }

    std::vector<Tensor> hf(len);
    Tensor h({1, s});
    for (std::size_t t = 0; t < len; ++t) {
        h = gru_step_plain(model.gru_fwd, xs[t], h);
        hf[t] = h;
    }
    std::vector<Tensor> hb(len);
    h = Tensor({1, s});
    for (std::size_t t = len; t-- > 0;) {
        h = gru_step_plain(model.gru_bwd, xs[t], h);
        hb[t] = h;
    }

    Tensor em({len, model.n_tags()});
    Tensor u({1, 2 * s});
    Tensor row({1, model.n_tags()});
    for (std::size_t t = 0; t < len; ++t) {
        for (std::size_t c = 0; c < s; ++c) {
            u[c] = hf[t][c];
            u[s + c] = hb[t][c];
        }
        matmul_into(u, model.proj_w.value, row);
        add_rowvec_inplace(row, model.proj_b.value);
        for (std::size_t c = 0; c < model.n_tags(); ++c) em.at(t, c) = row[c];
    }
    return em;
}

DecodeResult predict_sentence(const SegModel& model, const std::string& raw_text) {
    UnitSequence units = unitize(raw_text, model.unit_mode);
    if (units.size() == 0) return {};
    TagSequence tags;
    tags.reserve(units.size());
    for (std::size_t off = 0; off < units.size(); off += kMaxSequenceUnits) {
        const std::size_t len = std::min(kMaxSequenceUnits, units.size() - off);
        std::vector<std::string> piece(units.units.begin() + off, units.units.begin() + off + len);
        UnitIndices idx = index_units(model.vocab, piece);
        Tensor em = emissions_plain(model, idx);
        std::vector<int> ids = crf_viterbi(em, model.trans.value, len);
        for (int id : ids) tags.push_back(model.tagset[static_cast<std::size_t>(id)]);
    }
    // pieces are rejoined before repair + decode
    return decode_tags(units, tags);
}

std::vector<DecodeResult> predict(const SegModel& model,
                                  const std::vector<std::string>& raw_sentences) {
    std::vector<DecodeResult> out;
    out.reserve(raw_sentences.size());
    for (const auto& s : raw_sentences) out.push_back(predict_sentence(model, s));
    return out;
}

namespace {

std::size_t bucket_of(std::size_t len) {
    for (std::size_t i = 0; i < std::size(kBucketBounds); ++i)
        if (len <= kBucketBounds[i]) return i;
    return std::size(kBucketBounds) - 1;
}

std::vector<std::string> candidate_words(const DecodeResult& dec, const TransduceFn& transduce) {
    std::vector<std::string> words;
    for (const auto& seg : dec.segments) {
        if (seg.is_mwt && transduce) {
            for (auto& w : transduce(seg.surface)) words.push_back(std::move(w));
        } else {
            words.push_back(seg.surface);
        }
    }
    return words;
}

}  // namespace

TrainResult train_main(SegModel& model, const Document& train, const Document& dev,
                       const TransduceFn& transduce) {
    if (dev.sentences.empty())
        throw DataError("train_main: no development data (carve 10% of the training set)");

    std::vector<std::string> warnings;
    std::vector<EncodedSentence> pieces = encode_corpus(train, model, &warnings);
    if (pieces.empty()) throw DataError("train_main: no encodable training sentences");

    std::vector<std::string> dev_raw;
    std::vector<std::vector<std::string>> dev_gold;
    for (const auto& s : dev.sentences) {
        dev_raw.push_back(reconstruct_text(s));
        dev_gold.push_back(s.words);
    }

    TrainResult result;
    Rng root(model.cfg.seed ^ 0x5eed5eedULL);

    std::vector<Tensor> best;
    const auto params = model.parameters();
    auto snapshot = [&]() {
        best.clear();
        for (const auto& [name, p] : params) best.push_back(p->value);
    };
    auto restore = [&]() {
        for (std::size_t i = 0; i < params.size(); ++i) params[i].second->value = best[i];
    };

    std::vector<std::size_t> order(pieces.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < model.cfg.main_epochs; ++epoch) {
        Rng rng = root.fork(static_cast<std::uint64_t>(epoch));
        rng.shuffle(order);

        std::vector<std::vector<const EncodedSentence*>> buckets(std::size(kBucketBounds));
        for (std::size_t i : order) buckets[bucket_of(pieces[i].size())].push_back(&pieces[i]);

        std::vector<std::vector<const EncodedSentence*>> batches;
        for (auto& bucket : buckets)
            for (std::size_t i = 0; i < bucket.size(); i += model.cfg.batch_size) {
                const std::size_t n = std::min<std::size_t>(model.cfg.batch_size, bucket.size() - i);
                batches.emplace_back(bucket.begin() + i, bucket.begin() + i + n);
            }
        rng.shuffle(batches);

        const double lr = lr_schedule(epoch, model.cfg.initial_lr_main, model.cfg.decay_rate);
        double loss_sum = 0.0;
        for (const auto& batch : batches)
            loss_sum += train_step(model, batch, lr, model.cfg.dropout_rate, rng);

        std::vector<std::vector<std::string>> dev_cand;
        dev_cand.reserve(dev_raw.size());
        for (const auto& raw : dev_raw)
            dev_cand.push_back(candidate_words(predict_sentence(model, raw), transduce));
        std::size_t m = 0, c = 0, r = 0;
        for (std::size_t i = 0; i < dev_gold.size(); ++i) {
            m += lcs_match(dev_cand[i], dev_gold[i]);
            c += dev_cand[i].size();
            r += dev_gold[i].size();
        }
        const double f1 = (c + r) == 0 ? 1.0 : 2.0 * static_cast<double>(m) / static_cast<double>(c + r);

        EpochStat stat;
        stat.epoch = epoch;
        stat.dev_f1 = f1;
        stat.mean_loss = batches.empty() ? 0.0 : loss_sum / static_cast<double>(batches.size());
        result.log.push_back(stat);

        if (result.best_epoch < 0 || f1 > result.best_f1) {
            result.best_epoch = epoch;
            result.best_f1 = f1;
            snapshot();
        }
    }
    if (result.best_epoch >= 0) restore();
    return result;
}

}  // namespace udseg
