#include "udseg/rnn.hpp"

#include <cmath>

namespace udseg {

void GruCell::init(std::size_t input_size, std::size_t state_size, Rng& rng) {
    wx_zr = Parameter(glorot_init({input_size, 2 * state_size}, rng));
    uh_zr = Parameter(glorot_init({state_size, 2 * state_size}, rng));
    b_zr = Parameter(glorot_init({2 * state_size}, rng));
    wx_h = Parameter(glorot_init({input_size, state_size}, rng));
    uh_h = Parameter(glorot_init({state_size, state_size}, rng));
    b_h = Parameter(glorot_init({state_size}, rng));
}

void LstmCell::init(std::size_t input_size, std::size_t state_size, Rng& rng) {
    wx = Parameter(glorot_init({input_size, 4 * state_size}, rng));
    uh = Parameter(glorot_init({state_size, 4 * state_size}, rng));
    b = Parameter(glorot_init({4 * state_size}, rng));
}

GruCellVars GruCellVars::bind(Tape& t, GruCell& c) {
    return {t.param(c.wx_zr), t.param(c.uh_zr), t.param(c.b_zr),
            t.param(c.wx_h),  t.param(c.uh_h),  t.param(c.b_h)};
}

LstmCellVars LstmCellVars::bind(Tape& t, LstmCell& c) {
    return {t.param(c.wx), t.param(c.uh), t.param(c.b)};
}

Var gru_step(Tape& t, const GruCellVars& c, Var x, Var h) {
    const std::size_t s = t.val(c.uh_h).rows();
    Var zr = t.sigmoid(t.add_rowvec(t.add(t.matmul(x, c.wx_zr), t.matmul(h, c.uh_zr)), c.b_zr));
    Var z = t.slice_cols(zr, 0, s);
    Var r = t.slice_cols(zr, s, 2 * s);
    Var cand = t.tanh_(
        t.add_rowvec(t.add(t.matmul(x, c.wx_h), t.matmul(t.mul(r, h), c.uh_h)), c.b_h));
    return t.add(t.mul(z, cand), t.mul(t.affine(z, -1.0, 1.0), h));
}

void lstm_step(Tape& t, const LstmCellVars& c, Var x, Var& h, Var& cell) {
    const std::size_t s = t.val(c.uh).rows();
    Var acts = t.add_rowvec(t.add(t.matmul(x, c.wx), t.matmul(h, c.uh)), c.b);
    Var gi = t.sigmoid(t.slice_cols(acts, 0, s));
    Var gf = t.sigmoid(t.slice_cols(acts, s, 2 * s));
    Var go = t.sigmoid(t.slice_cols(acts, 2 * s, 3 * s));
    Var gc = t.tanh_(t.slice_cols(acts, 3 * s, 4 * s));
    cell = t.add(t.mul(gf, cell), t.mul(gi, gc));
    h = t.mul(go, t.tanh_(cell));
}

Tensor gru_step_plain(const GruCell& c, const Tensor& x, const Tensor& h) {
    const std::size_t s = c.state_size();
    const std::size_t rows = x.rows();
    Tensor zr({rows, 2 * s});
    matmul_into(x, c.wx_zr.value, zr);
    matmul_into(h, c.uh_zr.value, zr, true);
    add_rowvec_inplace(zr, c.b_zr.value);
    sigmoid_inplace(zr);

    Tensor rh({rows, s});
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < s; ++j) rh.at(i, j) = zr.at(i, s + j) * h.at(i, j);

    Tensor cand({rows, s});
    matmul_into(x, c.wx_h.value, cand);
    matmul_into(rh, c.uh_h.value, cand, true);
    add_rowvec_inplace(cand, c.b_h.value);
    tanh_inplace(cand);

    Tensor out({rows, s});
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < s; ++j) {
            const double z = zr.at(i, j);
            out.at(i, j) = z * cand.at(i, j) + (1.0 - z) * h.at(i, j);
        }
    return out;
}

void lstm_step_plain(const LstmCell& c, const Tensor& x, Tensor& h, Tensor& cell) {
    const std::size_t s = c.state_size();
    const std::size_t rows = x.rows();
    Tensor acts({rows, 4 * s});
    matmul_into(x, c.wx.value, acts);
    matmul_into(h, c.uh.value, acts, true);
    add_rowvec_inplace(acts, c.b.value);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < s; ++j) {
            const double gi = 1.0 / (1.0 + std::exp(-acts.at(i, j)));
            const double gf = 1.0 / (1.0 + std::exp(-acts.at(i, s + j)));
            const double go = 1.0 / (1.0 + std::exp(-acts.at(i, 2 * s + j)));
            const double gc = std::tanh(acts.at(i, 3 * s + j));
            cell.at(i, j) = gf * cell.at(i, j) + gi * gc;
            h.at(i, j) = go * std::tanh(cell.at(i, j));
        }
    }
}

}  // namespace udseg
