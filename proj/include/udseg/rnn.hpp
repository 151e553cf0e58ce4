#ifndef UDSEG_RNN_HPP
#define UDSEG_RNN_HPP

#include <vector>

#include "udseg/autodiff.hpp"
#include "udseg/optim.hpp"
#include "udseg/tensor.hpp"

namespace udseg {

// GRU with the reset gate applied to the previous state before the
// candidate projection. Update/reset gates are packed into one block.
struct GruCell {
    Parameter wx_zr, uh_zr, b_zr;  // (in x 2S), (S x 2S), (2S)
    Parameter wx_h, uh_h, b_h;     // (in x S),  (S x S),  (S)

    void init(std::size_t input_size, std::size_t state_size, Rng& rng);
    std::size_t state_size() const { return wx_h.value.cols(); }
};

// LSTM with gates packed as [input, forget, output, candidate].
struct LstmCell {
    Parameter wx, uh, b;  // (in x 4S), (S x 4S), (4S)

    void init(std::size_t input_size, std::size_t state_size, Rng& rng);
    std::size_t state_size() const { return uh.value.rows(); }
};

// Parameter bindings on a tape, created once per recorded graph.
struct GruCellVars {
    Var wx_zr, uh_zr, b_zr, wx_h, uh_h, b_h;
    static GruCellVars bind(Tape& t, GruCell& c);
};

struct LstmCellVars {
    Var wx, uh, b;
    static LstmCellVars bind(Tape& t, LstmCell& c);
};

// One recorded GRU step: x (B x in), h (B x S) -> new h (B x S).
Var gru_step(Tape& t, const GruCellVars& c, Var x, Var h);

// One recorded LSTM step; updates h and c in place.
void lstm_step(Tape& t, const LstmCellVars& c, Var x, Var& h, Var& cell);

// Plain (non-recorded) counterparts for inference.
Tensor gru_step_plain(const GruCell& c, const Tensor& x, const Tensor& h);
void lstm_step_plain(const LstmCell& c, const Tensor& x, Tensor& h, Tensor& cell);

}  // namespace udseg

#endif
