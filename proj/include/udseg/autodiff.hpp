#ifndef UDSEG_AUTODIFF_HPP
#define UDSEG_AUTODIFF_HPP

#include <deque>
#include <functional>
#include <vector>

#include "udseg/optim.hpp"
#include "udseg/tensor.hpp"

namespace udseg {

// Handle to a node on a Tape.
struct Var {
    int id = -1;
};

// Reverse-mode expression recorder. A Tape owns one computation graph:
// record a loss with the ops below, call backward(loss), then read the
// accumulated gradients off the bound Parameters. Single-threaded per
// training context; inference paths do not use a Tape at all.
class Tape {
  public:
    using BackFn = std::function<void(Tape&, int)>;

    Var input(Tensor value);
    Var param(Parameter& p);

    const Tensor& val(Var v) const { return *nodes_[v.id].value_ref; }
    Tensor& grad(Var v) { return nodes_[v.id].grad; }

    Var matmul(Var a, Var b);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);               // elementwise
    Var affine(Var a, double k, double c);  // k*a + c
    Var scale(Var a, double k) { return affine(a, k, 0.0); }
    Var add_rowvec(Var a, Var v);        // v broadcast over rows of a
    Var sigmoid(Var a);
    Var tanh_(Var a);
    Var exp_(Var a);
    Var log_(Var a);
    Var concat_cols(const std::vector<Var>& parts);
    Var concat_rows(const std::vector<Var>& parts);
    Var slice_cols(Var a, std::size_t begin, std::size_t end);
    Var slice_rows(Var a, std::size_t begin, std::size_t end);
    Var gather_rows(Var a, std::vector<int> ids);
    Var transpose(Var a);
    Var mul_const(Var a, Tensor mask);   // elementwise by a constant tensor
    Var scale_rows(Var a, std::vector<double> row_scale);
    Var softmax_rows(Var a);
    Var logsumexp_rows(Var a);           // (m x n) -> (m x 1)
    Var sum_all(Var a);                  // -> scalar, shape {1}
    // Summed cross-entropy of row-wise softmax against integer targets.
    Var cross_entropy_rows(Var logits, std::vector<int> targets);

    // Escape hatch for fused ops (the CRF loss lives in crf.cpp).
    Var make_node(Tensor value, std::vector<int> inputs, BackFn back);
    const Tensor& val_of(int id) const { return *nodes_[id].value_ref; }
    Tensor& grad_of(int id) { return nodes_[id].grad; }

    // Reverse sweep from a scalar loss; accumulates into the gradients of
    // every Parameter bound with param().
    void backward(Var loss);

    std::size_t size() const { return nodes_.size(); }

  private:
    struct Node {
        Tensor value;
        const Tensor* value_ref = nullptr;
        Tensor grad;
        std::vector<int> inputs;
        BackFn back;
    };

    std::deque<Node> nodes_;
    std::vector<std::pair<Parameter*, int>> bound_params_;
};

}  // namespace udseg

#endif
