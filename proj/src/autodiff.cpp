#include "udseg/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace udseg {

Var Tape::make_node(Tensor value, std::vector<int> inputs, BackFn back) {
    Node n;
    n.value = std::move(value);
    n.grad = Tensor::zeros_like(n.value);
    n.inputs = std::move(inputs);
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    Node& stored = nodes_.back();
    stored.value_ref = &stored.value;
    return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::input(Tensor value) { return make_node(std::move(value), {}, nullptr); }

Var Tape::param(Parameter& p) {
    Node n;
    n.value_ref = &p.value;
    n.grad = Tensor::zeros_like(p.value);
    nodes_.push_back(std::move(n));
    const int id = static_cast<int>(nodes_.size()) - 1;
    bound_params_.emplace_back(&p, id);
    return Var{id};
}

Var Tape::matmul(Var a, Var b) {
    const Tensor& ta = val(a);
    const Tensor& tb = val(b);
    Tensor out({ta.rows(), tb.cols()});
    matmul_into(ta, tb, out);
    return make_node(std::move(out), {a.id, b.id}, [](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        const Tensor& g = n.grad;
        matmul_nt_into(g, t.val_of(n.inputs[1]), t.grad_of(n.inputs[0]));
        matmul_tn_into(t.val_of(n.inputs[0]), g, t.grad_of(n.inputs[1]));
    });
}

Var Tape::add(Var a, Var b) {
    Tensor out = val(a);
    add_inplace(out, val(b));
    return make_node(std::move(out), {a.id, b.id}, [](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        add_inplace(t.grad_of(n.inputs[0]), n.grad);
        add_inplace(t.grad_of(n.inputs[1]), n.grad);
    });
}

Var Tape::sub(Var a, Var b) {
    Tensor out = val(a);
    const Tensor& tb = val(b);
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] -= tb[i];
    return make_node(std::move(out), {a.id, b.id}, [](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        add_inplace(t.grad_of(n.inputs[0]), n.grad);
        Tensor& gb = t.grad_of(n.inputs[1]);
        for (std::size_t i = 0; i < gb.numel(); ++i) gb[i] -= n.grad[i];
    });
}

Var Tape::mul(Var a, Var b) {
    Tensor out = val(a);
    mul_inplace(out, val(b));
    return make_node(std::move(out), {a.id, b.id}, [](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        const Tensor& va = t.val_of(n.inputs[0]);
        const Tensor& vb = t.val_of(n.inputs[1]);
        Tensor& ga = t.grad_of(n.inputs[0]);
        Tensor& gb = t.grad_of(n.inputs[1]);
        for (std::size_t i = 0; i < n.grad.numel(); ++i) {
            ga[i] += n.grad[i] * vb[i];
            gb[i] += n.grad[i] * va[i];
        }
    });
}

Var Tape::affine(Var a, double k, double c) {
    Tensor out = val(a);
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] = k * out[i] + c;
    return make_node(std::move(out), {a.id}, [k](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        Tensor& ga = t.grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < ga.numel(); ++i) ga[i] += k * n.grad[i];
    });
}

Var Tape::add_rowvec(Var a, Var v) {
    Tensor out = val(a);
    add_rowvec_inplace(out, val(v));
    return make_node(std::move(out), {a.id, v.id}, [](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        add_inplace(t.grad_of(n.inputs[0]), n.grad);
        Tensor& gv = t.grad_of(n.inputs[1]);
        const std::size_t cols = n.grad.cols();
        for (std::size_t r = 0; r < n.grad.rows(); ++r)
            for (std::size_t c = 0; c < cols; ++c) gv[c] += n.grad[r * cols + c];
    });
}

Var Tape::sigmoid(Var a) {
    Tensor out = val(a);
    sigmoid_inplace(out);
    return make_node(std::move(out), {a.id}, [](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        const Tensor& y = *n.value_ref;
        Tensor& ga = t.grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < y.numel(); ++i) ga[i] += n.grad[i] * y[i] * (1.0 - y[i]);
    });
}

Var Tape::tanh_(Var a) {
    Tensor out = val(a);
    tanh_inplace(out);
    return make_node(std::move(out), {a.id}, [](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        const Tensor& y = *n.value_ref;
        Tensor& ga = t.grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < y.numel(); ++i) ga[i] += n.grad[i] * (1.0 - y[i] * y[i]);
    });
}

Var Tape::exp_(Var a) {
    Tensor out = val(a);
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] = std::exp(out[i]);
    return make_node(std::move(out), {a.id}, [](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        const Tensor& y = *n.value_ref;
        Tensor& ga = t.grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < y.numel(); ++i) ga[i] += n.grad[i] * y[i];
    });
}

Var Tape::log_(Var a) {
    Tensor out = val(a);
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] = std::log(out[i]);
    return make_node(std::move(out), {a.id}, [](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        const Tensor& x = t.val_of(n.inputs[0]);
        Tensor& ga = t.grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < x.numel(); ++i) ga[i] += n.grad[i] / x[i];
    });
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
    const std::size_t rows = val(parts.front()).rows();
    std::size_t cols = 0;
    for (Var p : parts) cols += val(p).cols();
    Tensor out({rows, cols});
    std::vector<int> ids;
    std::size_t off = 0;
    for (Var p : parts) {
        const Tensor& tp = val(p);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < tp.cols(); ++c) out.at(r, off + c) = tp.at(r, c);
        off += tp.cols();
        ids.push_back(p.id);
    }
    return make_node(std::move(out), std::move(ids), [](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        std::size_t off = 0;
        for (int in : n.inputs) {
            Tensor& gi = t.grad_of(in);
            const std::size_t pc = gi.cols();
            for (std::size_t r = 0; r < n.grad.rows(); ++r)
                for (std::size_t c = 0; c < pc; ++c) gi.at(r, c) += n.grad.at(r, off + c);
            off += pc;
        }
    });
}

Var Tape::concat_rows(const std::vector<Var>& parts) {
    const std::size_t cols = val(parts.front()).cols();
    std::size_t rows = 0;
    for (Var p : parts) rows += val(p).rows();
    Tensor out({rows, cols});
    std::vector<int> ids;
    std::size_t off = 0;
    for (Var p : parts) {
        const Tensor& tp = val(p);
        for (std::size_t i = 0; i < tp.numel(); ++i) out[off + i] = tp[i];
        off += tp.numel();
        ids.push_back(p.id);
    }
    return make_node(std::move(out), std::move(ids), [](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        std::size_t off = 0;
        for (int in : n.inputs) {
            Tensor& gi = t.grad_of(in);
            for (std::size_t i = 0; i < gi.numel(); ++i) gi[i] += n.grad[off + i];
            off += gi.numel();
        }
    });
}

Var Tape::slice_cols(Var a, std::size_t begin, std::size_t end) {
    const Tensor& ta = val(a);
    Tensor out({ta.rows(), end - begin});
    for (std::size_t r = 0; r < ta.rows(); ++r)
        for (std::size_t c = begin; c < end; ++c) out.at(r, c - begin) = ta.at(r, c);
    return make_node(std::move(out), {a.id}, [begin](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        Tensor& ga = t.grad_of(n.inputs[0]);
        for (std::size_t r = 0; r < n.grad.rows(); ++r)
            for (std::size_t c = 0; c < n.grad.cols(); ++c) ga.at(r, begin + c) += n.grad.at(r, c);
    });
}

Var Tape::slice_rows(Var a, std::size_t begin, std::size_t end) {
    const Tensor& ta = val(a);
    const std::size_t cols = ta.cols();
    Tensor out({end - begin, cols});
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] = ta[begin * cols + i];
    return make_node(std::move(out), {a.id}, [begin, cols](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        Tensor& ga = t.grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < n.grad.numel(); ++i) ga[begin * cols + i] += n.grad[i];
    });
}

Var Tape::gather_rows(Var a, std::vector<int> ids) {
    const Tensor& ta = val(a);
    const std::size_t cols = ta.cols();
    Tensor out({ids.size(), cols});
    for (std::size_t r = 0; r < ids.size(); ++r)
        for (std::size_t c = 0; c < cols; ++c) out.at(r, c) = ta.at(static_cast<std::size_t>(ids[r]), c);
    return make_node(std::move(out), {a.id}, [ids = std::move(ids), cols](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        Tensor& ga = t.grad_of(n.inputs[0]);
        for (std::size_t r = 0; r < ids.size(); ++r) {
            double* dst = ga.data() + static_cast<std::size_t>(ids[r]) * cols;
            const double* src = n.grad.data() + r * cols;
            for (std::size_t c = 0; c < cols; ++c) dst[c] += src[c];
        }
    });
}

Var Tape::transpose(Var a) {
    const Tensor& ta = val(a);
    Tensor out({ta.cols(), ta.rows()});
    for (std::size_t r = 0; r < ta.rows(); ++r)
        for (std::size_t c = 0; c < ta.cols(); ++c) out.at(c, r) = ta.at(r, c);
    return make_node(std::move(out), {a.id}, [](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        Tensor& ga = t.grad_of(n.inputs[0]);
        for (std::size_t r = 0; r < n.grad.rows(); ++r)
            for (std::size_t c = 0; c < n.grad.cols(); ++c) ga.at(c, r) += n.grad.at(r, c);
    });
}

Var Tape::mul_const(Var a, Tensor mask) {
    Tensor out = val(a);
    mul_inplace(out, mask);
    return make_node(std::move(out), {a.id}, [mask = std::move(mask)](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        Tensor& ga = t.grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < ga.numel(); ++i) ga[i] += n.grad[i] * mask[i];
    });
}

Var Tape::scale_rows(Var a, std::vector<double> row_scale) {
    const Tensor& ta = val(a);
    Tensor out = ta;
    const std::size_t cols = ta.cols();
    for (std::size_t r = 0; r < ta.rows(); ++r)
        for (std::size_t c = 0; c < cols; ++c) out.at(r, c) *= row_scale[r];
    return make_node(std::move(out), {a.id}, [s = std::move(row_scale), cols](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        Tensor& ga = t.grad_of(n.inputs[0]);
        for (std::size_t r = 0; r < n.grad.rows(); ++r)
            for (std::size_t c = 0; c < cols; ++c) ga.at(r, c) += n.grad.at(r, c) * s[r];
    });
}

Var Tape::softmax_rows(Var a) {
    Tensor out = val(a);
    const std::size_t cols = out.cols();
    for (std::size_t r = 0; r < out.rows(); ++r) {
        double* row = out.data() + r * cols;
        double mx = row[0];
        for (std::size_t c = 1; c < cols; ++c) mx = std::max(mx, row[c]);
        double s = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            row[c] = std::exp(row[c] - mx);
            s += row[c];
        }
        for (std::size_t c = 0; c < cols; ++c) row[c] /= s;
    }
    return make_node(std::move(out), {a.id}, [](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        const Tensor& y = *n.value_ref;
        Tensor& ga = t.grad_of(n.inputs[0]);
        const std::size_t cols = y.cols();
        for (std::size_t r = 0; r < y.rows(); ++r) {
            const double* yr = y.data() + r * cols;
            const double* gr = n.grad.data() + r * cols;
            double dot = 0.0;
            for (std::size_t c = 0; c < cols; ++c) dot += yr[c] * gr[c];
            double* gar = ga.data() + r * cols;
            for (std::size_t c = 0; c < cols; ++c) gar[c] += yr[c] * (gr[c] - dot);
        }
    });
}

Var Tape::logsumexp_rows(Var a) {
    const Tensor& ta = val(a);
    const std::size_t cols = ta.cols();
    Tensor out({ta.rows(), 1});
    for (std::size_t r = 0; r < ta.rows(); ++r) out[r] = log_sum_exp(ta.data() + r * cols, cols);
    return make_node(std::move(out), {a.id}, [cols](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        const Tensor& x = t.val_of(n.inputs[0]);
        const Tensor& y = *n.value_ref;
        Tensor& ga = t.grad_of(n.inputs[0]);
        for (std::size_t r = 0; r < x.rows(); ++r)
            for (std::size_t c = 0; c < cols; ++c)
                ga.at(r, c) += n.grad[r] * std::exp(x.at(r, c) - y[r]);
    });
}

Var Tape::sum_all(Var a) {
    const Tensor& ta = val(a);
    double s = 0.0;
    for (std::size_t i = 0; i < ta.numel(); ++i) s += ta[i];
    return make_node(Tensor({1}, {s}), {a.id}, [](Tape& t, int self) {
        const auto& n = t.nodes_[self];
        Tensor& ga = t.grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < ga.numel(); ++i) ga[i] += n.grad[0];
    });
}

Var Tape::cross_entropy_rows(Var logits, std::vector<int> targets) {
    const Tensor& x = val(logits);
    const std::size_t cols = x.cols();
    if (targets.size() != x.rows()) throw std::invalid_argument("cross_entropy: target count mismatch");
    double loss = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const double* row = x.data() + r * cols;
        loss += log_sum_exp(row, cols) - row[targets[r]];
    }
    return make_node(Tensor({1}, {loss}), {logits.id},
                     [targets = std::move(targets), cols](Tape& t, int self) {
                         const auto& n = t.nodes_[self];
                         const Tensor& x = t.val_of(n.inputs[0]);
                         Tensor& gx = t.grad_of(n.inputs[0]);
                         const double up = n.grad[0];
                         for (std::size_t r = 0; r < x.rows(); ++r) {
                             const double* row = x.data() + r * cols;
                             const double lz = log_sum_exp(row, cols);
                             double* grow = gx.data() + r * cols;
                             for (std::size_t c = 0; c < cols; ++c)
                                 grow[c] += up * std::exp(row[c] - lz);
                             grow[targets[r]] -= up;
                         }
                     });
}

void Tape::backward(Var loss) {
    if (val(loss).numel() != 1) throw std::invalid_argument("backward: loss must be scalar");
    nodes_[loss.id].grad[0] = 1.0;
    for (int i = loss.id; i >= 0; --i) {
        Node& n = nodes_[i];
        if (n.back) n.back(*this, i);
    }
    for (auto& [p, id] : bound_params_) add_inplace(p->gradient, nodes_[id].grad);
}

}  // namespace udseg
