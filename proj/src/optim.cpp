#include "udseg/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace udseg {

Tensor glorot_init(const std::vector<std::size_t>& shape, Rng& rng) {
    if (shape.empty()) throw std::invalid_argument("glorot_init: rank 0");
    double fan_in, fan_out;
    if (shape.size() == 1) {
        fan_in = static_cast<double>(shape[0]);
        fan_out = 1.0;
    } else {
        fan_in = static_cast<double>(shape[shape.size() - 2]);
        fan_out = static_cast<double>(shape[shape.size() - 1]);
    }
    const double b = std::sqrt(6.0 / (fan_in + fan_out));
    Tensor t(shape);
    for (std::size_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform(-b, b);
    return t;
}

void adagrad_step(Parameter& p, double lr) {
    constexpr double eps = 1e-8;
    double* v = p.value.data();
    double* g = p.gradient.data();
    double* a = p.accumulator.data();
    const std::size_t n = p.value.numel();
    for (std::size_t i = 0; i < n; ++i) {
        a[i] += g[i] * g[i];
        v[i] -= lr * g[i] / (std::sqrt(a[i]) + eps);
        g[i] = 0.0;
    }
}

double lr_schedule(int epoch, double initial_lr, double decay_rate) {
    return initial_lr / (1.0 + decay_rate * static_cast<double>(epoch));
}

double clip_global_norm(std::vector<Tensor*>& grads, double max_norm) {
    double sq = 0.0;
    for (const Tensor* g : grads) sq += l2_norm_squared(*g);
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const double k = max_norm / norm;
        for (Tensor* g : grads) scale_inplace(*g, k);
    }
    return norm;
}

Tensor dropout(const Tensor& x, double rate, bool training, Rng& rng) {
    if (!training || rate == 0.0) return x;
    Tensor out = x;
    const double keep_scale = 1.0 / (1.0 - rate);
    for (std::size_t i = 0; i < out.numel(); ++i)
        out[i] = rng.uniform01() < rate ? 0.0 : out[i] * keep_scale;
    return out;
}

Tensor dropout_mask(const std::vector<std::size_t>& shape, double rate, Rng& rng) {
    Tensor m(shape);
    const double keep_scale = 1.0 / (1.0 - rate);
    for (std::size_t i = 0; i < m.numel(); ++i)
        m[i] = rng.uniform01() < rate ? 0.0 : keep_scale;
    return m;
}

}  // namespace udseg
