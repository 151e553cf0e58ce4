#ifndef UDSEG_OPTIM_HPP
#define UDSEG_OPTIM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "udseg/rng.hpp"
#include "udseg/tensor.hpp"

namespace udseg {

// A learned tensor with its gradient and the Adagrad accumulator.
struct Parameter {
    Tensor value;
    Tensor gradient;
    Tensor accumulator;

    Parameter() = default;
    explicit Parameter(Tensor v)
        : value(std::move(v)), gradient(Tensor::zeros_like(value)), accumulator(Tensor::zeros_like(value)) {}

    void zero_grad() { gradient.fill(0.0); }
};

// Hyper-parameters for both networks.
struct TrainConfig {
    int char_embedding_size = 50;
    int rnn_state_size = 200;
    double initial_lr_main = 0.1;
    double decay_rate = 0.05;
    double grad_clip_norm = 5.0;
    double initial_lr_encdec = 0.3;
    double dropout_rate = 0.5;
    int batch_size = 10;
    int main_epochs = 30;
    int encdec_epochs = 50;
    std::uint64_t seed = 1;
};

// Uniform in [-b, b] with b = sqrt(6 / (fan_in + fan_out)); fan_in/fan_out
// are the last two dimensions, with fan_out = 1 for vectors.
Tensor glorot_init(const std::vector<std::size_t>& shape, Rng& rng);

// One Adagrad update: acc += g*g; value -= lr * g / (sqrt(acc) + 1e-8).
// Zeroes the gradient afterwards.
void adagrad_step(Parameter& p, double lr);

// eta_t = eta0 / (1 + rho * epoch), epoch 0-based.
double lr_schedule(int epoch, double initial_lr, double decay_rate);

// Scales all gradients by max_norm / N when the global L2 norm N exceeds
// max_norm. Returns the pre-clip norm.
double clip_global_norm(std::vector<Tensor*>& grads, double max_norm);

// Inverted dropout: zero entries with probability `rate` and scale the
// survivors by 1/(1-rate). Identity when not training.
Tensor dropout(const Tensor& x, double rate, bool training, Rng& rng);

// Mask valued 1/(1-rate) or 0 per entry, for applying the same dropout
// inside a recorded graph.
Tensor dropout_mask(const std::vector<std::size_t>& shape, double rate, Rng& rng);

}  // namespace udseg

#endif
