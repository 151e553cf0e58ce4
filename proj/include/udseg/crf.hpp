#ifndef UDSEG_CRF_HPP
#define UDSEG_CRF_HPP

#include <vector>

#include "udseg/autodiff.hpp"
#include "udseg/tensor.hpp"

namespace udseg {

// First-order chain CRF over K tags. The transition matrix has shape
// (K+2) x (K+2); row/column K is the start state and K+1 the stop state,
// so trans(start, y0), trans(y_prev, y), trans(y_last, stop) are all read
// from the same tensor.

// Log partition function by the forward algorithm in log space.
// emissions: (length x K), transitions: (K+2) x (K+2).
double crf_log_partition(const Tensor& emissions, const Tensor& transitions, std::size_t length);

// Path score: start + emissions + transitions + stop.
double crf_path_score(const Tensor& emissions, const Tensor& transitions,
                      const std::vector<int>& tags, std::size_t length);

// Best-scoring tag sequence; ties broken toward the lowest tag index.
std::vector<int> crf_viterbi(const Tensor& emissions, const Tensor& transitions, std::size_t length);

// Recorded negative log-likelihood: log Z - score(gold). Gradient flows
// to both emissions and transitions (exact marginals via forward-backward).
Var crf_neg_log_likelihood(Tape& tape, Var emissions, Var transitions, std::vector<int> gold_tags);

}  // namespace udseg

#endif
