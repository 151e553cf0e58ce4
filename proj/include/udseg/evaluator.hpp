#ifndef UDSEG_EVALUATOR_HPP
#define UDSEG_EVALUATOR_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "udseg/conllu.hpp"

namespace udseg {

// Word-level scores from LCS alignment. Ratios are derived from the
// integer counts; an empty-vs-empty comparison scores 1.0.
struct EvalResult {
    std::size_t matched = 0;
    std::size_t candidate_len = 0;
    std::size_t reference_len = 0;
    double precision = 1.0;
    double recall = 1.0;
    double f1 = 1.0;
};

// Length of the longest common subsequence under exact string equality.
std::size_t lcs_match(const std::vector<std::string>& candidate,
                      const std::vector<std::string>& reference);

EvalResult prf(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference);

// Micro-average over aligned sentences: counts are summed, then scored.
EvalResult corpus_prf(const Document& system, const Document& gold);

// Transducer metrics over aligned instance lists. ACC is exact component
// match; MFS is the mean per-instance LCS F-score over the characters of
// the components joined by a separator.
struct TransducerScores {
    double acc = 1.0;
    double mfs = 1.0;
};

TransducerScores acc_mfs(const std::vector<std::vector<std::string>>& candidates,
                         const std::vector<std::vector<std::string>>& references);

}  // namespace udseg

#endif
