#include "udseg/crf.hpp"

#include <cmath>
#include <stdexcept>

namespace udseg {

namespace {

// alpha(t, k) = log sum over paths ending in tag k at position t.
void forward_pass(const Tensor& em, const Tensor& tr, std::size_t len, std::size_t k_tags,
                  Tensor& alpha) {
    const std::size_t start = k_tags;
    std::vector<double> buf(k_tags);
    for (std::size_t k = 0; k < k_tags; ++k) alpha.at(0, k) = tr.at(start, k) + em.at(0, k);
    for (std::size_t t = 1; t < len; ++t) {
        for (std::size_t k = 0; k < k_tags; ++k) {
            for (std::size_t j = 0; j < k_tags; ++j) buf[j] = alpha.at(t - 1, j) + tr.at(j, k);
            alpha.at(t, k) = log_sum_exp(buf.data(), k_tags) + em.at(t, k);
        }
    }
}

void backward_pass(const Tensor& em, const Tensor& tr, std::size_t len, std::size_t k_tags,
                   Tensor& beta) {
    const std::size_t stop = k_tags + 1;
    std::vector<double> buf(k_tags);
    for (std::size_t k = 0; k < k_tags; ++k) beta.at(len - 1, k) = tr.at(k, stop);
    for (std::size_t t = len - 1; t-- > 0;) {
        for (std::size_t j = 0; j < k_tags; ++j) {
            for (std::size_t k = 0; k < k_tags; ++k)
                buf[k] = tr.at(j, k) + em.at(t + 1, k) + beta.at(t + 1, k);
            beta.at(t, j) = log_sum_exp(buf.data(), k_tags);
        }
    }
}

}  // namespace

double crf_log_partition(const Tensor& emissions, const Tensor& transitions, std::size_t length) {
    const std::size_t k_tags = emissions.cols();
    if (length == 0) return 0.0;
    Tensor alpha({length, k_tags});
    forward_pass(emissions, transitions, length, k_tags, alpha);
    std::vector<double> last(k_tags);
    for (std::size_t k = 0; k < k_tags; ++k)
        last[k] = alpha.at(length - 1, k) + transitions.at(k, k_tags + 1);
    return log_sum_exp(last.data(), k_tags);
}

double crf_path_score(const Tensor& emissions, const Tensor& transitions,
                      const std::vector<int>& tags, std::size_t length) {
    const std::size_t k_tags = emissions.cols();
    if (length == 0) return 0.0;
    double s = transitions.at(k_tags, tags[0]) + emissions.at(0, tags[0]);
    for (std::size_t t = 1; t < length; ++t)
        s += transitions.at(tags[t - 1], tags[t]) + emissions.at(t, tags[t]);
    s += transitions.at(tags[length - 1], k_tags + 1);
    return s;
}

std::vector<int> crf_viterbi(const Tensor& emissions, const Tensor& transitions, std::size_t length) {
    const std::size_t k_tags = emissions.cols();
    if (length == 0) return {};
    Tensor delta({length, k_tags});
    std::vector<int> back(length * k_tags, 0);
    for (std::size_t k = 0; k < k_tags; ++k)
        delta.at(0, k) = transitions.at(k_tags, k) + emissions.at(0, k);
    for (std::size_t t = 1; t < length; ++t) {
        for (std::size_t k = 0; k < k_tags; ++k) {
            double best = delta.at(t - 1, 0) + transitions.at(0, k);
            int arg = 0;
            for (std::size_t j = 1; j < k_tags; ++j) {
                const double s = delta.at(t - 1, j) + transitions.at(j, k);
                if (s > best) {
                    best = s;
                    arg = static_cast<int>(j);
                }
            }
            delta.at(t, k) = best + emissions.at(t, k);
            back[t * k_tags + k] = arg;
        }
    }
    double best = delta.at(length - 1, 0) + transitions.at(0, k_tags + 1);
    int arg = 0;
    for (std::size_t k = 1; k < k_tags; ++k) {
        const double s = delta.at(length - 1, k) + transitions.at(k, k_tags + 1);
        if (s > best) {
            best = s;
            arg = static_cast<int>(k);
        }
    }
    std::vector<int> tags(length);
    tags[length - 1] = arg;
    for (std::size_t t = length - 1; t > 0; --t) tags[t - 1] = back[t * k_tags + tags[t]];
    return tags;
}

Var crf_neg_log_likelihood(Tape& tape, Var emissions, Var transitions, std::vector<int> gold_tags) {
    const Tensor& em = tape.val(emissions);
    const Tensor& tr = tape.val(transitions);
    const std::size_t len = gold_tags.size();
    const std::size_t k_tags = em.cols();
    if (em.rows() != len) throw std::invalid_argument("crf_nll: emission/tag length mismatch");
    for (int g : gold_tags)
        if (g < 0 || static_cast<std::size_t>(g) >= k_tags)
            throw std::out_of_range("crf_nll: gold tag index out of range");

    const double log_z = crf_log_partition(em, tr, len);
    const double gold = crf_path_score(em, tr, gold_tags, len);

    const int em_id = emissions.id, tr_id = transitions.id;
    return tape.make_node(
        Tensor({1}, {log_z - gold}), {em_id, tr_id},
        [gold_tags = std::move(gold_tags), len, k_tags, log_z, em_id, tr_id](Tape& t, int self) {
            const Tensor& em = t.val_of(em_id);
            const Tensor& tr = t.val_of(tr_id);
            Tensor& gem = t.grad_of(em_id);
            Tensor& gtr = t.grad_of(tr_id);
            const double up = t.grad_of(self)[0];
            if (up == 0.0 || len == 0) return;

            Tensor alpha({len, k_tags}), beta({len, k_tags});
            forward_pass(em, tr, len, k_tags, alpha);
            backward_pass(em, tr, len, k_tags, beta);
            const std::size_t start = k_tags, stop = k_tags + 1;

            // Unary marginals minus gold indicators -> emission grads.
            for (std::size_t t2 = 0; t2 < len; ++t2)
                for (std::size_t k = 0; k < k_tags; ++k) {
                    double m = std::exp(alpha.at(t2, k) + beta.at(t2, k) - log_z);
                    if (gold_tags[t2] == static_cast<int>(k)) m -= 1.0;
                    gem.at(t2, k) += up * m;
                }
            // Start and stop transition marginals.
            for (std::size_t k = 0; k < k_tags; ++k) {
                double m0 = std::exp(tr.at(start, k) + em.at(0, k) + beta.at(0, k) - log_z);
                if (gold_tags[0] == static_cast<int>(k)) m0 -= 1.0;
                gtr.at(start, k) += up * m0;
                double ml = std::exp(alpha.at(len - 1, k) + tr.at(k, stop) - log_z);
                if (gold_tags[len - 1] == static_cast<int>(k)) ml -= 1.0;
                gtr.at(k, stop) += up * ml;
            }
            // Pairwise marginals for tag-to-tag transitions.
            for (std::size_t t2 = 1; t2 < len; ++t2) {
                for (std::size_t j = 0; j < k_tags; ++j)
                    for (std::size_t k = 0; k < k_tags; ++k) {
                        double m = std::exp(alpha.at(t2 - 1, j) + tr.at(j, k) + em.at(t2, k) +
                                            beta.at(t2, k) - log_z);
                        if (gold_tags[t2 - 1] == static_cast<int>(j) &&
                            gold_tags[t2] == static_cast<int>(k))
                            m -= 1.0;
                        gtr.at(j, k) += up * m;
                    }
            }
        });
}

}  // namespace udseg
