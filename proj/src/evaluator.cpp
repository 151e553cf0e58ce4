#include "udseg/evaluator.hpp"

#include <algorithm>

#include "udseg/unicode.hpp"

namespace udseg {

namespace {

template <typename T>
std::size_t lcs_length(const std::vector<T>& a, const std::vector<T>& b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

EvalResult from_counts(std::size_t matched, std::size_t cand, std::size_t ref) {
    EvalResult r;
    r.matched = matched;
    r.candidate_len = cand;
    r.reference_len = ref;
    if (cand == 0 && ref == 0) {
        r.precision = r.recall = r.f1 = 1.0;
        return r;
    }
    r.precision = cand == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(cand);
    r.recall = ref == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(ref);
    // algebraically 2RP/(R+P); computed from the counts so that exact
    // rationals like 2/5 come out exact
    r.f1 = 2.0 * static_cast<double>(matched) / static_cast<double>(cand + ref);
    return r;
}

}  // namespace

std::size_t lcs_match(const std::vector<std::string>& candidate,
                      const std::vector<std::string>& reference) {
    return lcs_length(candidate, reference);
}

EvalResult prf(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference) {
    return from_counts(lcs_match(candidate, reference), candidate.size(), reference.size());
}

EvalResult corpus_prf(const Document& system, const Document& gold) {
    if (system.sentences.size() != gold.sentences.size())
        throw DataError("corpus_prf: sentence count mismatch (" +
                        std::to_string(system.sentences.size()) + " vs " +
                        std::to_string(gold.sentences.size()) + ")");
    std::size_t m = 0, c = 0, r = 0;
    for (std::size_t i = 0; i < gold.sentences.size(); ++i) {
        const auto& cw = system.sentences[i].words;
        const auto& rw = gold.sentences[i].words;
        m += lcs_match(cw, rw);
        c += cw.size();
        r += rw.size();
    }
    return from_counts(m, c, r);
}

TransducerScores acc_mfs(const std::vector<std::vector<std::string>>& candidates,
                         const std::vector<std::vector<std::string>>& references) {
    if (candidates.size() != references.size())
        throw DataError("acc_mfs: instance count mismatch");
    TransducerScores s;
    if (candidates.empty()) return s;
    std::size_t exact = 0;
    double f_sum = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i] == references[i]) ++exact;
        auto join = [](const std::vector<std::string>& parts) {
            std::string out;
            for (std::size_t k = 0; k < parts.size(); ++k) {
                if (k) out += '\x1f';
                out += parts[k];
            }
            return out;
        };
        const auto cc = decode_utf8(join(candidates[i]));
        const auto rc = decode_utf8(join(references[i]));
        std::vector<char32_t> cv, rv;
        for (const auto& cp : cc) cv.push_back(cp.value);
        for (const auto& cp : rc) rv.push_back(cp.value);
        if (cv.empty() && rv.empty()) {
            f_sum += 1.0;
        } else {
            const std::size_t l = lcs_length(cv, rv);
            f_sum += 2.0 * static_cast<double>(l) / static_cast<double>(cv.size() + rv.size());
        }
    }
    s.acc = static_cast<double>(exact) / static_cast<double>(candidates.size());
    s.mfs = f_sum / static_cast<double>(candidates.size());
    return s;
}

}  // namespace udseg
