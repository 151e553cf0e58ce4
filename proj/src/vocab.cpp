#include "udseg/vocab.hpp"

#include <algorithm>

namespace udseg {

std::string Vocab::bigram_key(const std::vector<std::string>& units, std::size_t i) {
    std::string key = i > 0 ? units[i - 1] : std::string(kBoundary);
    key += kJoiner;
    key += units[i];
    return key;
}

std::string Vocab::trigram_key(const std::vector<std::string>& units, std::size_t i) {
    std::string key = bigram_key(units, i);
    key += kJoiner;
    key += i + 1 < units.size() ? units[i + 1] : std::string(kBoundary);
    return key;
}

namespace {

Vocab::Order build_order(const std::unordered_map<std::string, std::size_t>& counts) {
    Vocab::Order order;
    std::vector<const std::string*> kept;
    for (const auto& [k, n] : counts)
        if (n >= 2) kept.push_back(&k);
    // lexicographic index assignment keeps the table independent of hash order
    std::sort(kept.begin(), kept.end(), [](const auto* a, const auto* b) { return *a < *b; });
    int next = 1;
    for (const auto* k : kept) {
        order.index.emplace(*k, next++);
        order.counts.emplace(*k, counts.at(*k));
    }
    return order;
}

}  // namespace

Vocab build_vocab(const std::vector<UnitSequence>& sentences, bool uses_ngrams) {
    std::unordered_map<std::string, std::size_t> uni, bi, tri;
    for (const auto& s : sentences) {
        for (std::size_t i = 0; i < s.units.size(); ++i) {
            ++uni[s.units[i]];
            if (uses_ngrams) {
                ++bi[Vocab::bigram_key(s.units, i)];
                ++tri[Vocab::trigram_key(s.units, i)];
            }
        }
    }
    Vocab v;
    v.has_ngrams = uses_ngrams;
    v.unigrams = build_order(uni);
    if (uses_ngrams) {
        v.bigrams = build_order(bi);
        v.trigrams = build_order(tri);
    }
    return v;
}

UnitIndices index_units(const Vocab& vocab, const std::vector<std::string>& units) {
    UnitIndices out;
    out.uni.reserve(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
        out.uni.push_back(vocab.unigrams.lookup(units[i]));
        if (vocab.has_ngrams) {
            out.bi.push_back(vocab.bigrams.lookup(Vocab::bigram_key(units, i)));
            out.tri.push_back(vocab.trigrams.lookup(Vocab::trigram_key(units, i)));
        }
    }
    return out;
}

}  // namespace udseg
