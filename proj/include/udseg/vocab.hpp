#ifndef UDSEG_VOCAB_HPP
#define UDSEG_VOCAB_HPP

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "udseg/tags.hpp"

namespace udseg {

// N-gram vocabulary over units. Terms seen once in training share the
// per-order UNK vector (index 0); everything else gets a dedicated index.
class Vocab {
  public:
    static constexpr int kUnk = 0;
    // out-of-sentence neighbour in bigram/trigram keys
    static constexpr const char* kBoundary = "\x02";
    // separates the units inside an n-gram key
    static constexpr char kJoiner = '\x1f';

    struct Order {
        std::unordered_map<std::string, int> index;        // surface -> id (>= 1)
        std::unordered_map<std::string, std::size_t> counts;  // kept surfaces only
        std::size_t table_size() const { return index.size() + 1; }
        int lookup(const std::string& key) const {
            auto it = index.find(key);
            return it == index.end() ? kUnk : it->second;
        }
    };

    Order unigrams, bigrams, trigrams;
    bool has_ngrams = false;

    static std::string bigram_key(const std::vector<std::string>& units, std::size_t i);
    static std::string trigram_key(const std::vector<std::string>& units, std::size_t i);
};

Vocab build_vocab(const std::vector<UnitSequence>& sentences, bool uses_ngrams);

// Per-order index sequences for one unit sequence (or truncation piece).
struct UnitIndices {
    std::vector<int> uni, bi, tri;
    std::size_t size() const { return uni.size(); }
};

UnitIndices index_units(const Vocab& vocab, const std::vector<std::string>& units);

}  // namespace udseg

#endif
