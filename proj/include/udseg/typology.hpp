#ifndef UDSEG_TYPOLOGY_HPP
#define UDSEG_TYPOLOGY_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "udseg/conllu.hpp"
#include "udseg/tags.hpp"

namespace udseg {

// The six typological factors of one corpus, plus its size and the
// word-internal-space statistic used by the settings rules.
struct TypoProfile {
    std::size_t cs = 0;   // unique non-whitespace characters in the raw text
    std::size_t ls = 0;   // unique word forms
    double al = 0.0;      // characters per word
    double sf = 0.0;      // words per whitespace-delimited segment
    double mp = 0.0;      // non-segmental mwt occurrences per token
    std::size_t ms = 0;   // unique non-segmental mwt surfaces
    std::size_t train_size = 0;
    double internal_space_word_ratio = 0.0;
};

TypoProfile compute_factors(const Document& train);

// (x - mu) / sigma per feature; constant features are rejected.
struct Standardizer {
    std::vector<double> mean, stdev;

    static Standardizer fit(const std::vector<std::vector<double>>& rows);
    std::vector<double> apply(const std::vector<double>& row) const;
};

double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

struct KMeansResult {
    std::vector<int> assignment;
    std::vector<std::vector<double>> centroids;
    double inertia = 0.0;
};

// K-means++ seeding followed by Lloyd iterations until the assignment is
// a fixpoint (or 100 rounds).
KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::size_t k,
                    std::uint64_t seed);

struct PcaResult {
    std::vector<std::vector<double>> projected;
    std::vector<double> explained_ratio;
    std::vector<std::vector<double>> components;  // unit-length directions
};

// Power iteration with deflation on the covariance matrix (tolerance
// 1e-10). The first nonzero loading of each component is made positive.
PcaResult pca_project(const std::vector<std::vector<double>>& points, std::size_t dims = 2);

struct HuberFit {
    std::vector<double> coefficients;
    double intercept = 0.0;
    int iterations = 0;
};

// Robust linear regression by iteratively reweighted least squares;
// features are expected standardized.
HuberFit huber_regress(const std::vector<std::vector<double>>& features,
                       const std::vector<double>& targets, double delta = 1.35);

struct SettingsThresholds {
    double sf_min = 2.0;
    double cs_min = 1000.0;
    std::size_t mwt_threshold = 200;
    double internal_space_ratio = 0.01;
};

struct RecommendedSettings {
    UnitMode unit_mode = UnitMode::Character;
    bool uses_ngrams = false;
    bool train_encdec = false;
};

// The language-specific setting rules: word-internal-space languages get
// syllable units; large character set + no space delimiters get 3-grams;
// productive multiword tokens get the encoder-decoder.
RecommendedSettings recommend_settings(const TypoProfile& profile,
                                       const SettingsThresholds& thresholds = {},
                                       std::optional<bool> word_internal_space = std::nullopt);

}  // namespace udseg

#endif
