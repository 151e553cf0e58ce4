#include "udseg/typology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "udseg/rng.hpp"
#include "udseg/unicode.hpp"

namespace udseg {

TypoProfile compute_factors(const Document& train) {
    if (train.sentences.empty()) throw DataError("compute_factors: empty corpus");
    TypoProfile p;
    std::unordered_set<char32_t> charset;
    std::unordered_set<std::string> lexicon, mwt_surfaces;
    std::size_t n_words = 0, n_chars_in_words = 0, n_segments = 0, n_tokens = 0, n_mwt = 0;
    std::size_t n_internal_space_words = 0;

    for (const auto& s : train.sentences) {
        const std::string raw = reconstruct_text(s);
        bool in_segment = false;
        for (const auto& cp : decode_utf8(raw)) {
            if (is_whitespace(cp.value)) {
                in_segment = false;
            } else {
                charset.insert(cp.value);
                if (!in_segment) ++n_segments;
                in_segment = true;
            }
        }
        for (const auto& w : s.words) {
            lexicon.insert(w);
            ++n_words;
            bool internal_space = false;
            for (const auto& cp : decode_utf8(w)) {
                ++n_chars_in_words;
                if (is_whitespace(cp.value)) internal_space = true;
            }
            if (internal_space) ++n_internal_space_words;
        }
        for (const auto& t : s.tokens) {
            ++n_tokens;
            if (t.is_non_segmental_mwt()) {
                ++n_mwt;
                mwt_surfaces.insert(t.form);
            }
        }
    }
    if (n_words == 0) throw DataError("compute_factors: corpus has no words");

    p.cs = charset.size();
    p.ls = lexicon.size();
    p.al = static_cast<double>(n_chars_in_words) / static_cast<double>(n_words);
    p.sf = n_segments == 0 ? 0.0
                           : static_cast<double>(n_words) / static_cast<double>(n_segments);
    p.mp = n_tokens == 0 ? 0.0 : static_cast<double>(n_mwt) / static_cast<double>(n_tokens);
    p.ms = mwt_surfaces.size();
    p.train_size = train.sentences.size();
    p.internal_space_word_ratio =
        static_cast<double>(n_internal_space_words) / static_cast<double>(n_words);
    return p;
}

Standardizer Standardizer::fit(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw DataError("standardizer: no rows");
    const std::size_t d = rows[0].size();
    Standardizer st;
    st.mean.assign(d, 0.0);
    st.stdev.assign(d, 0.0);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < d; ++j) st.mean[j] += r[j];
    for (std::size_t j = 0; j < d; ++j) st.mean[j] /= static_cast<double>(rows.size());
    for (const auto& r : rows)
        for (std::size_t j = 0; j < d; ++j) {
            const double dlt = r[j] - st.mean[j];
            st.stdev[j] += dlt * dlt;
        }
    for (std::size_t j = 0; j < d; ++j) {
        st.stdev[j] = std::sqrt(st.stdev[j] / static_cast<double>(rows.size()));
        if (st.stdev[j] <= 0.0)
            throw DataError("standardizer: feature " + std::to_string(j) + " is constant");
    }
    return st;
}

std::vector<double> Standardizer::apply(const std::vector<double>& row) const {
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - mean[j]) / stdev[j];
    return out;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw DataError("pearson: need two equal-length samples of size >= 2");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) throw DataError("pearson: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace

KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::size_t k,
                    std::uint64_t seed) {
    if (points.size() < k || k == 0) throw DataError("kmeans: fewer points than clusters");
    Rng rng(seed);
    KMeansResult res;

    // k-means++ seeding
    res.centroids.push_back(points[rng.index(points.size())]);
    std::vector<double> d2(points.size());
    while (res.centroids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : res.centroids) best = std::min(best, sq_dist(points[i], c));
            d2[i] = best;
            total += best;
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            double r = rng.uniform01() * total;
            for (std::size_t i = 0; i < points.size(); ++i) {
                r -= d2[i];
                if (r <= 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.index(points.size());
        }
        res.centroids.push_back(points[pick]);
    }

    res.assignment.assign(points.size(), -1);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < points.size(); ++i) {
            int best = 0;
            double bd = sq_dist(points[i], res.centroids[0]);
            for (std::size_t c = 1; c < k; ++c) {
                const double d = sq_dist(points[i], res.centroids[c]);
                if (d < bd) {
                    bd = d;
                    best = static_cast<int>(c);
                }
            }
            if (res.assignment[i] != best) {
                res.assignment[i] = best;
                changed = true;
            }
        }
        if (!changed) break;

        const std::size_t dim = points[0].size();
        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            auto& s = sums[res.assignment[i]];
            for (std::size_t j = 0; j < dim; ++j) s[j] += points[i][j];
            ++sizes[res.assignment[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] == 0) {
                // move the point farthest from its centroid into the empty cluster
                std::size_t far = 0;
                double fd = -1.0;
                for (std::size_t i = 0; i < points.size(); ++i) {
                    const double d = sq_dist(points[i], res.centroids[res.assignment[i]]);
                    if (d > fd) {
                        fd = d;
                        far = i;
                    }
                }
                res.centroids[c] = points[far];
            } else {
                for (std::size_t j = 0; j < dim; ++j)
                    res.centroids[c][j] = sums[c][j] / static_cast<double>(sizes[c]);
            }
        }
    }
    res.inertia = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        res.inertia += sq_dist(points[i], res.centroids[res.assignment[i]]);
    return res;
}

PcaResult pca_project(const std::vector<std::vector<double>>& points, std::size_t dims) {
    if (points.size() < 2) throw DataError("pca: need at least two points");
    const std::size_t d = points[0].size();
    if (dims > d) throw DataError("pca: more components than features");

    std::vector<double> mean(d, 0.0);
    for (const auto& p : points)
        for (std::size_t j = 0; j < d; ++j) mean[j] += p[j];
    for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(points.size());

    std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
    for (const auto& p : points)
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b)
                cov[a][b] += (p[a] - mean[a]) * (p[b] - mean[b]);
    for (auto& row : cov)
        for (double& v : row) v /= static_cast<double>(points.size());

    double trace = 0.0;
    for (std::size_t j = 0; j < d; ++j) trace += cov[j][j];

    PcaResult res;
    Rng rng(0x9E3779B97F4A7C15ULL);
    constexpr double kTol = 1e-10;
    for (std::size_t comp = 0; comp < dims; ++comp) {
        std::vector<double> v(d);
        for (double& x : v) x = rng.uniform(-1.0, 1.0);
        double norm = std::sqrt(sq_dist(v, std::vector<double>(d, 0.0)));
        for (double& x : v) x /= norm;

        double eigen = 0.0;
        for (int iter = 0; iter < 10000; ++iter) {
            std::vector<double> w(d, 0.0);
            for (std::size_t a = 0; a < d; ++a)
                for (std::size_t b = 0; b < d; ++b) w[a] += cov[a][b] * v[b];
            double wn = 0.0;
            for (double x : w) wn += x * x;
            wn = std::sqrt(wn);
            if (wn < 1e-300) {
                // null space: pick any unit vector orthogonal to found components
                std::fill(w.begin(), w.end(), 0.0);
                for (std::size_t basis = 0; basis < d; ++basis) {
                    w.assign(d, 0.0);
                    w[basis] = 1.0;
                    for (const auto& c : res.components) {
                        double dot = 0.0;
                        for (std::size_t j = 0; j < d; ++j) dot += w[j] * c[j];
                        for (std::size_t j = 0; j < d; ++j) w[j] -= dot * c[j];
                    }
                    double n2 = 0.0;
                    for (double x : w) n2 += x * x;
                    if (n2 > 1e-12) {
                        for (double& x : w) x /= std::sqrt(n2);
                        break;
                    }
                }
                v = w;
                eigen = 0.0;
                break;
            }
            for (double& x : w) x /= wn;
            double delta = 0.0, delta_flip = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                delta += (w[j] - v[j]) * (w[j] - v[j]);
                delta_flip += (w[j] + v[j]) * (w[j] + v[j]);
            }
            v = w;
            eigen = wn;
            if (std::min(delta, delta_flip) < kTol * kTol) break;
        }
        // eigenvalue via Rayleigh quotient
        if (eigen != 0.0) {
            double q = 0.0;
            for (std::size_t a = 0; a < d; ++a)
                for (std::size_t b = 0; b < d; ++b) q += v[a] * cov[a][b] * v[b];
            eigen = q;
        }
        for (std::size_t j = 0; j < d; ++j)
            if (std::abs(v[j]) > 1e-12) {
                if (v[j] < 0.0)
                    for (double& x : v) x = -x;
                break;
            }
        res.components.push_back(v);
        res.explained_ratio.push_back(trace > 0.0 ? eigen / trace : 0.0);
        // deflate
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) cov[a][b] -= eigen * v[a] * v[b];
    }

    for (const auto& p : points) {
        std::vector<double> proj(dims, 0.0);
        for (std::size_t c = 0; c < dims; ++c)
            for (std::size_t j = 0; j < d; ++j)
                proj[c] += (p[j] - mean[j]) * res.components[c][j];
        res.projected.push_back(std::move(proj));
    }
    return res;
}

namespace {

// Gaussian elimination with partial pivoting on an augmented system.
std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-12) throw DataError("linear solve: singular system");
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

}  // namespace

HuberFit huber_regress(const std::vector<std::vector<double>>& features,
                       const std::vector<double>& targets, double delta) {
    const std::size_t n = features.size();
    if (n == 0 || targets.size() != n) throw DataError("huber: bad inputs");
    const std::size_t d = features[0].size();
    if (n < d + 1) throw DataError("huber: need at least features+1 rows");

    std::vector<double> theta(d + 1, 0.0);  // coefficients then intercept
    HuberFit fit;
    constexpr double kTol = 1e-8;
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<double> w(n, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            double r = targets[i] - theta[d];
            for (std::size_t j = 0; j < d; ++j) r -= theta[j] * features[i][j];
            const double ar = std::abs(r);
            if (ar > delta) w[i] = delta / ar;
        }
        // weighted normal equations over [X, 1]
        std::vector<std::vector<double>> ata(d + 1, std::vector<double>(d + 1, 0.0));
        std::vector<double> atb(d + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            auto xi = [&](std::size_t j) { return j < d ? features[i][j] : 1.0; };
            for (std::size_t a = 0; a <= d; ++a) {
                for (std::size_t b = 0; b <= d; ++b) ata[a][b] += w[i] * xi(a) * xi(b);
                atb[a] += w[i] * xi(a) * targets[i];
            }
        }
        std::vector<double> next = solve_linear(std::move(ata), std::move(atb));
        double change = 0.0;
        for (std::size_t j = 0; j <= d; ++j) change = std::max(change, std::abs(next[j] - theta[j]));
        theta = std::move(next);
        fit.iterations = iter + 1;
        if (change < kTol) break;
    }
    fit.coefficients.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(d));
    fit.intercept = theta[d];
    return fit;
}

RecommendedSettings recommend_settings(const TypoProfile& profile,
                                       const SettingsThresholds& thresholds,
                                       std::optional<bool> word_internal_space) {
    RecommendedSettings s;
    const bool internal_space =
        word_internal_space.value_or(profile.internal_space_word_ratio > thresholds.internal_space_ratio);
    if (internal_space) s.unit_mode = UnitMode::Syllable;
    if (profile.sf > thresholds.sf_min && static_cast<double>(profile.cs) > thresholds.cs_min)
        s.uses_ngrams = true;
    if (profile.ms > thresholds.mwt_threshold) s.train_encdec = true;
    return s;
}

}  // namespace udseg
