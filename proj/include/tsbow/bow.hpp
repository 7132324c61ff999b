#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tsbow/errors.hpp"
#include "tsbow/rng.hpp"
#include "tsbow/signal.hpp"
#include "tsbow/wavelet.hpp"

namespace tsbow {

/// Pipeline parameters for the bag-of-words representation.
struct BowConfig {
    std::size_t window_len = 128;
    std::size_t stride = 2;
    std::size_t codebook_size = 1000;
    std::string wavelet = "db3";
    std::size_t max_train_segments = 100000;
    std::size_t max_iter = 100;
    std::uint64_t seed = 0;
};

inline void validate(const BowConfig& cfg) {
    const WaveletFilter filter = wavelet_filters(cfg.wavelet);
    if (cfg.window_len < filter.length())
        throw InvalidInput("BowConfig: window_len " + std::to_string(cfg.window_len) +
                           " is shorter than the " + cfg.wavelet + " filter (" +
                           std::to_string(filter.length()) + ")");
    if (cfg.stride == 0) throw InvalidInput("BowConfig: stride must be >= 1");
    if (cfg.codebook_size < 2)
        throw InvalidInput("BowConfig: codebook_size must be >= 2");
    if (cfg.max_train_segments < cfg.codebook_size)
        throw InvalidInput("BowConfig: max_train_segments must be >= codebook_size");
    if (cfg.max_iter == 0) throw InvalidInput("BowConfig: max_iter must be >= 1");
}

/// Feature dimension produced by segment_features for this config.
inline std::size_t feature_dim(const BowConfig& cfg) {
    return dwt_output_len(cfg.window_len, wavelet_filters(cfg.wavelet).length());
}

using FeatureVector = std::vector<double>;

struct TrainingStats {
    std::size_t iterations = 0;
    double objective = 0.0; // sum of squared distances to assigned centroids
    std::size_t segments_used = 0;
    std::vector<double> objective_history; // one entry per assignment pass
};

/// The learned codebook: K centroids in feature space plus the pipeline
/// configuration that produced (and re-produces) the features.
struct Codebook {
    std::vector<FeatureVector> centroids;
    BowConfig config;
    TrainingStats stats;

    std::size_t size() const { return centroids.size(); }
    std::size_t dim() const { return centroids.empty() ? 0 : centroids.front().size(); }
};

/// Codeword-count representation of one time series.
struct BowHistogram {
    std::vector<std::uint32_t> counts;
    std::uint64_t total = 0;

    std::vector<double> as_doubles() const {
        return std::vector<double>(counts.begin(), counts.end());
    }
    std::vector<double> normalized() const {
        std::vector<double> out(counts.size());
        if (total == 0) return out;
        for (std::size_t i = 0; i < counts.size(); ++i)
            out[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
        return out;
    }
};

/// Sliding windows at offsets 0, stride, 2*stride, ...; the count is
/// floor((len - window_len) / stride) + 1. Views into the input.
inline std::vector<std::span<const double>>
extract_segments(std::span<const double> x, std::size_t window_len, std::size_t stride) {
    if (window_len == 0) throw InvalidInput("extract_segments: window_len must be >= 1");
    if (stride == 0) throw InvalidInput("extract_segments: stride must be >= 1");
    if (x.size() < window_len)
        throw InvalidInput("extract_segments: series length " + std::to_string(x.size()) +
                           " is shorter than the window (" + std::to_string(window_len) + ")");
    const std::size_t count = (x.size() - window_len) / stride + 1;
    std::vector<std::span<const double>> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(x.subspan(i * stride, window_len));
    return out;
}

/// z-normalize the window and keep the single-level approximation
/// coefficients as the local descriptor (about half the window length).
inline FeatureVector segment_features(std::span<const double> window,
                                      const WaveletFilter& filter) {
    ZNormed norm = znormalize(window);
    auto [approx, detail] = dwt_single(norm.values, filter);
    return std::move(approx);
}

namespace detail {

// Squared Euclidean distance with early exit once the running sum passes
// the incumbent. Exact: skipping only ever drops worse candidates.
inline double sq_dist_bounded(std::span<const double> a, std::span<const double> b,
                              double bound) {
    double acc = 0.0;
    const std::size_t n = a.size();
    std::size_t i = 0;
    while (i < n) {
        const std::size_t stop = std::min(n, i + 16);
        for (; i < stop; ++i) {
            const double diff = a[i] - b[i];
            acc += diff * diff;
        }
        if (acc >= bound) return acc;
    }
    return acc;
}

struct Nearest {
    std::size_t index = 0;
    double sq_dist = std::numeric_limits<double>::infinity();
};

// Argmin of squared distance; ties resolve to the lowest index because
// only strictly smaller distances replace the incumbent.
inline Nearest nearest_centroid(std::span<const double> point,
                                const std::vector<FeatureVector>& centroids) {
    Nearest best;
    for (std::size_t j = 0; j < centroids.size(); ++j) {
        const double d = sq_dist_bounded(point, centroids[j], best.sq_dist);
        if (d < best.sq_dist) {
            best.sq_dist = d;
            best.index = j;
        }
    }
    return best;
}

} // namespace detail

struct KmeansParams {
    std::size_t k = 2;
    std::size_t max_iter = 100;
    std::uint64_t seed = 0;
};

struct KmeansResult {
    std::vector<FeatureVector> centroids;
    std::vector<std::size_t> assignment;
    TrainingStats stats;
};

/// Lloyd's algorithm with k-means++ seeding. Deterministic under the seed;
/// stops when assignments stabilize or after max_iter passes. Empty clusters
/// are re-seeded with the point currently farthest from its centroid.
inline KmeansResult kmeans_lloyd(const std::vector<FeatureVector>& points,
                                 const KmeansParams& params) {
    const std::size_t n = points.size();
    const std::size_t k = params.k;
    if (k == 0) throw InvalidInput("kmeans_lloyd: k must be >= 1");
    if (n < k)
        throw InvalidInput("kmeans_lloyd: " + std::to_string(n) +
                           " points but k = " + std::to_string(k));
    const std::size_t dim = points.front().size();
    if (dim == 0) throw InvalidInput("kmeans_lloyd: zero-dimensional points");
    for (const auto& p : points)
        if (p.size() != dim)
            throw InvalidInput("kmeans_lloyd: inconsistent feature dimensions (" +
                               std::to_string(p.size()) + " vs " + std::to_string(dim) + ")");

    std::mt19937_64 rng = make_rng(params.seed);
    KmeansResult res;
    res.centroids.reserve(k);

    // k-means++ seeding: first centroid uniform, then D^2 sampling.
    std::vector<double> sq_to_nearest(n, std::numeric_limits<double>::infinity());
    res.centroids.push_back(points[bounded_uint(rng, n)]);
    for (std::size_t j = 1; j < k; ++j) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = detail::sq_dist_bounded(points[i], res.centroids.back(),
                                                     sq_to_nearest[i]);
            if (d < sq_to_nearest[i]) sq_to_nearest[i] = d;
            total += sq_to_nearest[i];
        }
        std::size_t pick;
        if (total > 0.0) {
            const double target = uniform_unit(rng) * total;
            double run = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                run += sq_to_nearest[i];
                if (run >= target) { pick = i; break; }
            }
        } else {
            pick = static_cast<std::size_t>(bounded_uint(rng, n)); // all points coincide
        }
        res.centroids.push_back(points[pick]);
    }

    res.assignment.assign(n, k); // k = "unassigned" sentinel for the first pass
    std::vector<double> assigned_sq(n, 0.0);
    std::vector<FeatureVector> sums(k, FeatureVector(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);

    for (std::size_t iter = 0; iter < params.max_iter; ++iter) {
        // Assignment pass.
        std::size_t changes = 0;
        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto best = detail::nearest_centroid(points[i], res.centroids);
            if (best.index != res.assignment[i]) {
                res.assignment[i] = best.index;
                ++changes;
            }
            assigned_sq[i] = best.sq_dist;
            objective += best.sq_dist;
        }
        res.stats.objective_history.push_back(objective);
        res.stats.objective = objective;
        res.stats.iterations = iter + 1;
        if (changes == 0) break; // first pass always changes: assignments start unset

        // Update pass: centroids become cluster means.
        for (auto& s : sums) std::fill(s.begin(), s.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = res.assignment[i];
            ++counts[c];
            const FeatureVector& p = points[i];
            FeatureVector& s = sums[c];
            for (std::size_t d = 0; d < dim; ++d) s[d] += p[d];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Re-seed on the point farthest from its current centroid.
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i)
                    if (assigned_sq[i] > far_d) { far_d = assigned_sq[i]; far = i; }
                res.centroids[c] = points[far];
                assigned_sq[far] = 0.0; // keep later empty clusters off this point
                continue;
            }
            for (std::size_t d = 0; d < dim; ++d)
                res.centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
        }
    }
    return res;
}

/// Learn the codebook from segment features. When more features arrive than
/// cfg.max_train_segments, a uniform random subset (drawn with cfg.seed)
/// goes into clustering.
inline Codebook train_codebook(const std::vector<FeatureVector>& features,
                               const BowConfig& cfg) {
    if (features.size() < cfg.codebook_size)
        throw InvalidInput("train_codebook: " + std::to_string(features.size()) +
                           " features but codebook_size = " +
                           std::to_string(cfg.codebook_size));

    const std::vector<FeatureVector>* training = &features;
    std::vector<FeatureVector> subset;
    if (features.size() > cfg.max_train_segments) {
        std::vector<std::size_t> idx(features.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::mt19937_64 rng = make_rng(cfg.seed, 0x5e9); // subsampling stream
        shuffle(std::span<std::size_t>(idx), rng);
        subset.reserve(cfg.max_train_segments);
        for (std::size_t i = 0; i < cfg.max_train_segments; ++i)
            subset.push_back(features[idx[i]]);
        training = &subset;
    }

    KmeansResult km = kmeans_lloyd(
        *training, {.k = cfg.codebook_size, .max_iter = cfg.max_iter, .seed = cfg.seed});
    Codebook cb;
    cb.centroids = std::move(km.centroids);
    cb.config = cfg;
    cb.stats = std::move(km.stats);
    cb.stats.segments_used = training->size();
    return cb;
}

/// Segment features of every window of every series, per the config.
inline std::vector<FeatureVector>
collect_features(std::span<const TimeSeries* const> series, const BowConfig& cfg) {
    const WaveletFilter filter = wavelet_filters(cfg.wavelet);
    std::vector<FeatureVector> features;
    for (const TimeSeries* ts : series) {
        if (ts->size() < cfg.window_len)
            throw InvalidInput("collect_features: series '" + ts->id + "' has length " +
                               std::to_string(ts->size()) + "; minimum is the window length " +
                               std::to_string(cfg.window_len));
        for (const auto& window : extract_segments(ts->values, cfg.window_len, cfg.stride))
            features.push_back(segment_features(window, filter));
    }
    return features;
}

/// Nearest codeword by Euclidean distance; ties break to the lowest index.
inline std::size_t assign_codeword(const Codebook& cb, std::span<const double> feature) {
    if (cb.centroids.empty()) throw InvalidInput("assign_codeword: empty codebook");
    if (feature.size() != cb.dim())
        throw InvalidInput("assign_codeword: feature dimension " +
                           std::to_string(feature.size()) + " does not match codebook (" +
                           std::to_string(cb.dim()) + ")");
    return detail::nearest_centroid(feature, cb.centroids).index;
}

/// Count codeword occurrences over all windows of the series. The result is
/// independent of segment processing order by construction.
inline BowHistogram build_histogram(const Codebook& cb, const TimeSeries& x) {
    const BowConfig& cfg = cb.config;
    if (x.size() < cfg.window_len)
        throw InvalidInput("build_histogram: series '" + x.id + "' has length " +
                           std::to_string(x.size()) + "; minimum is the window length " +
                           std::to_string(cfg.window_len));
    const WaveletFilter filter = wavelet_filters(cfg.wavelet);
    BowHistogram hist;
    hist.counts.assign(cb.size(), 0);
    for (const auto& window : extract_segments(x.values, cfg.window_len, cfg.stride)) {
        const FeatureVector f = segment_features(window, filter);
        ++hist.counts[assign_codeword(cb, f)];
        ++hist.total;
    }
    return hist;
}

} // namespace tsbow
