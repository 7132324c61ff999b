#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tsbow/errors.hpp"
#include "tsbow/signal.hpp"
#include "tsbow/wavelet.hpp"

namespace tsbow {

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, in place.
inline void fft_pow2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double pi = std::acos(-1.0);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

} // namespace detail

/// Magnitudes of the first n_coeffs DFT bins (DC first). Radix-2 FFT for
/// power-of-two lengths, direct evaluation of the requested bins otherwise.
inline std::vector<double> dft_features(const TimeSeries& x, std::size_t n_coeffs) {
    const std::size_t n = x.size();
    if (n == 0) throw InvalidInput("dft_features: empty series");
    if (n_coeffs == 0 || n_coeffs > n / 2 + 1)
        throw InvalidInput("dft_features: n_coeffs " + std::to_string(n_coeffs) +
                           " out of range [1, " + std::to_string(n / 2 + 1) + "]");
    std::vector<double> mags(n_coeffs);
    if (detail::is_pow2(n)) {
        std::vector<std::complex<double>> a(n);
        for (std::size_t i = 0; i < n; ++i) a[i] = x.values[i];
        detail::fft_pow2(a);
        for (std::size_t k = 0; k < n_coeffs; ++k) mags[k] = std::abs(a[k]);
    } else {
        const double pi = std::acos(-1.0);
        for (std::size_t k = 0; k < n_coeffs; ++k) {
            double re = 0.0, im = 0.0;
            const double w = -2.0 * pi * static_cast<double>(k) / static_cast<double>(n);
            for (std::size_t t = 0; t < n; ++t) {
                const double ang = w * static_cast<double>(t);
                re += x.values[t] * std::cos(ang);
                im += x.values[t] * std::sin(ang);
            }
            mags[k] = std::hypot(re, im);
        }
    }
    return mags;
}

/// db2 decomposition into 4 levels; the feature is the concatenation
/// [cA4, cD4, cD3, cD2, cD1]. Callers resize unequal-length series first.
inline std::vector<double> dwt_features(const TimeSeries& x) {
    static const WaveletFilter filter = wavelet_filters("db2");
    const DwtCoefficients coeffs = dwt_multilevel(x.values, filter, 4);
    std::vector<double> out = coeffs.approx;
    for (const auto& d : coeffs.details) out.insert(out.end(), d.begin(), d.end());
    return out;
}

/// Unconstrained DTW with absolute-difference local cost and the classic
/// {match, insert, delete} steps. O(len_a * len_b) time, rolling rows.
inline double dtw_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InvalidInput("dtw_distance: empty sequence");
    const std::size_t n = a.size(), m = b.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, inf), curr(m + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        curr[0] = inf;
        for (std::size_t j = 1; j <= m; ++j) {
            const double cost = std::abs(a[i - 1] - b[j - 1]);
            curr[j] = cost + std::min({prev[j - 1], prev[j], curr[j - 1]});
        }
        std::swap(prev, curr);
    }
    return prev[m];
}

/// Standard-normal quantile via Acklam's rational approximation plus one
/// Halley refinement against erfc; good to ~1e-14 over (0, 1).
inline double inv_norm_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidInput("inv_norm_cdf: p must be in (0, 1)");
    static const double A[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double B[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double C[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double D[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) /
            ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5, r = q * q;
        x = (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q /
            (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) /
            ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
    }
    const double pi = std::acos(-1.0);
    const double err = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = err * std::sqrt(2.0 * pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

struct SaxConfig {
    std::size_t alphabet_size = 4; // tau
    std::size_t word_len = 6;      // w
    std::size_t bop_window_len = 128;
    std::size_t stride = 1;
    bool numerosity_reduction = false;
};

/// tau-1 breakpoints splitting N(0,1) into equal-probability bins.
inline std::vector<double> sax_breakpoints(std::size_t alphabet_size) {
    if (alphabet_size < 2) throw InvalidInput("sax_breakpoints: alphabet_size must be >= 2");
    std::vector<double> bp(alphabet_size - 1);
    for (std::size_t i = 1; i < alphabet_size; ++i)
        bp[i - 1] =
            inv_norm_cdf(static_cast<double>(i) / static_cast<double>(alphabet_size));
    return bp;
}

/// Piecewise aggregate approximation to w frame means. Non-integer frame
/// boundaries split samples fractionally so each sample contributes once.
inline std::vector<double> paa(std::span<const double> x, std::size_t w) {
    if (w == 0) throw InvalidInput("paa: word length must be >= 1");
    if (x.size() < w)
        throw InvalidInput("paa: window of " + std::to_string(x.size()) +
                           " samples cannot fill " + std::to_string(w) + " frames");
    std::vector<double> frames(w, 0.0);
    const double flen = static_cast<double>(x.size()) / static_cast<double>(w);
    for (std::size_t j = 0; j < w; ++j) {
        const double lo = static_cast<double>(j) * flen;
        const double hi = lo + flen;
        double acc = 0.0;
        for (std::size_t t = static_cast<std::size_t>(lo);
             t < x.size() && static_cast<double>(t) < hi; ++t) {
            const double overlap = std::min(hi, static_cast<double>(t) + 1.0) -
                                   std::max(lo, static_cast<double>(t));
            if (overlap > 0.0) acc += x[t] * overlap;
        }
        frames[j] = acc / flen;
    }
    return frames;
}

namespace detail {

inline std::size_t sax_symbol(double v, const std::vector<double>& breakpoints) {
    std::size_t s = 0;
    while (s < breakpoints.size() && v >= breakpoints[s]) ++s;
    return s;
}

} // namespace detail

/// SAX word of one window: z-normalize, PAA to w means, quantize each mean
/// at the Gaussian breakpoints. Symbols are letters 'a', 'b', ...
inline std::string sax_word(std::span<const double> window, const SaxConfig& cfg) {
    if (window.size() < std::max<std::size_t>(cfg.word_len, 2))
        throw InvalidInput("sax_word: window of " + std::to_string(window.size()) +
                           " samples is shorter than the word length " +
                           std::to_string(cfg.word_len));
    const std::vector<double> bp = sax_breakpoints(cfg.alphabet_size);
    const ZNormed norm = znormalize(window);
    const std::vector<double> means = paa(norm.values, cfg.word_len);
    std::string word(cfg.word_len, 'a');
    for (std::size_t j = 0; j < cfg.word_len; ++j)
        word[j] = static_cast<char>('a' + detail::sax_symbol(means[j], bp));
    return word;
}

/// Count histogram over all tau^w possible SAX words of the sliding windows.
struct BopHistogram {
    std::vector<std::uint32_t> counts;
    std::uint64_t total = 0;
};

inline std::size_t bop_dimension(const SaxConfig& cfg) {
    std::size_t dim = 1;
    for (std::size_t i = 0; i < cfg.word_len; ++i) {
        if (dim > (std::size_t{1} << 24) / cfg.alphabet_size)
            throw InvalidInput("bop_dimension: tau^w too large");
        dim *= cfg.alphabet_size;
    }
    return dim;
}

inline BopHistogram bop_histogram(const TimeSeries& x, const SaxConfig& cfg) {
    if (cfg.stride == 0) throw InvalidInput("bop_histogram: stride must be >= 1");
    if (x.size() < cfg.bop_window_len)
        throw InvalidInput("bop_histogram: series '" + x.id + "' has length " +
                           std::to_string(x.size()) + "; window is " +
                           std::to_string(cfg.bop_window_len));
    BopHistogram hist;
    hist.counts.assign(bop_dimension(cfg), 0);
    const std::vector<double> bp = sax_breakpoints(cfg.alphabet_size);
    const std::size_t n_windows = (x.size() - cfg.bop_window_len) / cfg.stride + 1;
    std::size_t last_word = hist.counts.size(); // sentinel: no previous word
    for (std::size_t i = 0; i < n_windows; ++i) {
        const std::span<const double> window(x.values.data() + i * cfg.stride,
                                             cfg.bop_window_len);
        const ZNormed norm = znormalize(window);
        const std::vector<double> means = paa(norm.values, cfg.word_len);
        std::size_t index = 0;
        for (double mean : means)
            index = index * cfg.alphabet_size + detail::sax_symbol(mean, bp);
        if (cfg.numerosity_reduction && index == last_word) continue;
        last_word = index;
        ++hist.counts[index];
        ++hist.total;
    }
    return hist;
}

} // namespace tsbow
