#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsbow/errors.hpp"

namespace tsbow {

/// Orthonormal Daubechies analysis filter pair. The lowpass holds the
/// scaling coefficients in their conventional order (sum = sqrt(2), unit
/// energy); the highpass is its quadrature mirror.
struct WaveletFilter {
    std::string name;
    std::vector<double> lowpass;
    std::vector<double> highpass;

    std::size_t length() const { return lowpass.size(); }
};

/// Coefficient bundle of a multilevel decomposition. details[0] is the
/// coarsest level, details.back() the finest.
struct DwtCoefficients {
    std::vector<double> approx;
    std::vector<std::vector<double>> details;
    std::size_t levels = 0;
    std::string boundary_mode = "symmetric";
};

/// Coefficient count of one decomposition level under symmetric padding.
inline std::size_t dwt_output_len(std::size_t input_len, std::size_t filter_len) {
    return (input_len + filter_len - 1) / 2;
}

namespace detail {

inline void check_filter_invariants(const WaveletFilter& w) {
    double lo_sum = 0.0, hi_sum = 0.0, energy = 0.0;
    for (double c : w.lowpass) { lo_sum += c; energy += c * c; }
    for (double c : w.highpass) hi_sum += c;
    const double sqrt2 = std::sqrt(2.0);
    if (std::abs(lo_sum - sqrt2) > 1e-10 || std::abs(hi_sum) > 1e-10 ||
        std::abs(energy - 1.0) > 1e-10)
        throw InvalidInput("wavelet_filters: filter invariants violated for " + w.name);
}

} // namespace detail

/// Build the db1/db2/db3 filter pair from closed-form expressions.
inline WaveletFilter wavelet_filters(std::string_view name) {
    const double s2 = std::sqrt(2.0);
    WaveletFilter w;
    w.name = std::string(name);
    if (name == "db1") {
        w.lowpass = {1.0 / s2, 1.0 / s2};
    } else if (name == "db2") {
        const double s3 = std::sqrt(3.0);
        w.lowpass = {(1.0 + s3) / (4.0 * s2), (3.0 + s3) / (4.0 * s2),
                     (3.0 - s3) / (4.0 * s2), (1.0 - s3) / (4.0 * s2)};
    } else if (name == "db3") {
        const double s10 = std::sqrt(10.0);
        const double t = std::sqrt(5.0 + 2.0 * s10);
        const double d = 16.0 * s2;
        w.lowpass = {(1.0 + s10 + t) / d,        (5.0 + s10 + 3.0 * t) / d,
                     (10.0 - 2.0 * s10 + 2.0 * t) / d, (10.0 - 2.0 * s10 - 2.0 * t) / d,
                     (5.0 + s10 - 3.0 * t) / d,  (1.0 + s10 - t) / d};
    } else {
        throw UnsupportedWavelet("wavelet_filters: unsupported wavelet '" +
                                 std::string(name) + "' (supported: db1, db2, db3)");
    }
    const std::size_t f = w.lowpass.size();
    w.highpass.resize(f);
    for (std::size_t k = 0; k < f; ++k) {
        const double v = w.lowpass[f - 1 - k];
        w.highpass[k] = (k % 2 == 0) ? v : -v;
    }
    detail::check_filter_invariants(w);
    return w;
}

/// One analysis level: half-point symmetric extension, filter, decimate by 2.
/// Output lengths are floor((n + f - 1) / 2) each.
inline std::pair<std::vector<double>, std::vector<double>>
dwt_single(std::span<const double> x, const WaveletFilter& filter) {
    const std::size_t f = filter.length();
    const std::size_t n = x.size();
    if (n < f)
        throw InvalidInput("dwt_single: input length " + std::to_string(n) +
                           " is shorter than the filter (" + std::to_string(f) + ")");

    // e[u] = x extended by f-1 samples on each side, mirrored about the
    // boundary samples themselves: ... x1 x0 | x0 x1 ... | x[n-1] x[n-2] ...
    std::vector<double> e(n + 2 * (f - 1));
    for (std::size_t u = 0; u < f - 1; ++u) e[u] = x[f - 2 - u];
    for (std::size_t u = 0; u < n; ++u) e[f - 1 + u] = x[u];
    for (std::size_t u = 0; u < f - 1; ++u) e[f - 1 + n + u] = x[n - 1 - u];

    const std::size_t out_len = dwt_output_len(n, f);
    std::vector<double> approx(out_len), detail_c(out_len);
    for (std::size_t i = 0; i < out_len; ++i) {
        const double* w = e.data() + 2 * i + 1;
        double a = 0.0, d = 0.0;
        for (std::size_t k = 0; k < f; ++k) {
            a += w[k] * filter.lowpass[k];
            d += w[k] * filter.highpass[k];
        }
        approx[i] = a;
        detail_c[i] = d;
    }
    return {std::move(approx), std::move(detail_c)};
}

/// Inverse of dwt_single. orig_len selects the reconstructed support and
/// must be consistent with the forward length formula.
inline std::vector<double> idwt_single(std::span<const double> approx,
                                       std::span<const double> detail_c,
                                       const WaveletFilter& filter,
                                       std::size_t orig_len) {
    const std::size_t f = filter.length();
    const std::size_t len = approx.size();
    if (detail_c.size() != len)
        throw InvalidInput("idwt_single: approx and detail lengths differ");
    if (orig_len < f || dwt_output_len(orig_len, f) != len)
        throw InvalidInput("idwt_single: orig_len " + std::to_string(orig_len) +
                           " inconsistent with coefficient length " + std::to_string(len));

    std::vector<double> x(orig_len, 0.0);
    for (std::size_t n = 0; n < orig_len; ++n) {
        // contributions from basis functions i with 0 <= n + f - 2 - 2i < f
        const std::size_t ilo = (n >= 1) ? (n - 1 + 1) / 2 : 0; // ceil((n-1)/2)
        std::size_t ihi = (n + f - 2) / 2;
        if (ihi > len - 1) ihi = len - 1;
        double s = 0.0;
        for (std::size_t i = ilo; i <= ihi; ++i) {
            const std::size_t k = n + f - 2 - 2 * i;
            s += approx[i] * filter.lowpass[k] + detail_c[i] * filter.highpass[k];
        }
        x[n] = s;
    }
    return x;
}

/// Repeated single-level analysis of the running approximation.
inline DwtCoefficients dwt_multilevel(std::span<const double> x,
                                      const WaveletFilter& filter,
                                      std::size_t levels) {
    if (levels == 0)
        throw InvalidInput("dwt_multilevel: levels must be >= 1");
    DwtCoefficients out;
    out.levels = levels;
    out.details.resize(levels);
    std::vector<double> current(x.begin(), x.end());
    for (std::size_t lvl = 0; lvl < levels; ++lvl) {
        if (current.size() < filter.length())
            throw InvalidInput("dwt_multilevel: input too short for " +
                               std::to_string(levels) + " levels (level " +
                               std::to_string(lvl + 1) + " sees length " +
                               std::to_string(current.size()) + ")");
        auto [a, d] = dwt_single(current, filter);
        out.details[levels - 1 - lvl] = std::move(d); // finest last
        current = std::move(a);
    }
    out.approx = std::move(current);
    return out;
}

} // namespace tsbow
