#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsbow/errors.hpp"

namespace tsbow {

enum class DistanceKind {
    euclidean,
    chi_squared,
    jensen_shannon,
    histogram_intersection,
};

inline std::string_view to_string(DistanceKind k) {
    switch (k) {
        case DistanceKind::euclidean: return "euclidean";
        case DistanceKind::chi_squared: return "chi2";
        case DistanceKind::jensen_shannon: return "js";
        case DistanceKind::histogram_intersection: return "intersection";
    }
    return "?";
}

inline DistanceKind distance_from_name(std::string_view name) {
    if (name == "euclidean" || name == "l2") return DistanceKind::euclidean;
    if (name == "chi2" || name == "chi-squared") return DistanceKind::chi_squared;
    if (name == "js" || name == "jensen-shannon") return DistanceKind::jensen_shannon;
    if (name == "intersection" || name == "hist-intersect")
        return DistanceKind::histogram_intersection;
    throw InvalidInput("unknown distance '" + std::string(name) +
                       "' (euclidean, chi2, js, intersection)");
}

namespace detail {

inline void check_same_length(std::span<const double> h, std::span<const double> k,
                              const char* where) {
    if (h.size() != k.size())
        throw InvalidInput(std::string(where) + ": histogram lengths differ (" +
                           std::to_string(h.size()) + " vs " + std::to_string(k.size()) + ")");
}

// L1-normalize; all-zero input is rejected since it has no distribution.
inline std::vector<double> normalize_histogram(std::span<const double> h, const char* where) {
    double total = 0.0;
    for (double v : h) total += v;
    if (total <= 0.0)
        throw InvalidInput(std::string(where) + ": all-zero histogram");
    std::vector<double> out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) out[i] = h[i] / total;
    return out;
}

} // namespace detail

inline double d_euclidean(std::span<const double> h, std::span<const double> k) {
    detail::check_same_length(h, k, "d_euclidean");
    double acc = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double diff = h[i] - k[i];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

/// Chi-squared distance; the per-bin denominator weighting emphasises rare
/// codewords relative to plain Euclidean.
inline double d_chi2(std::span<const double> h, std::span<const double> k,
                     double eps = 1e-10) {
    detail::check_same_length(h, k, "d_chi2");
    if (eps <= 0.0) throw InvalidInput("d_chi2: eps must be positive");
    double acc = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (h[i] < 0.0 || k[i] < 0.0)
            throw InvalidInput("d_chi2: negative histogram entry at bin " +
                               std::to_string(i));
        const double diff = h[i] - k[i];
        acc += diff * diff / (h[i] + k[i] + eps);
    }
    return acc;
}

/// Jensen-Shannon distance in bits: the symmetrized base-2 KL divergence of
/// the L1-normalized inputs. Every bin is smoothed by eps and re-normalized
/// so sparse histograms with empty bins stay in the KL domain.
inline double d_js(std::span<const double> h, std::span<const double> k,
                   double eps = 1e-10) {
    detail::check_same_length(h, k, "d_js");
    std::vector<double> p = detail::normalize_histogram(h, "d_js");
    std::vector<double> q = detail::normalize_histogram(k, "d_js");
    const double renorm = 1.0 + static_cast<double>(p.size()) * eps;
    double kl_pq = 0.0, kl_qp = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = (p[i] + eps) / renorm;
        const double qi = (q[i] + eps) / renorm;
        kl_pq += pi * std::log2(pi / qi);
        kl_qp += qi * std::log2(qi / pi);
    }
    return 0.5 * (kl_pq + kl_qp);
}

/// One minus the total overlap of the L1-normalized histograms; 0 for equal
/// distributions, 1 for disjoint supports.
inline double d_hist_intersect(std::span<const double> h, std::span<const double> k) {
    detail::check_same_length(h, k, "d_hist_intersect");
    std::vector<double> p = detail::normalize_histogram(h, "d_hist_intersect");
    std::vector<double> q = detail::normalize_histogram(k, "d_hist_intersect");
    double overlap = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) overlap += std::min(p[i], q[i]);
    return 1.0 - overlap;
}

/// Dispatch on the distance kind. Euclidean and chi-squared act on the
/// vectors as given (raw counts by convention); the other two normalize
/// internally.
inline double histogram_distance(DistanceKind kind, std::span<const double> h,
                                 std::span<const double> k) {
    switch (kind) {
        case DistanceKind::euclidean: return d_euclidean(h, k);
        case DistanceKind::chi_squared: return d_chi2(h, k);
        case DistanceKind::jensen_shannon: return d_js(h, k);
        case DistanceKind::histogram_intersection: return d_hist_intersect(h, k);
    }
    throw InvalidInput("histogram_distance: bad kind");
}

} // namespace tsbow
