#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tsbow/errors.hpp"

namespace tsbow {

/// A real-valued sequence with an optional class label and source id.
/// Lengths may differ across series within one dataset.
struct TimeSeries {
    std::vector<double> values;
    std::string label; // empty = unlabeled
    std::string id;    // empty = anonymous

    std::size_t size() const { return values.size(); }
};

struct ZNormed {
    std::vector<double> values;
    bool degenerate = false; // zero-variance input, mapped to all zeros
};

/// Shift to zero mean and scale to unit population standard deviation.
/// Flat inputs come out as all zeros with the degenerate flag set.
inline ZNormed znormalize(std::span<const double> x) {
    if (x.size() < 2)
        throw InvalidInput("znormalize: need at least 2 samples, got " +
                           std::to_string(x.size()));
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(x.size());
    const double sigma = std::sqrt(var);

    ZNormed out;
    out.values.resize(x.size());
    if (sigma <= 1e-14 * (std::abs(mean) + 1.0)) {
        out.degenerate = true; // all zeros already
        return out;
    }
    for (std::size_t i = 0; i < x.size(); ++i)
        out.values[i] = (x[i] - mean) / sigma;
    return out;
}

/// Mean squared deviation from the mean (population variance).
inline double signal_power(std::span<const double> x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    return var / static_cast<double>(x.size());
}

/// Add i.i.d. zero-mean Gaussian noise with variance P_x / 10^(snr_db/10),
/// where P_x is the signal's variance about its mean.
inline TimeSeries add_awgn(const TimeSeries& x, double snr_db, std::mt19937_64& rng) {
    if (x.size() < 2)
        throw InvalidInput("add_awgn: need at least 2 samples");
    if (!std::isfinite(snr_db))
        throw InvalidInput("add_awgn: snr_db must be finite");
    const double power = signal_power(x.values);
    if (power <= 0.0)
        throw InvalidInput("add_awgn: zero-power input signal");
    const double noise_sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));

    TimeSeries out = x;
    std::normal_distribution<double> gauss(0.0, noise_sigma);
    for (double& v : out.values) v += gauss(rng);
    return out;
}

/// Piecewise-linear resampling onto a uniform grid of new_len points.
/// Endpoints are preserved exactly.
inline TimeSeries resize_linear(const TimeSeries& x, std::size_t new_len) {
    if (x.size() < 2)
        throw InvalidInput("resize_linear: need at least 2 input samples");
    if (new_len < 2)
        throw InvalidInput("resize_linear: new length must be >= 2, got " +
                           std::to_string(new_len));
    TimeSeries out = x;
    if (new_len == x.size()) return out;
    out.values.assign(new_len, 0.0);
    const double scale = static_cast<double>(x.size() - 1) /
                         static_cast<double>(new_len - 1);
    for (std::size_t i = 0; i < new_len; ++i) {
        const double pos = static_cast<double>(i) * scale;
        std::size_t lo = static_cast<std::size_t>(pos);
        if (lo >= x.size() - 1) lo = x.size() - 2;
        const double frac = pos - static_cast<double>(lo);
        out.values[i] = x.values[lo] * (1.0 - frac) + x.values[lo + 1] * frac;
    }
    out.values.front() = x.values.front();
    out.values.back() = x.values.back();
    return out;
}

/// Nearest-index decimation to target_len samples, no anti-alias filter.
/// Keeps the first sample; selected indices are strictly increasing.
inline TimeSeries downsample(const TimeSeries& x, std::size_t target_len) {
    if (target_len == 0)
        throw InvalidInput("downsample: target length must be positive");
    if (target_len > x.size())
        throw InvalidInput("downsample: target length " + std::to_string(target_len) +
                           " exceeds input length " + std::to_string(x.size()));
    TimeSeries out = x;
    if (target_len == x.size()) return out;
    out.values.resize(target_len);
    for (std::size_t i = 0; i < target_len; ++i)
        out.values[i] = x.values[i * x.size() / target_len];
    return out;
}

} // namespace tsbow
