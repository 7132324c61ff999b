#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tsbow/bow.hpp"
#include "tsbow/dataio.hpp"
#include "tsbow/errors.hpp"
#include "tsbow/metrics.hpp"
#include "tsbow/rng.hpp"
#include "tsbow/signal.hpp"

namespace tsbow {

/// Stratified k-fold assignment: fold_of[i] is the test fold of series i.
struct FoldSplit {
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> fold_of;
    std::vector<std::string> warnings;
};

/// Random stratified partition, deterministic under the seed. Classes are
/// dealt round-robin through a shared counter so fold sizes stay within one
/// of each other overall and per class.
inline FoldSplit kfold_split(const std::vector<std::string>& labels, std::size_t k,
                             std::uint64_t seed) {
    const std::size_t n = labels.size();
    if (k < 2) throw InvalidInput("kfold_split: need k >= 2");
    if (k > n)
        throw InvalidInput("kfold_split: k = " + std::to_string(k) + " exceeds " +
                           std::to_string(n) + " items");
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < n; ++i) by_class[labels[i]].push_back(i);

    FoldSplit split;
    split.k = k;
    split.seed = seed;
    split.fold_of.assign(n, 0);
    std::mt19937_64 rng = make_rng(seed);
    std::size_t counter = 0;
    for (auto& [label, indices] : by_class) {
        if (indices.size() < k)
            split.warnings.push_back("class '" + label + "' has " +
                                     std::to_string(indices.size()) +
                                     " members for " + std::to_string(k) +
                                     " folds; stratification is best-effort");
        shuffle(std::span<std::size_t>(indices), rng);
        for (std::size_t i : indices) split.fold_of[i] = counter++ % k;
    }
    return split;
}

namespace detail {

// Argmin over train items; strict less keeps the earliest index on ties.
inline std::size_t nn_index(std::size_t n_train,
                            const std::function<double(std::size_t)>& dist) {
    if (n_train == 0) throw InvalidInput("nn_classify: empty training set");
    std::size_t best = 0;
    double best_d = dist(0);
    for (std::size_t j = 1; j < n_train; ++j) {
        const double d = dist(j);
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

// Run fn(fold) for fold in [0, k) on up to n_threads workers. Exceptions are
// re-thrown in fold order, so failures surface deterministically.
inline void parallel_folds(std::size_t k, std::size_t n_threads,
                           const std::function<void(std::size_t)>& fn) {
    if (n_threads <= 1 || k <= 1) {
        for (std::size_t f = 0; f < k; ++f) fn(f);
        return;
    }
    std::vector<std::exception_ptr> errors(k);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t f = next.fetch_add(1);
            if (f >= k) return;
            try {
                fn(f);
            } catch (...) {
                errors[f] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t count = std::min(n_threads, k);
    pool.reserve(count);
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace detail

/// Label of the training item with minimum distance to the test
/// representation; ties break to the earliest training index.
inline std::string nn_classify(const std::vector<std::vector<double>>& train,
                               const std::vector<std::string>& train_labels,
                               std::span<const double> test, DistanceKind kind) {
    if (train.size() != train_labels.size())
        throw InvalidInput("nn_classify: representation/label count mismatch");
    const std::size_t best = detail::nn_index(
        train.size(), [&](std::size_t j) { return histogram_distance(kind, test, train[j]); });
    return train_labels[best];
}

/// Cross-validation outcome: per-fold accuracies, pooled confusion matrix,
/// the effective configuration, and wall-clock timings. Timings stay out of
/// the serialized reports so identical seeds give identical files.
struct ExperimentReport {
    std::vector<std::string> class_names;
    std::vector<double> fold_accuracy;
    std::vector<std::size_t> fold_test_counts;
    double mean_accuracy = 0.0; // confusion trace / dataset size
    std::vector<std::vector<std::size_t>> confusion; // [true][predicted]
    std::string config_summary;
    std::vector<std::string> warnings;
    bool degenerate_single_class = false;
    std::vector<double> fold_seconds;
    double total_seconds = 0.0;
};

struct RunOptions {
    bool shared_codebook = false; // train one codebook on all data (leaky, for comparison)
    std::size_t threads = 1;
    // Instrumentation: invoked with the series indices whose segments feed
    // codebook training (fold index, or SIZE_MAX for the shared codebook).
    std::function<void(std::size_t, const std::vector<std::size_t>&)> on_codebook_train;
};

namespace detail {

struct FoldOutcome {
    std::vector<std::pair<std::size_t, std::size_t>> true_pred; // class ordinals
    double seconds = 0.0;
};

inline std::map<std::string, std::size_t>
class_ordinals(const std::vector<std::string>& classes) {
    std::map<std::string, std::size_t> m;
    for (std::size_t c = 0; c < classes.size(); ++c) m[classes[c]] = c;
    return m;
}

// Shared k-fold 1-NN skeleton: representations are built per fold by
// `prepare`, which returns one vector per series (training leakage is the
// prepare step's concern).
inline ExperimentReport
cross_validate(const std::vector<std::string>& labels,
               const std::vector<std::string>& classes, std::size_t k_folds,
               std::uint64_t seed, std::size_t threads,
               const std::function<std::vector<std::vector<double>>(
                   std::size_t, const std::vector<std::size_t>&)>& prepare,
               const std::function<double(const std::vector<double>&,
                                           const std::vector<double>&)>& dist) {
    const std::size_t n = labels.size();
    const FoldSplit split = kfold_split(labels, k_folds, seed);
    const auto ordinal = class_ordinals(classes);

    ExperimentReport report;
    report.class_names = classes;
    report.warnings = split.warnings;
    report.degenerate_single_class = classes.size() < 2;
    if (report.degenerate_single_class)
        report.warnings.push_back("dataset has a single class; accuracy is trivially 1");
    report.fold_accuracy.assign(k_folds, 0.0);
    report.fold_test_counts.assign(k_folds, 0);
    report.fold_seconds.assign(k_folds, 0.0);
    report.confusion.assign(classes.size(),
                            std::vector<std::size_t>(classes.size(), 0));

    std::vector<FoldOutcome> outcomes(k_folds);
    const auto t_start = std::chrono::steady_clock::now();
    parallel_folds(k_folds, threads, [&](std::size_t f) {
        const auto f_start = std::chrono::steady_clock::now();
        std::vector<std::size_t> train_idx, test_idx;
        for (std::size_t i = 0; i < n; ++i)
            (split.fold_of[i] == f ? test_idx : train_idx).push_back(i);

        const std::vector<std::vector<double>> reps = prepare(f, train_idx);
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        pairs.reserve(test_idx.size());
        std::size_t correct = 0;
        for (std::size_t i : test_idx) {
            const std::size_t j = train_idx[detail::nn_index(
                train_idx.size(),
                [&](std::size_t t) { return dist(reps[i], reps[train_idx[t]]); })];
            pairs.emplace_back(ordinal.at(labels[i]), ordinal.at(labels[j]));
            if (labels[i] == labels[j]) ++correct;
        }
        outcomes[f].true_pred = std::move(pairs);
        outcomes[f].seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - f_start)
                .count();
        report.fold_accuracy[f] =
            test_idx.empty() ? 0.0
                             : static_cast<double>(correct) /
                                   static_cast<double>(test_idx.size());
        report.fold_test_counts[f] = test_idx.size();
    });
    report.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    std::size_t trace = 0;
    for (std::size_t f = 0; f < k_folds; ++f) {
        report.fold_seconds[f] = outcomes[f].seconds;
        for (const auto& [t, p] : outcomes[f].true_pred) {
            ++report.confusion[t][p];
            if (t == p) ++trace;
        }
    }
    report.mean_accuracy = n == 0 ? 0.0 : static_cast<double>(trace) / static_cast<double>(n);
    return report;
}

} // namespace detail

/// Full bag-of-words protocol: per fold, learn the codebook from the
/// training series only, represent everything as codeword histograms, and
/// 1-NN classify the held-out fold. The shared_codebook option reproduces
/// the train-once variant instead (test segments then reach clustering).
inline ExperimentReport run_experiment(const Dataset& dataset, const BowConfig& cfg,
                                       DistanceKind kind, std::size_t k_folds,
                                       std::uint64_t seed,
                                       const RunOptions& options = {}) {
    validate(cfg);
    if (dataset.series.empty()) throw InvalidInput("run_experiment: empty dataset");
    std::vector<std::string> labels;
    labels.reserve(dataset.size());
    const std::set<std::string> class_set(dataset.classes.begin(), dataset.classes.end());
    for (const auto& ts : dataset.series) {
        if (!class_set.contains(ts.label))
            throw InvalidInput("run_experiment: series '" + ts.id + "' has label '" +
                               ts.label + "' outside the dataset's class set");
        labels.push_back(ts.label);
    }

    Codebook shared_cb;
    if (options.shared_codebook) {
        std::vector<const TimeSeries*> all;
        std::vector<std::size_t> all_idx(dataset.size());
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            all.push_back(&dataset.series[i]);
            all_idx[i] = i;
        }
        if (options.on_codebook_train)
            options.on_codebook_train(static_cast<std::size_t>(-1), all_idx);
        BowConfig shared_cfg = cfg;
        shared_cfg.seed = mix_seed(seed, 0xC0DE);
        shared_cb = train_codebook(collect_features(all, shared_cfg), shared_cfg);
    }

    auto prepare = [&](std::size_t fold, const std::vector<std::size_t>& train_idx) {
        Codebook cb;
        if (options.shared_codebook) {
            cb = shared_cb;
        } else {
            if (options.on_codebook_train) options.on_codebook_train(fold, train_idx);
            std::vector<const TimeSeries*> train_series;
            train_series.reserve(train_idx.size());
            for (std::size_t i : train_idx) train_series.push_back(&dataset.series[i]);
            BowConfig fold_cfg = cfg;
            fold_cfg.seed = mix_seed(seed, 1000 + fold);
            cb = train_codebook(collect_features(train_series, fold_cfg), fold_cfg);
        }
        std::vector<std::vector<double>> reps(dataset.size());
        for (std::size_t i = 0; i < dataset.size(); ++i)
            reps[i] = build_histogram(cb, dataset.series[i]).as_doubles();
        return reps;
    };

    ExperimentReport report = detail::cross_validate(
        labels, dataset.classes, k_folds, seed, options.threads, prepare,
        [kind](const std::vector<double>& a, const std::vector<double>& b) {
            return histogram_distance(kind, a, b);
        });

    const bool normalized_kind = kind == DistanceKind::jensen_shannon ||
                                 kind == DistanceKind::histogram_intersection;
    report.config_summary =
        "window_len=" + std::to_string(cfg.window_len) +
        " stride=" + std::to_string(cfg.stride) +
        " codebook_size=" + std::to_string(cfg.codebook_size) +
        " wavelet=" + cfg.wavelet +
        " max_train_segments=" + std::to_string(cfg.max_train_segments) +
        " max_iter=" + std::to_string(cfg.max_iter) +
        " distance=" + std::string(to_string(kind)) +
        " histogram_scale=" + (normalized_kind ? "normalized" : "raw_counts") +
        " folds=" + std::to_string(k_folds) + " seed=" + std::to_string(seed) +
        " shared_codebook=" + (options.shared_codebook ? "1" : "0");
    return report;
}

/// k-fold 1-NN over precomputed per-series representations with an arbitrary
/// distance; used for the raw-series and transform-domain baselines.
inline ExperimentReport run_representation_experiment(
    const std::vector<std::vector<double>>& representations,
    const std::vector<std::string>& labels,
    const std::function<double(const std::vector<double>&, const std::vector<double>&)>&
        dist,
    std::size_t k_folds, std::uint64_t seed, std::size_t threads = 1,
    std::string config_summary = {}) {
    if (representations.size() != labels.size())
        throw InvalidInput("run_representation_experiment: size mismatch");
    std::set<std::string> class_set(labels.begin(), labels.end());
    const std::vector<std::string> classes(class_set.begin(), class_set.end());
    ExperimentReport report = detail::cross_validate(
        labels, classes, k_folds, seed, threads,
        [&](std::size_t, const std::vector<std::size_t>&) { return representations; },
        dist);
    report.config_summary = std::move(config_summary);
    return report;
}

enum class SweepAxis { window_len, codebook_size, distance, snr_db };

inline std::string_view to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::window_len: return "window_len";
        case SweepAxis::codebook_size: return "codebook_size";
        case SweepAxis::distance: return "distance";
        case SweepAxis::snr_db: return "snr_db";
    }
    return "?";
}

inline SweepAxis sweep_axis_from_name(std::string_view name) {
    if (name == "window_len") return SweepAxis::window_len;
    if (name == "codebook_size") return SweepAxis::codebook_size;
    if (name == "distance") return SweepAxis::distance;
    if (name == "snr_db") return SweepAxis::snr_db;
    throw InvalidInput("unknown sweep axis '" + std::string(name) +
                       "' (window_len, codebook_size, distance, snr_db)");
}

struct SweepPoint {
    std::string value;
    double mean_accuracy = 0.0;
    bool skipped = false;
    std::string note;
};

/// One cross-validated run per axis value with everything else held fixed.
/// Values that fail axis validation are skipped with a note; the fold split
/// is shared across values (same labels, folds, seed).
inline std::vector<SweepPoint> sweep(const Dataset& dataset, SweepAxis axis,
                                     const std::vector<std::string>& values,
                                     const BowConfig& base, DistanceKind base_kind,
                                     std::size_t k_folds, std::uint64_t seed,
                                     const RunOptions& options = {}) {
    if (values.empty()) throw InvalidInput("sweep: no axis values");
    const std::size_t min_window = wavelet_filters(base.wavelet).length();
    std::vector<SweepPoint> points;
    points.reserve(values.size());
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
        const std::string& value = values[vi];
        SweepPoint point;
        point.value = value;
        BowConfig cfg = base;
        DistanceKind kind = base_kind;
        const Dataset* data = &dataset;
        Dataset noisy;
        try {
            char* end = nullptr;
            switch (axis) {
                case SweepAxis::window_len: {
                    const unsigned long v = std::strtoul(value.c_str(), &end, 10);
                    if (*end != '\0' || v < min_window)
                        throw InvalidInput("window_len must be an integer >= " +
                                           std::to_string(min_window));
                    cfg.window_len = v;
                    break;
                }
                case SweepAxis::codebook_size: {
                    const unsigned long v = std::strtoul(value.c_str(), &end, 10);
                    if (*end != '\0' || v < 2)
                        throw InvalidInput("codebook_size must be an integer >= 2");
                    cfg.codebook_size = v;
                    if (cfg.max_train_segments < v) cfg.max_train_segments = v;
                    break;
                }
                case SweepAxis::distance:
                    kind = distance_from_name(value);
                    break;
                case SweepAxis::snr_db: {
                    const double snr = std::strtod(value.c_str(), &end);
                    if (*end != '\0' || !std::isfinite(snr))
                        throw InvalidInput("snr_db must be a finite number");
                    noisy = dataset;
                    for (std::size_t i = 0; i < noisy.series.size(); ++i) {
                        std::mt19937_64 rng = make_rng(mix_seed(seed, 0xA3D0 + vi), i);
                        noisy.series[i] = add_awgn(noisy.series[i], snr, rng);
                    }
                    data = &noisy;
                    break;
                }
            }
        } catch (const InvalidInput& e) {
            point.skipped = true;
            point.note = std::string("skipped: ") + e.what();
            points.push_back(std::move(point));
            continue;
        }
        const ExperimentReport report =
            run_experiment(*data, cfg, kind, k_folds, seed, options);
        point.mean_accuracy = report.mean_accuracy;
        points.push_back(std::move(point));
    }
    return points;
}

namespace detail {

inline std::string format_accuracy(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace detail

/// CSV: config comment lines, then one row per fold plus a mean row.
inline void write_report_csv(std::ostream& out, const ExperimentReport& report) {
    out << "# tsbow report v1\n";
    if (!report.config_summary.empty()) out << "# config " << report.config_summary << '\n';
    for (const auto& w : report.warnings) out << "# warning " << w << '\n';
    out << "fold,accuracy,n_test\n";
    std::size_t total = 0;
    for (std::size_t f = 0; f < report.fold_accuracy.size(); ++f) {
        out << f << ',' << detail::format_accuracy(report.fold_accuracy[f]) << ','
            << report.fold_test_counts[f] << '\n';
        total += report.fold_test_counts[f];
    }
    out << "mean," << detail::format_accuracy(report.mean_accuracy) << ',' << total << '\n';
}

inline void write_confusion_csv(std::ostream& out, const ExperimentReport& report) {
    out << "# tsbow confusion v1 (rows = true class, columns = predicted)\n";
    out << "label";
    for (const auto& c : report.class_names) out << ',' << c;
    out << '\n';
    for (std::size_t t = 0; t < report.confusion.size(); ++t) {
        out << report.class_names[t];
        for (std::size_t p = 0; p < report.confusion[t].size(); ++p)
            out << ',' << report.confusion[t][p];
        out << '\n';
    }
}

inline void write_sweep_csv(std::ostream& out, SweepAxis axis,
                            const std::vector<SweepPoint>& points,
                            const std::string& config_summary) {
    out << "# tsbow sweep v1\n";
    out << "# axis " << to_string(axis) << '\n';
    if (!config_summary.empty()) out << "# config " << config_summary << '\n';
    out << "value,mean_accuracy,note\n";
    for (const auto& p : points) {
        out << p.value << ',';
        if (!p.skipped) out << detail::format_accuracy(p.mean_accuracy);
        out << ',' << p.note << '\n';
    }
}

} // namespace tsbow
