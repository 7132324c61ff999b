#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tsbow/bow.hpp"
#include "tsbow/errors.hpp"
#include "tsbow/rng.hpp"
#include "tsbow/signal.hpp"

namespace tsbow {

/// A labeled collection of (possibly unequal-length) time series.
struct Dataset {
    std::vector<TimeSeries> series;
    std::string name;
    std::vector<std::string> classes; // sorted, distinct
    std::string provenance;

    std::size_t size() const { return series.size(); }
};

enum class DataFormat {
    directory, // class subdirectories of one-sample-per-line text files
    table,     // one series per row, leading label column, comma or tab separated
};

namespace detail {

// "%.17g" survives a text round trip bit-for-bit for finite doubles.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline bool parse_double(std::string_view token, double& out) {
    const std::string term(token);
    char* end = nullptr;
    out = std::strtod(term.c_str(), &end);
    return end != term.c_str() && *end == '\0';
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string> sorted_classes(const std::vector<TimeSeries>& series) {
    std::set<std::string> labels;
    for (const auto& ts : series) labels.insert(ts.label);
    return {labels.begin(), labels.end()};
}

inline TimeSeries load_series_file(const std::filesystem::path& file,
                                   const std::string& label) {
    std::ifstream in(file);
    if (!in) throw FormatError("cannot open " + file.string());
    TimeSeries ts;
    ts.label = label;
    ts.id = file.filename().string();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view token = trim(line);
        if (token.empty()) continue;
        double v;
        if (!parse_double(token, v))
            throw FormatError(file.string() + ":" + std::to_string(lineno) +
                              ": not a number: '" + std::string(token) + "'");
        if (!std::isfinite(v))
            throw FormatError(file.string() + ":" + std::to_string(lineno) +
                              ": non-finite sample");
        ts.values.push_back(v);
    }
    if (ts.values.empty())
        throw FormatError(file.string() + ": no samples");
    return ts;
}

} // namespace detail

/// Load a dataset from disk. Directory layout: one subdirectory per class,
/// one plain-text series per file. Table layout: one series per row, first
/// column is the label.
inline Dataset load_dataset(const std::filesystem::path& path, DataFormat format) {
    namespace fs = std::filesystem;
    if (!fs::exists(path))
        throw InvalidInput("load_dataset: path does not exist: " + path.string());

    Dataset ds;
    ds.name = path.stem().string();
    if (format == DataFormat::directory) {
        if (!fs::is_directory(path))
            throw InvalidInput("load_dataset: not a directory: " + path.string());
        std::vector<fs::path> class_dirs;
        for (const auto& entry : fs::directory_iterator(path))
            if (entry.is_directory()) class_dirs.push_back(entry.path());
        std::sort(class_dirs.begin(), class_dirs.end());
        if (class_dirs.empty())
            throw FormatError("load_dataset: no class subdirectories in " + path.string());
        for (const auto& dir : class_dirs) {
            const std::string label = dir.filename().string();
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(dir))
                if (entry.is_regular_file()) files.push_back(entry.path());
            std::sort(files.begin(), files.end());
            for (const auto& file : files)
                ds.series.push_back(detail::load_series_file(file, label));
        }
        ds.provenance = "directory layout: " + path.string();
    } else {
        std::ifstream in(path);
        if (!in) throw FormatError("cannot open " + path.string());
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (detail::trim(line).empty()) continue;
            const char sep = line.find('\t') != std::string::npos ? '\t' : ',';
            std::stringstream row(line);
            std::string field;
            TimeSeries ts;
            std::size_t col = 0;
            while (std::getline(row, field, sep)) {
                ++col;
                const std::string_view token = detail::trim(field);
                if (col == 1) {
                    if (token.empty())
                        throw FormatError(path.string() + ":" + std::to_string(lineno) +
                                          ": empty label");
                    ts.label = std::string(token);
                    continue;
                }
                double v;
                if (!detail::parse_double(token, v))
                    throw FormatError(path.string() + ":" + std::to_string(lineno) +
                                      ": not a number: '" + std::string(token) + "'");
                if (!std::isfinite(v))
                    throw FormatError(path.string() + ":" + std::to_string(lineno) +
                                      ": non-finite sample");
                ts.values.push_back(v);
            }
            if (ts.values.empty())
                throw FormatError(path.string() + ":" + std::to_string(lineno) +
                                  ": row has a label but no samples");
            ts.id = "row" + std::to_string(lineno);
            ds.series.push_back(std::move(ts));
        }
        if (ds.series.empty())
            throw FormatError("load_dataset: no rows in " + path.string());
        ds.provenance = "table layout: " + path.string();
    }
    ds.classes = detail::sorted_classes(ds.series);
    return ds;
}

/// Cut `count` windows from one long record at uniformly random starts, with
/// lengths uniform in [len_min, len_max]. Windows inherit the source label.
inline std::vector<TimeSeries>
extract_random_windows(const TimeSeries& long_signal, std::size_t count,
                       std::size_t len_min, std::size_t len_max, std::uint64_t seed) {
    if (len_min == 0 || len_min > len_max)
        throw InvalidInput("extract_random_windows: need 1 <= len_min <= len_max");
    if (long_signal.size() < len_max)
        throw InvalidInput("extract_random_windows: source length " +
                           std::to_string(long_signal.size()) +
                           " is shorter than len_max " + std::to_string(len_max));
    std::mt19937_64 rng = make_rng(seed);
    std::vector<TimeSeries> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t len =
            len_min + static_cast<std::size_t>(bounded_uint(rng, len_max - len_min + 1));
        const std::size_t start =
            static_cast<std::size_t>(bounded_uint(rng, long_signal.size() - len + 1));
        TimeSeries w;
        w.values.assign(long_signal.values.begin() + static_cast<std::ptrdiff_t>(start),
                        long_signal.values.begin() + static_cast<std::ptrdiff_t>(start + len));
        w.label = long_signal.label;
        w.id = long_signal.id + "_w" + std::to_string(i);
        out.push_back(std::move(w));
    }
    return out;
}

/// Recipe for the synthetic benchmark corpus: each class gets a dictionary
/// of short waveforms; a series is a random concatenation of its class's
/// motifs plus additive Gaussian noise.
struct SyntheticSpec {
    std::size_t n_classes = 3;
    std::size_t series_per_class = 100;
    std::size_t len_min = 1024;
    std::size_t len_max = 1024;
    std::size_t motif_len = 64;
    std::size_t motifs_per_class = 4;
    std::size_t gap_max = 32; // quiet samples before each motif, uniform in [0, gap_max]
    double noise_sigma = 0.1;
    std::uint64_t seed = 0;
    // [class][motif][sample]; built by default_motifs when left empty
    std::vector<std::vector<std::vector<double>>> motifs;
};

/// Hann-windowed sine bursts with interleaved frequencies, so neighboring
/// frequencies belong to different classes and coarse codebooks blur them.
inline std::vector<std::vector<std::vector<double>>>
default_motifs(std::size_t n_classes, std::size_t motifs_per_class, std::size_t motif_len) {
    if (n_classes == 0 || motifs_per_class == 0 || motif_len < 8)
        throw InvalidInput("default_motifs: need n_classes, motifs_per_class >= 1 "
                           "and motif_len >= 8");
    const double pi = std::acos(-1.0);
    std::vector<std::vector<std::vector<double>>> dict(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
        dict[c].resize(motifs_per_class);
        for (std::size_t m = 0; m < motifs_per_class; ++m) {
            const double cycles = 3.0 + static_cast<double>(c + n_classes * m);
            std::vector<double>& motif = dict[c][m];
            motif.resize(motif_len);
            for (std::size_t t = 0; t < motif_len; ++t) {
                const double u = static_cast<double>(t) / static_cast<double>(motif_len);
                const double hann = 0.5 - 0.5 * std::cos(2.0 * pi * u);
                motif[t] = hann * std::sin(2.0 * pi * cycles * u);
            }
        }
    }
    return dict;
}

inline Dataset gen_synthetic(const SyntheticSpec& spec) {
    if (spec.n_classes == 0 || spec.series_per_class == 0)
        throw InvalidInput("gen_synthetic: need at least one class and one series");
    if (spec.len_min == 0 || spec.len_min > spec.len_max)
        throw InvalidInput("gen_synthetic: need 1 <= len_min <= len_max");
    auto motifs = spec.motifs.empty()
                      ? default_motifs(spec.n_classes, spec.motifs_per_class, spec.motif_len)
                      : spec.motifs;
    if (motifs.size() != spec.n_classes)
        throw InvalidInput("gen_synthetic: motif dictionary count does not match classes");
    for (std::size_t c = 0; c < motifs.size(); ++c) {
        if (motifs[c].empty())
            throw InvalidInput("gen_synthetic: empty motif dictionary for class " +
                               std::to_string(c));
        for (std::size_t o = 0; o < c; ++o)
            if (motifs[o] == motifs[c])
                throw InvalidInput("gen_synthetic: classes " + std::to_string(o) + " and " +
                                   std::to_string(c) + " have identical motif dictionaries");
    }

    Dataset ds;
    ds.name = "synthetic";
    ds.provenance = "gen_synthetic classes=" + std::to_string(spec.n_classes) +
                    " per_class=" + std::to_string(spec.series_per_class) +
                    " len=[" + std::to_string(spec.len_min) + "," +
                    std::to_string(spec.len_max) + "]" +
                    " motif_len=" + std::to_string(spec.motif_len) +
                    " motifs_per_class=" + std::to_string(spec.motifs_per_class) +
                    " gap_max=" + std::to_string(spec.gap_max) +
                    " noise_sigma=" + detail::format_double(spec.noise_sigma) +
                    " seed=" + std::to_string(spec.seed);
    char idbuf[64];
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
        const std::string label = "c" + std::to_string(c);
        for (std::size_t s = 0; s < spec.series_per_class; ++s) {
            std::mt19937_64 rng = make_rng(spec.seed, c * spec.series_per_class + s);
            const std::size_t len =
                spec.len_min +
                static_cast<std::size_t>(bounded_uint(rng, spec.len_max - spec.len_min + 1));
            TimeSeries ts;
            ts.label = label;
            std::snprintf(idbuf, sizeof(idbuf), "c%zu_s%03zu", c, s);
            ts.id = idbuf;
            ts.values.reserve(len);
            while (ts.values.size() < len) {
                // random quiet gap first, so motif positions never align
                // across series and plain pointwise comparison gets no help
                if (spec.gap_max > 0) {
                    std::size_t gap =
                        static_cast<std::size_t>(bounded_uint(rng, spec.gap_max + 1));
                    for (; gap > 0 && ts.values.size() < len; --gap)
                        ts.values.push_back(0.0);
                }
                const auto& motif =
                    motifs[c][static_cast<std::size_t>(bounded_uint(rng, motifs[c].size()))];
                for (double v : motif) {
                    if (ts.values.size() == len) break;
                    ts.values.push_back(v);
                }
            }
            if (spec.noise_sigma > 0.0) {
                std::normal_distribution<double> gauss(0.0, spec.noise_sigma);
                for (double& v : ts.values) v += gauss(rng);
            }
            ds.series.push_back(std::move(ts));
        }
    }
    ds.classes = detail::sorted_classes(ds.series);
    return ds;
}

/// Write a dataset in the directory layout load_dataset reads back. A
/// manifest.txt with the provenance string sits beside the class
/// directories; the loader only descends into subdirectories, so it is
/// ignored on the way back in.
inline void write_dataset_dir(const Dataset& ds, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream manifest(dir / "manifest.txt");
        manifest << "name " << ds.name << '\n' << "provenance " << ds.provenance << '\n'
                 << "series " << ds.size() << '\n' << "classes " << ds.classes.size()
                 << '\n';
    }
    std::size_t counter = 0;
    for (const auto& ts : ds.series) {
        const fs::path class_dir = dir / (ts.label.empty() ? "unlabeled" : ts.label);
        fs::create_directories(class_dir);
        std::string fname = ts.id;
        if (fname.empty()) fname = "s" + std::to_string(counter);
        std::ofstream out(class_dir / (fname + ".txt"));
        if (!out) throw FormatError("cannot write " + (class_dir / fname).string());
        for (double v : ts.values) out << detail::format_double(v) << '\n';
        ++counter;
    }
}

inline constexpr std::string_view kCodebookMagic = "tsbow-codebook";
inline constexpr int kCodebookVersion = 1;

/// Versioned plain-text codebook format; centroids print with 17 significant
/// digits so the round trip is exact for 64-bit floats.
inline void save_codebook(const Codebook& cb, const std::filesystem::path& path) {
    if (cb.centroids.empty())
        throw InvalidInput("save_codebook: empty codebook");
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path.string());
    out << kCodebookMagic << " v" << kCodebookVersion << '\n'
        << "k " << cb.size() << '\n'
        << "dim " << cb.dim() << '\n'
        << "wavelet " << cb.config.wavelet << '\n'
        << "window_len " << cb.config.window_len << '\n'
        << "stride " << cb.config.stride << '\n'
        << "max_train_segments " << cb.config.max_train_segments << '\n'
        << "max_iter " << cb.config.max_iter << '\n'
        << "seed " << cb.config.seed << '\n'
        << "iterations " << cb.stats.iterations << '\n'
        << "objective " << detail::format_double(cb.stats.objective) << '\n'
        << "segments_used " << cb.stats.segments_used << '\n';
    for (const auto& centroid : cb.centroids) {
        out << "centroid";
        for (double v : centroid) out << ' ' << detail::format_double(v);
        out << '\n';
    }
    if (!out) throw FormatError("write failed: " + path.string());
}

inline Codebook load_codebook(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    const auto fail = [&](const std::string& what) -> FormatError {
        return FormatError("load_codebook: " + path.string() + ": " + what);
    };

    std::string magic, version;
    if (!(in >> magic >> version)) throw fail("missing header");
    if (magic != kCodebookMagic) throw fail("not a codebook file");
    if (version != "v" + std::to_string(kCodebookVersion))
        throw fail("unsupported version '" + version + "'");

    Codebook cb;
    std::size_t k = 0, dim = 0;
    auto read_kv = [&](std::string_view key, auto& value) {
        std::string got;
        if (!(in >> got >> value) || got != key)
            throw fail("expected '" + std::string(key) + "' field");
    };
    read_kv("k", k);
    read_kv("dim", dim);
    read_kv("wavelet", cb.config.wavelet);
    read_kv("window_len", cb.config.window_len);
    read_kv("stride", cb.config.stride);
    read_kv("max_train_segments", cb.config.max_train_segments);
    read_kv("max_iter", cb.config.max_iter);
    read_kv("seed", cb.config.seed);
    read_kv("iterations", cb.stats.iterations);
    read_kv("objective", cb.stats.objective);
    read_kv("segments_used", cb.stats.segments_used);
    if (k == 0) throw fail("invariant violation: k = 0");
    if (dim == 0) throw fail("invariant violation: dim = 0");
    cb.config.codebook_size = k;

    cb.centroids.assign(k, FeatureVector(dim));
    for (std::size_t c = 0; c < k; ++c) {
        std::string tag;
        if (!(in >> tag) || tag != "centroid")
            throw fail("truncated: expected centroid " + std::to_string(c));
        for (std::size_t d = 0; d < dim; ++d) {
            if (!(in >> cb.centroids[c][d]))
                throw fail("truncated centroid " + std::to_string(c));
            if (!std::isfinite(cb.centroids[c][d]))
                throw fail("invariant violation: non-finite centroid entry");
        }
    }
    std::string extra;
    if (in >> extra) throw fail("trailing content: '" + extra + "'");
    return cb;
}

/// One row per series: id, label, then the K codeword counts. The codebook
/// configuration rides along as comment lines for reproducibility.
inline void write_histograms_csv(std::ostream& out, const Codebook& cb,
                                 const std::vector<TimeSeries>& series,
                                 const std::vector<BowHistogram>& hists) {
    if (series.size() != hists.size())
        throw InvalidInput("write_histograms_csv: series/histogram count mismatch");
    out << "# tsbow histograms v1\n"
        << "# codebook k=" << cb.size() << " dim=" << cb.dim()
        << " wavelet=" << cb.config.wavelet << " window_len=" << cb.config.window_len
        << " stride=" << cb.config.stride << " seed=" << cb.config.seed << '\n';
    const std::size_t k = hists.empty() ? 0 : hists.front().counts.size();
    out << "id,label";
    for (std::size_t j = 0; j < k; ++j) out << ",h" << j;
    out << '\n';
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << series[i].id << ',' << series[i].label;
        for (std::uint32_t c : hists[i].counts) out << ',' << c;
        out << '\n';
    }
}

} // namespace tsbow
