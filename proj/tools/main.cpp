// tsbow command line: synthetic data generation, codebook training,
// histogram transforms, cross-validated evaluation, parameter/noise sweeps,
// and the transform-domain baselines. Logs go to stderr; results go to the
// --out path (or stdout with `--out -`), byte-identical under a fixed seed.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tsbow/tsbow.hpp"

namespace {

namespace fs = std::filesystem;

std::size_t default_threads() {
    if (const char* env = std::getenv("TSBOW_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return v;
        std::cerr << "warning: ignoring invalid TSBOW_THREADS='" << env << "'\n";
    }
    return 1;
}

struct DataArgs {
    std::string path;
    std::string format = "auto"; // auto | dir | table
};

void add_data_options(CLI::App* cmd, DataArgs& args) {
    cmd->add_option("--data", args.path, "Dataset path (directory or table file)")
        ->required();
    cmd->add_option("--format", args.format, "Input layout: dir, table, or auto")
        ->check(CLI::IsMember({"auto", "dir", "table"}))
        ->capture_default_str();
}

tsbow::Dataset load_data(const DataArgs& args) {
    tsbow::DataFormat format;
    if (args.format == "dir") {
        format = tsbow::DataFormat::directory;
    } else if (args.format == "table") {
        format = tsbow::DataFormat::table;
    } else {
        format = fs::is_directory(args.path) ? tsbow::DataFormat::directory
                                             : tsbow::DataFormat::table;
    }
    tsbow::Dataset ds = tsbow::load_dataset(args.path, format);
    std::cerr << "loaded " << ds.size() << " series, " << ds.classes.size()
              << " classes from " << args.path << "\n";
    return ds;
}

void add_bow_options(CLI::App* cmd, tsbow::BowConfig& cfg) {
    cmd->add_option("--window", cfg.window_len, "Local segment length")
        ->capture_default_str();
    cmd->add_option("--stride", cfg.stride, "Sliding-window step")
        ->capture_default_str();
    cmd->add_option("--k", cfg.codebook_size, "Codebook size")->capture_default_str();
    cmd->add_option("--wavelet", cfg.wavelet, "Segment wavelet (db1, db2, db3)")
        ->capture_default_str();
    cmd->add_option("--max-train-segments", cfg.max_train_segments,
                    "Cap on segments entering clustering")
        ->capture_default_str();
    cmd->add_option("--max-iter", cfg.max_iter, "k-means iteration cap")
        ->capture_default_str();
}

// Writes `body` to the --out target; "-" streams to stdout.
void write_output(const std::string& out_path, const std::string& body) {
    if (out_path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw tsbow::FormatError("cannot write output file " + out_path);
    out << body;
    if (!out) throw tsbow::FormatError("write failed: " + out_path);
}

void log_report(const tsbow::ExperimentReport& report) {
    std::cerr << "mean accuracy " << report.mean_accuracy << " over "
              << report.fold_accuracy.size() << " folds in " << report.total_seconds
              << "s\n";
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"bag-of-words time-series classification toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::size_t threads = default_threads();
    app.add_option("--seed", seed, "Random seed for every stochastic step")
        ->capture_default_str();
    app.add_option("--threads", threads,
                   "Worker threads for folds and sweep points (env TSBOW_THREADS)")
        ->capture_default_str();

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "Generate a synthetic motif corpus");
    tsbow::SyntheticSpec spec;
    std::string gen_out;
    std::size_t gen_length = 1024;
    gen->add_option("--out", gen_out, "Output dataset directory")->required();
    gen->add_option("--classes", spec.n_classes, "Number of classes")
        ->capture_default_str();
    gen->add_option("--per-class", spec.series_per_class, "Series per class")
        ->capture_default_str();
    gen->add_option("--length", gen_length, "Series length (sets min and max)")
        ->capture_default_str();
    gen->add_option("--len-min", spec.len_min, "Minimum series length (overrides --length)");
    gen->add_option("--len-max", spec.len_max, "Maximum series length (overrides --length)");
    gen->add_option("--motif-len", spec.motif_len, "Motif length")->capture_default_str();
    gen->add_option("--motifs-per-class", spec.motifs_per_class, "Motifs per class")
        ->capture_default_str();
    gen->add_option("--gap-max", spec.gap_max, "Max quiet gap between motifs")
        ->capture_default_str();
    gen->add_option("--noise-sigma", spec.noise_sigma, "Additive Gaussian noise sigma")
        ->capture_default_str();

    // train-codebook
    auto* train = app.add_subcommand("train-codebook",
                                     "Learn a codeword codebook from a dataset");
    DataArgs train_data;
    tsbow::BowConfig train_cfg;
    std::string train_out;
    add_data_options(train, train_data);
    add_bow_options(train, train_cfg);
    train->add_option("--out", train_out, "Codebook output file")->required();

    // transform
    auto* transform = app.add_subcommand(
        "transform", "Represent every series as a codeword histogram");
    DataArgs transform_data;
    std::string transform_cb, transform_out = "-";
    add_data_options(transform, transform_data);
    transform->add_option("--codebook", transform_cb, "Codebook file from train-codebook")
        ->required();
    transform->add_option("--out", transform_out, "Histogram CSV ('-' = stdout)")
        ->capture_default_str();

    // evaluate
    auto* evaluate =
        app.add_subcommand("evaluate", "Cross-validated 1-NN classification");
    DataArgs eval_data;
    tsbow::BowConfig eval_cfg;
    std::string eval_distance = "chi2", eval_out = "-", eval_confusion;
    std::size_t eval_folds = 10;
    bool eval_shared = false;
    add_data_options(evaluate, eval_data);
    add_bow_options(evaluate, eval_cfg);
    evaluate->add_option("--distance", eval_distance,
                         "Histogram distance: euclidean, chi2, js, intersection")
        ->capture_default_str();
    evaluate->add_option("--folds", eval_folds, "Cross-validation folds")
        ->capture_default_str();
    evaluate->add_option("--out", eval_out, "Report CSV ('-' = stdout)")
        ->capture_default_str();
    evaluate->add_option("--confusion", eval_confusion, "Optional confusion-matrix CSV");
    evaluate->add_flag("--shared-codebook", eval_shared,
                       "Train one codebook on all data instead of per fold");

    // sweep
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "Cross-validated accuracy along one parameter axis");
    DataArgs sweep_data;
    tsbow::BowConfig sweep_cfg;
    std::string sweep_axis, sweep_values, sweep_distance = "chi2", sweep_out = "-";
    std::size_t sweep_folds = 10;
    add_data_options(sweep_cmd, sweep_data);
    add_bow_options(sweep_cmd, sweep_cfg);
    sweep_cmd
        ->add_option("--axis", sweep_axis,
                     "Axis: window_len, codebook_size, distance, snr_db")
        ->required();
    sweep_cmd->add_option("--values", sweep_values, "Comma-separated axis values")
        ->required();
    sweep_cmd->add_option("--distance", sweep_distance, "Base histogram distance")
        ->capture_default_str();
    sweep_cmd->add_option("--folds", sweep_folds, "Cross-validation folds")
        ->capture_default_str();
    sweep_cmd->add_option("--out", sweep_out, "Sweep CSV ('-' = stdout)")
        ->capture_default_str();

    // noise
    auto* noise = app.add_subcommand(
        "noise", "Noise-robustness sweep (snr_db axis with the usual levels)");
    DataArgs noise_data;
    tsbow::BowConfig noise_cfg;
    std::string noise_values = "10,8,6,4,2,0", noise_distance = "chi2", noise_out = "-";
    std::size_t noise_folds = 10;
    add_data_options(noise, noise_data);
    add_bow_options(noise, noise_cfg);
    noise->add_option("--values", noise_values, "Comma-separated SNR levels in dB")
        ->capture_default_str();
    noise->add_option("--distance", noise_distance, "Histogram distance")
        ->capture_default_str();
    noise->add_option("--folds", noise_folds, "Cross-validation folds")
        ->capture_default_str();
    noise->add_option("--out", noise_out, "Sweep CSV ('-' = stdout)")
        ->capture_default_str();

    // baseline
    auto* baseline = app.add_subcommand(
        "baseline", "1-NN with a comparison representation: dwt, dft, dtw, or bop");
    DataArgs base_data;
    std::string base_method, base_distance = "euclidean", base_out = "-";
    std::size_t base_folds = 10;
    std::size_t resize_len = 0, dft_coeffs = 0, dtw_len = 820;
    tsbow::SaxConfig sax;
    add_data_options(baseline, base_data);
    baseline->add_option("--method", base_method, "dwt | dft | dtw | bop")
        ->required()
        ->check(CLI::IsMember({"dwt", "dft", "dtw", "bop"}));
    baseline->add_option("--distance", base_distance,
                         "Distance on feature vectors (ignored for dtw)")
        ->capture_default_str();
    baseline->add_option("--folds", base_folds, "Cross-validation folds")
        ->capture_default_str();
    baseline->add_option("--resize-len", resize_len,
                         "Resize series to this length first (0 = only if unequal, "
                         "to the maximum length)");
    baseline->add_option("--dft-coeffs", dft_coeffs,
                         "DFT magnitude count (0 = floor(len/2)+1)");
    baseline->add_option("--dtw-len", dtw_len, "Downsampled length for DTW")
        ->capture_default_str();
    baseline->add_option("--bop-window", sax.bop_window_len, "BoP window length")
        ->capture_default_str();
    baseline->add_option("--bop-alphabet", sax.alphabet_size, "SAX alphabet size")
        ->capture_default_str();
    baseline->add_option("--bop-word", sax.word_len, "SAX word length")
        ->capture_default_str();
    baseline->add_option("--bop-stride", sax.stride, "BoP window stride")
        ->capture_default_str();
    baseline->add_flag("--numerosity-reduction", sax.numerosity_reduction,
                       "Skip consecutive identical SAX words");
    baseline->add_option("--out", base_out, "Report CSV ('-' = stdout)")
        ->capture_default_str();

    // accept the global --seed/--threads after the subcommand as well
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exit 0
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\nrun with --help for usage\n";
        return 2;
    }

    if (gen->parsed()) {
        if (gen->count("--length")) spec.len_min = spec.len_max = gen_length;
        if (!gen->count("--len-min") && !gen->count("--len-max") &&
            !gen->count("--length"))
            spec.len_min = spec.len_max = gen_length;
        spec.seed = seed;
        const tsbow::Dataset ds = tsbow::gen_synthetic(spec);
        tsbow::write_dataset_dir(ds, gen_out);
        std::cerr << "wrote " << ds.size() << " series (" << ds.classes.size()
                  << " classes) to " << gen_out << "\n";
        return 0;
    }

    if (train->parsed()) {
        train_cfg.seed = seed;
        tsbow::validate(train_cfg);
        const tsbow::Dataset ds = load_data(train_data);
        std::vector<const tsbow::TimeSeries*> all;
        for (const auto& ts : ds.series) all.push_back(&ts);
        const auto features = tsbow::collect_features(all, train_cfg);
        std::cerr << features.size() << " segment features extracted\n";
        const tsbow::Codebook cb = tsbow::train_codebook(features, train_cfg);
        tsbow::save_codebook(cb, train_out);
        std::cerr << "codebook: k=" << cb.size() << " dim=" << cb.dim()
                  << " iterations=" << cb.stats.iterations
                  << " objective=" << cb.stats.objective << " -> " << train_out << "\n";
        return 0;
    }

    if (transform->parsed()) {
        const tsbow::Codebook cb = tsbow::load_codebook(transform_cb);
        const tsbow::Dataset ds = load_data(transform_data);
        std::vector<tsbow::BowHistogram> hists;
        hists.reserve(ds.size());
        for (const auto& ts : ds.series) hists.push_back(tsbow::build_histogram(cb, ts));
        std::ostringstream body;
        tsbow::write_histograms_csv(body, cb, ds.series, hists);
        write_output(transform_out, body.str());
        return 0;
    }

    if (evaluate->parsed()) {
        eval_cfg.seed = seed;
        const tsbow::DistanceKind kind = tsbow::distance_from_name(eval_distance);
        const tsbow::Dataset ds = load_data(eval_data);
        tsbow::RunOptions options;
        options.shared_codebook = eval_shared;
        options.threads = threads;
        const tsbow::ExperimentReport report =
            tsbow::run_experiment(ds, eval_cfg, kind, eval_folds, seed, options);
        log_report(report);
        std::ostringstream body;
        tsbow::write_report_csv(body, report);
        write_output(eval_out, body.str());
        if (!eval_confusion.empty()) {
            std::ostringstream conf;
            tsbow::write_confusion_csv(conf, report);
            write_output(eval_confusion, conf.str());
        }
        return 0;
    }

    if (sweep_cmd->parsed() || noise->parsed()) {
        const bool is_noise = noise->parsed();
        const DataArgs& data_args = is_noise ? noise_data : sweep_data;
        tsbow::BowConfig cfg = is_noise ? noise_cfg : sweep_cfg;
        cfg.seed = seed;
        const tsbow::SweepAxis axis = is_noise
                                          ? tsbow::SweepAxis::snr_db
                                          : tsbow::sweep_axis_from_name(sweep_axis);
        const tsbow::DistanceKind kind =
            tsbow::distance_from_name(is_noise ? noise_distance : sweep_distance);
        const std::size_t folds = is_noise ? noise_folds : sweep_folds;
        const std::string& out_path = is_noise ? noise_out : sweep_out;

        std::vector<std::string> values;
        std::stringstream list(is_noise ? noise_values : sweep_values);
        std::string item;
        while (std::getline(list, item, ','))
            if (!item.empty()) values.push_back(item);

        const tsbow::Dataset ds = load_data(data_args);
        tsbow::RunOptions options;
        options.threads = threads;
        const auto points =
            tsbow::sweep(ds, axis, values, cfg, kind, folds, seed, options);
        for (const auto& p : points)
            std::cerr << tsbow::to_string(axis) << "=" << p.value << " -> "
                      << (p.skipped ? p.note : std::to_string(p.mean_accuracy)) << "\n";
        std::ostringstream body;
        const std::string summary =
            "window_len=" + std::to_string(cfg.window_len) +
            " stride=" + std::to_string(cfg.stride) +
            " codebook_size=" + std::to_string(cfg.codebook_size) +
            " wavelet=" + cfg.wavelet + " distance=" + std::string(to_string(kind)) +
            " folds=" + std::to_string(folds) + " seed=" + std::to_string(seed);
        tsbow::write_sweep_csv(body, axis, points, summary);
        write_output(out_path, body.str());
        return 0;
    }

    if (baseline->parsed()) {
        tsbow::Dataset ds = load_data(base_data);
        std::vector<std::string> labels;
        for (const auto& ts : ds.series) labels.push_back(ts.label);

        bool unequal = false;
        std::size_t max_len = 0;
        for (const auto& ts : ds.series) {
            if (!ds.series.empty() && ts.size() != ds.series.front().size())
                unequal = true;
            max_len = std::max(max_len, ts.size());
        }

        std::vector<std::vector<double>> reps(ds.size());
        std::function<double(const std::vector<double>&, const std::vector<double>&)>
            dist;
        std::string summary = "method=" + base_method +
                              " folds=" + std::to_string(base_folds) +
                              " seed=" + std::to_string(seed);

        if (base_method == "dtw") {
            for (std::size_t i = 0; i < ds.size(); ++i)
                reps[i] = tsbow::downsample(ds.series[i], std::min(dtw_len,
                                                                   ds.series[i].size()))
                              .values;
            dist = [](const std::vector<double>& a, const std::vector<double>& b) {
                return tsbow::dtw_distance(a, b);
            };
            summary += " dtw_len=" + std::to_string(dtw_len);
        } else {
            if (base_method != "bop" && (unequal || resize_len > 0)) {
                const std::size_t target = resize_len > 0 ? resize_len : max_len;
                for (auto& ts : ds.series) ts = tsbow::resize_linear(ts, target);
                summary += " resize_len=" + std::to_string(target);
                std::cerr << "resized all series to length " << target << "\n";
            }
            if (base_method == "dwt") {
                for (std::size_t i = 0; i < ds.size(); ++i)
                    reps[i] = tsbow::dwt_features(ds.series[i]);
            } else if (base_method == "dft") {
                const std::size_t n =
                    dft_coeffs > 0 ? dft_coeffs : ds.series.front().size() / 2 + 1;
                for (std::size_t i = 0; i < ds.size(); ++i)
                    reps[i] = tsbow::dft_features(ds.series[i], n);
                summary += " dft_coeffs=" + std::to_string(n);
            } else { // bop
                for (std::size_t i = 0; i < ds.size(); ++i) {
                    const tsbow::BopHistogram h = tsbow::bop_histogram(ds.series[i], sax);
                    reps[i].assign(h.counts.begin(), h.counts.end());
                }
                summary += " bop_window=" + std::to_string(sax.bop_window_len) +
                           " alphabet=" + std::to_string(sax.alphabet_size) +
                           " word=" + std::to_string(sax.word_len);
            }
            const tsbow::DistanceKind kind = tsbow::distance_from_name(base_distance);
            dist = [kind](const std::vector<double>& a, const std::vector<double>& b) {
                return tsbow::histogram_distance(kind, a, b);
            };
            summary += " distance=" + base_distance;
        }

        const tsbow::ExperimentReport report = tsbow::run_representation_experiment(
            reps, labels, dist, base_folds, seed, threads, summary);
        log_report(report);
        std::ostringstream body;
        tsbow::write_report_csv(body, report);
        write_output(base_out, body.str());
        return 0;
    }

    std::cerr << "no subcommand given; run with --help\n";
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const tsbow::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const tsbow::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
